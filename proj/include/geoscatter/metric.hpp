#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "geoscatter/expression.hpp"
#include "geoscatter/linalg.hpp"

namespace geoscatter {

// dg[k](i, j) = d g_ij / d x^k
struct MetricDerivs {
  std::array<Mat, kMaxDim> dg;
};

// Gamma^k_ij stored densely; symmetric in (i, j) by construction.
class Christoffel {
 public:
  explicit Christoffel(int n = 2) : n_(n) { data_.fill(0.0); }
  int dim() const { return n_; }
  double operator()(int k, int i, int j) const { return data_[(k * kMaxDim + i) * kMaxDim + j]; }
  double& operator()(int k, int i, int j) { return data_[(k * kMaxDim + i) * kMaxDim + j]; }

  // -Gamma^k_ij a^i b^j
  Vec contract(const Vec& a, const Vec& b) const;

 private:
  int n_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_;
};

// Smooth SPD tensor field on an ambient chart.
class MetricField {
 public:
  virtual ~MetricField() = default;

  virtual int dim() const = 0;
  virtual std::string id() const = 0;
  virtual Mat eval(const Vec& x) const = 0;

  virtual bool has_analytic_derivatives() const { return false; }
  // Only called when has_analytic_derivatives() is true.
  virtual MetricDerivs analytic_derivatives(const Vec& x) const;

  // Analytic if available, otherwise central differences with
  // step 1e-5 * (1 + |x|).
  MetricDerivs derivatives(const Vec& x) const;
  MetricDerivs finite_difference_derivatives(const Vec& x) const;

  // -Gamma^k_ij v^i v^j. Subclasses may override with a closed form.
  virtual Vec geodesic_acceleration(const Vec& x, const Vec& v) const;
};

using MetricPtr = std::shared_ptr<const MetricField>;

// Throws Error(DegenerateMetric) if g(x) is not positive definite.
Christoffel christoffel(const MetricField& metric, const Vec& x);
Christoffel christoffel_from(const Mat& g, const MetricDerivs& d);

// d Gamma^k_ij / d x^l by central differences of Christoffel symbols.
std::array<Christoffel, kMaxDim> christoffel_gradient(const MetricField& metric, const Vec& x,
                                                      double step = 1e-5);

class FlatMetric final : public MetricField {
 public:
  explicit FlatMetric(int n) : n_(n) {}
  int dim() const override { return n_; }
  std::string id() const override { return "flat"; }
  Mat eval(const Vec&) const override { return Mat::Identity(n_, n_); }
  bool has_analytic_derivatives() const override { return true; }
  MetricDerivs analytic_derivatives(const Vec& x) const override;
  Vec geodesic_acceleration(const Vec&, const Vec& v) const override { return Vec::Zero(v.size()); }

 private:
  int n_;
};

// g = exp(2 phi) * identity.
class ConformalMetric final : public MetricField {
 public:
  using Phi = std::function<Jet(const Vec&)>;
  ConformalMetric(int n, std::string id, Phi phi) : n_(n), id_(std::move(id)), phi_(std::move(phi)) {}
  static std::shared_ptr<ConformalMetric> from_expression(const Expression& phi, std::string id);

  int dim() const override { return n_; }
  std::string id() const override { return id_; }
  Mat eval(const Vec& x) const override;
  bool has_analytic_derivatives() const override { return true; }
  MetricDerivs analytic_derivatives(const Vec& x) const override;
  Vec geodesic_acceleration(const Vec& x, const Vec& v) const override;

  Jet phi(const Vec& x) const { return phi_(x); }

 private:
  int n_;
  std::string id_;
  Phi phi_;
};

// Component-wise expressions g_ij, i <= j.
class ExpressionMetric final : public MetricField {
 public:
  ExpressionMetric(int n, std::string id, std::vector<Expression> upper);
  int dim() const override { return n_; }
  std::string id() const override { return id_; }
  Mat eval(const Vec& x) const override;
  bool has_analytic_derivatives() const override { return true; }
  MetricDerivs analytic_derivatives(const Vec& x) const override;

 private:
  const Expression& at(int i, int j) const;
  int n_;
  std::string id_;
  std::vector<Expression> upper_;
};

// c * base, c > 0 constant.
class ScaledMetric final : public MetricField {
 public:
  ScaledMetric(MetricPtr base, double c) : base_(std::move(base)), c_(c) {}
  int dim() const override { return base_->dim(); }
  std::string id() const override;
  Mat eval(const Vec& x) const override { return c_ * base_->eval(x); }
  bool has_analytic_derivatives() const override { return base_->has_analytic_derivatives(); }
  MetricDerivs analytic_derivatives(const Vec& x) const override;
  Vec geodesic_acceleration(const Vec& x, const Vec& v) const override {
    return base_->geodesic_acceleration(x, v);
  }

 private:
  MetricPtr base_;
  double c_;
};

// Hides the analytic derivatives of another metric so that every derivative
// goes through finite differences.
class FiniteDifferenceMetric final : public MetricField {
 public:
  explicit FiniteDifferenceMetric(MetricPtr base) : base_(std::move(base)) {}
  int dim() const override { return base_->dim(); }
  std::string id() const override { return base_->id() + "-fd"; }
  Mat eval(const Vec& x) const override { return base_->eval(x); }

 private:
  MetricPtr base_;
};

}  // namespace geoscatter
