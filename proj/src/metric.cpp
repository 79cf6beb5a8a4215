#include "geoscatter/metric.hpp"

#include <sstream>

#include "geoscatter/error.hpp"

namespace geoscatter {

SpdRoots spd_roots(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorCode::DegenerateMetric, "matrix is not positive definite");
  const Vec root = es.eigenvalues().cwiseSqrt();
  SpdRoots r;
  r.sqrt = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  r.inv_sqrt = es.eigenvectors() * root.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return r;
}

Vec Christoffel::contract(const Vec& a, const Vec& b) const {
  Vec out = Vec::Zero(n_);
  for (int k = 0; k < n_; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) acc += (*this)(k, i, j) * a[i] * b[j];
    out[k] = -acc;
  }
  return out;
}

MetricDerivs MetricField::analytic_derivatives(const Vec& x) const { return finite_difference_derivatives(x); }

MetricDerivs MetricField::derivatives(const Vec& x) const {
  return has_analytic_derivatives() ? analytic_derivatives(x) : finite_difference_derivatives(x);
}

MetricDerivs MetricField::finite_difference_derivatives(const Vec& x) const {
  const int n = dim();
  const double h = 1e-5 * (1.0 + x.norm());
  MetricDerivs d;
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    d.dg[k] = (eval(xp) - eval(xm)) / (2.0 * h);
  }
  return d;
}

Christoffel christoffel_from(const Mat& g, const MetricDerivs& d) {
  const int n = static_cast<int>(g.rows());
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::DegenerateMetric, "metric is not positive definite");
  const Mat ginv = llt.solve(Mat::Identity(n, n));
  // first kind: [ij, l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  std::array<double, kMaxDim * kMaxDim * kMaxDim> first{};
  auto f = [&](int i, int j, int l) -> double& { return first[(i * kMaxDim + j) * kMaxDim + l]; };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double v = 0.5 * (d.dg[i](j, l) + d.dg[j](i, l) - d.dg[l](i, j));
        f(i, j, l) = v;
        f(j, i, l) = v;
      }
  Christoffel gamma(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += ginv(k, l) * f(i, j, l);
        gamma(k, i, j) = acc;
        gamma(k, j, i) = acc;
      }
  return gamma;
}

Christoffel christoffel(const MetricField& metric, const Vec& x) {
  return christoffel_from(metric.eval(x), metric.derivatives(x));
}

std::array<Christoffel, kMaxDim> christoffel_gradient(const MetricField& metric, const Vec& x,
                                                      double step) {
  const int n = metric.dim();
  std::array<Christoffel, kMaxDim> out;
  for (int l = 0; l < n; ++l) {
    Vec xp = x, xm = x;
    xp[l] += step;
    xm[l] -= step;
    const Christoffel a = christoffel(metric, xp);
    const Christoffel b = christoffel(metric, xm);
    Christoffel d(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(k, i, j) = (a(k, i, j) - b(k, i, j)) / (2.0 * step);
    out[l] = d;
  }
  return out;
}

Vec MetricField::geodesic_acceleration(const Vec& x, const Vec& v) const {
  return christoffel(*this, x).contract(v, v);
}

MetricDerivs FlatMetric::analytic_derivatives(const Vec&) const {
  MetricDerivs d;
  for (int k = 0; k < n_; ++k) d.dg[k] = Mat::Zero(n_, n_);
  return d;
}

std::shared_ptr<ConformalMetric> ConformalMetric::from_expression(const Expression& phi, std::string id) {
  return std::make_shared<ConformalMetric>(phi.dim(), std::move(id),
                                           [phi](const Vec& x) { return phi.eval_jet(x); });
}

Mat ConformalMetric::eval(const Vec& x) const {
  const double f = std::exp(2.0 * phi_(x).v);
  return f * Mat::Identity(n_, n_);
}

MetricDerivs ConformalMetric::analytic_derivatives(const Vec& x) const {
  const Jet p = phi_(x);
  const double f = std::exp(2.0 * p.v);
  MetricDerivs d;
  for (int k = 0; k < n_; ++k) d.dg[k] = (2.0 * p.d[k] * f) * Mat::Identity(n_, n_);
  return d;
}

// Gamma^k_ij = delta^k_i phi_j + delta^k_j phi_i - delta_ij phi_k
Vec ConformalMetric::geodesic_acceleration(const Vec& x, const Vec& v) const {
  const Jet p = phi_(x);
  return -(2.0 * p.d.dot(v)) * v + v.squaredNorm() * p.d;
}

ExpressionMetric::ExpressionMetric(int n, std::string id, std::vector<Expression> upper)
    : n_(n), id_(std::move(id)), upper_(std::move(upper)) {
  if (static_cast<int>(upper_.size()) != n * (n + 1) / 2)
    throw Error(ErrorCode::Usage, "expression metric needs n(n+1)/2 components");
}

const Expression& ExpressionMetric::at(int i, int j) const {
  if (i > j) std::swap(i, j);
  // row-major upper triangle
  const int index = i * n_ - i * (i - 1) / 2 + (j - i);
  return upper_[static_cast<std::size_t>(index)];
}

Mat ExpressionMetric::eval(const Vec& x) const {
  Mat g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) g(i, j) = g(j, i) = at(i, j).eval(x);
  return g;
}

MetricDerivs ExpressionMetric::analytic_derivatives(const Vec& x) const {
  MetricDerivs d;
  for (int k = 0; k < n_; ++k) d.dg[k] = Mat::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      const Jet c = at(i, j).eval_jet(x);
      for (int k = 0; k < n_; ++k) d.dg[k](i, j) = d.dg[k](j, i) = c.d[k];
    }
  return d;
}

std::string ScaledMetric::id() const {
  std::ostringstream os;
  os.precision(17);
  os << base_->id() << "*" << c_;
  return os.str();
}

MetricDerivs ScaledMetric::analytic_derivatives(const Vec& x) const {
  MetricDerivs d = base_->analytic_derivatives(x);
  for (int k = 0; k < dim(); ++k) d.dg[k] *= c_;
  return d;
}

}  // namespace geoscatter
