#pragma once

#include <string>
#include <vector>

#include "geoscatter/jet.hpp"

namespace geoscatter {

// Arithmetic expression in chart variables x1..xn, compiled to a postfix
// program. Grammar: + - * / ^, unary minus, parentheses, numeric literals,
// constants pi and e, functions sin cos exp log sqrt.
class Expression {
 public:
  // Throws Error(Parse) with the column of the offending token.
  static Expression parse(const std::string& text, int dim);

  double eval(const Vec& x) const;
  Jet eval_jet(const Vec& x) const;

  int dim() const { return dim_; }
  const std::string& text() const { return text_; }

 private:
  enum class Op : unsigned char { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt };
  struct Instr {
    Op op;
    double value = 0.0;
    int var = 0;
  };

  template <typename T, typename Load>
  T run(Load&& load) const;

  friend class ExpressionParser;

  std::string text_;
  int dim_ = 0;
  std::vector<Instr> code_;
};

}  // namespace geoscatter
