#include "geoscatter/expression.hpp"

#include <cctype>
#include <cstdlib>

#include "geoscatter/error.hpp"

namespace geoscatter {

class ExpressionParser {
 public:
  ExpressionParser(const std::string& text, int dim, Expression& out)
      : text_(text), dim_(dim), out_(out) {}

  void parse() {
    expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::Parse, "expression '" + text_ + "' column " +
                                      std::to_string(pos_ + 1) + ": " + why);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op, double value = 0.0, int var = 0) { out_.code_.push_back({op, value, var}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::Add);
      } else if (accept('-')) {
        term();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::Neg);
      return;
    }
    if (accept('+')) {
      unary();
      return;
    }
    power();
  }

  // Right associative; binds tighter than unary minus on its left operand.
  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(Op::Pow);
    }
  }

  void primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      emit(Op::Const, value);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (name == "pi") return emit(Op::Const, 3.14159265358979323846);
      if (name == "e") return emit(Op::Const, 2.71828182845904523536);
      if (name.size() >= 2 && name[0] == 'x') {
        const int index = std::atoi(name.c_str() + 1);
        if (index < 1 || index > dim_ || std::to_string(index) != name.substr(1)) {
          pos_ = start;
          fail("unknown variable " + name);
        }
        return emit(Op::Var, 0.0, index - 1);
      }
      Op op;
      if (name == "sin") op = Op::Sin;
      else if (name == "cos") op = Op::Cos;
      else if (name == "exp") op = Op::Exp;
      else if (name == "log") op = Op::Log;
      else if (name == "sqrt") op = Op::Sqrt;
      else {
        pos_ = start;
        fail("unknown identifier " + name);
      }
      if (!accept('(')) fail("expected '(' after " + name);
      expr();
      if (!accept(')')) fail("expected ')'");
      emit(op);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& text_;
  int dim_;
  Expression& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(const std::string& text, int dim) {
  Expression e;
  e.text_ = text;
  e.dim_ = dim;
  ExpressionParser(text, dim, e).parse();
  return e;
}

template <typename T, typename Load>
T Expression::run(Load&& load) const {
  // Fixed-capacity stack; expressions deeper than this are rejected at eval.
  using std::cos, std::exp, std::log, std::pow, std::sin, std::sqrt;
  constexpr std::size_t kStack = 64;
  std::array<T, kStack> stack;
  std::size_t top = 0;
  auto pop = [&]() -> T { return stack[--top]; };
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const:
      case Op::Var:
        if (top == kStack) throw Error(ErrorCode::Parse, "expression too deep: " + text_);
        stack[top++] = load(in);
        break;
      case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::Sin: stack[top - 1] = sin(stack[top - 1]); break;
      case Op::Cos: stack[top - 1] = cos(stack[top - 1]); break;
      case Op::Exp: stack[top - 1] = exp(stack[top - 1]); break;
      case Op::Log: stack[top - 1] = log(stack[top - 1]); break;
      case Op::Sqrt: stack[top - 1] = sqrt(stack[top - 1]); break;
      default: {
        const T b = pop();
        const T a = pop();
        T r;
        if (in.op == Op::Add) r = a + b;
        else if (in.op == Op::Sub) r = a - b;
        else if (in.op == Op::Mul) r = a * b;
        else if (in.op == Op::Div) r = a / b;
        else r = pow(a, b);
        stack[top++] = r;
      }
    }
  }
  return stack[0];
}

double Expression::eval(const Vec& x) const {
  return run<double>([&](const Instr& in) { return in.op == Op::Const ? in.value : x[in.var]; });
}

Jet Expression::eval_jet(const Vec& x) const {
  const int n = dim_;
  return run<Jet>([&](const Instr& in) {
    return in.op == Op::Const ? Jet::constant(in.value, n) : Jet::variable(x[in.var], in.var, n);
  });
}

}  // namespace geoscatter
