#pragma once

// Whitelisted expressions over the grid coordinates for V and xi:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('-' | '+') factor | power
//   power  := atom ('^' factor)?
//   atom   := number | x | x1 | x2 | pi | exp(expr) | gaussian(expr) | (expr)
// x is x1. gaussian(t) = exp(-t^2).

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "folab/grid.hpp"

namespace folab {

class expr_error : public std::invalid_argument {
 public:
  expr_error(const std::string& text, std::size_t pos, const std::string& what)
      : std::invalid_argument("expression '" + text + "' at " + std::to_string(pos) + ": " + what) {}
};

class Expr {
 public:
  explicit Expr(std::string text) : text_(std::move(text)) {
    pos_ = 0;
    fn_ = parse_sum();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  const std::string& text() const { return text_; }
  double operator()(double x1, double x2 = 0.0) const { return fn_(x1, x2); }

  /// Samples on the grid; throws when a value is not finite.
  GridFunction sample(const BoxDomain& dom) const {
    auto g = GridFunction::sample(dom, [&](double x, double y) { return fn_(x, y); });
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!std::isfinite(g[i])) throw expr_error(text_, 0, "not finite on the grid");
    return g;
  }

 private:
  using Fn = std::function<double(double, double)>;

  [[noreturn]] void fail(const std::string& what) const { throw expr_error(text_, pos_, what); }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn parse_sum() {
    Fn lhs = parse_term();
    for (;;) {
      if (eat('+')) {
        Fn rhs = parse_term();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) + rhs(x, y); };
      } else if (eat('-')) {
        Fn rhs = parse_term();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) - rhs(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_term() {
    Fn lhs = parse_factor();
    for (;;) {
      if (eat('*')) {
        Fn rhs = parse_factor();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) * rhs(x, y); };
      } else if (eat('/')) {
        Fn rhs = parse_factor();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) / rhs(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_factor() {
    if (eat('-')) {
      Fn f = parse_factor();
      return [f](double x, double y) { return -f(x, y); };
    }
    if (eat('+')) return parse_factor();
    Fn base = parse_atom();
    if (eat('^')) {
      Fn e = parse_factor();
      return [base, e](double x, double y) { return std::pow(base(x, y), e(x, y)); };
    }
    return base;
  }

  Fn parse_atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return [v](double, double) { return v; };
    }
    if (eat('(')) {
      Fn f = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "x" || name == "x1") return [](double x, double) { return x; };
    if (name == "x2") return [](double, double y) { return y; };
    if (name == "pi") return [](double, double) { return pi; };
    if (name == "exp" || name == "gaussian") {
      if (!eat('(')) fail("expected '(' after " + name);
      Fn a = parse_sum();
      if (!eat(')')) fail("expected ')'");
      if (name == "exp") return [a](double x, double y) { return std::exp(a(x, y)); };
      return [a](double x, double y) {
        const double t = a(x, y);
        return std::exp(-t * t);
      };
    }
    pos_ = start;
    fail(name.empty() ? "unexpected '" + std::string(1, c) + "'" : "unknown name '" + name + "'");
  }

  std::string text_;
  std::size_t pos_ = 0;
  Fn fn_;
};

}  // namespace folab
