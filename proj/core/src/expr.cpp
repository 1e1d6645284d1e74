#include "qml/expr.hpp"

#include <cctype>
#include <charconv>
#include <string>

namespace qml {

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim), w_(w_basis(std::max(dim, 2))) {}

  GradedPoly parse() {
    GradedPoly p = expression();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("polynomial \"" + std::string(text_) + "\" at " + std::to_string(pos_) +
                     ": " + what);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  GradedPoly expression() {
    GradedPoly acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc += -term();
      } else {
        return acc;
      }
    }
  }

  GradedPoly term() {
    GradedPoly acc = unary();
    while (accept('*')) acc = acc * unary();
    return acc;
  }

  GradedPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  GradedPoly power() {
    GradedPoly base = primary();
    if (!accept('^')) return base;
    skip();
    const int e = integer();
    if (e < 0 || e > 512) fail("exponent out of range");
    GradedPoly r = GradedPoly(HPoly::constant(dim_, 1.0));
    for (int k = 0; k < e; ++k) r = r * base;
    return r;
  }

  int integer() {
    int v = 0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (res.ec != std::errc()) fail("expected an integer");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
  }

  int index(char var) {
    const int k = integer();
    if (k < 1 || k > dim_) {
      fail(std::string(1, var) + std::to_string(k) + " outside 1.." + std::to_string(dim_));
    }
    return k - 1;
  }

  GradedPoly primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      GradedPoly p = expression();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (c == 'z') {
      ++pos_;
      return GradedPoly(HPoly::variable(dim_, index('z')));
    }
    if (c == 'w') {
      ++pos_;
      if (dim_ < 2) fail("w-polynomials need d >= 2");
      return GradedPoly(w_[index('w')]);
    }
    if (c == 'i') {
      ++pos_;
      return GradedPoly(HPoly::constant(dim_, Complex(0.0, 1.0)));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
      if (res.ec != std::errc()) fail("bad number");
      pos_ = static_cast<std::size_t>(res.ptr - text_.data());
      return GradedPoly(HPoly::constant(dim_, v));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  int dim_;
  std::vector<HPoly> w_;
  std::size_t pos_ = 0;
};

}  // namespace

GradedPoly parse_polynomial(std::string_view text, int dim) {
  if (dim < 1) throw InputError("polynomial: d must be >= 1");
  return Parser(text, dim).parse();
}

}  // namespace qml
