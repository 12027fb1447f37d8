#pragma once

// Text form of Laurent polynomials for instance files, e.g.
// "z^2 - 3/2*z^-1", "zeta(4)*t*z + 1", "[3; 0, 1]*z".
// Grammar: sums and differences of products and quotients of factors;
// a factor is an integer, a bracketed cyclotomic scalar, zeta(m[, k]), a
// variable, or a parenthesized expression, optionally raised to an integer
// power.  Division and negative powers are only allowed by monomials.

#include <array>
#include <cctype>
#include <string>

#include "eqlevi/errors.hpp"
#include "eqlevi/exactmath/laurent.hpp"

namespace eqlevi::io {

template <std::size_t N>
class ExprParser {
 public:
  using L = Laurent<N>;

  ExprParser(std::string text, std::array<const char*, N> vars) : s_(std::move(text)), vars_(vars) {}

  L parse() {
    L v = expr();
    skip();
    if (p_ != s_.size()) fail("unexpected '" + std::string(1, s_[p_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidInput("bad expression \"" + s_ + "\" at " + std::to_string(p_) + ": " + why);
  }

  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool eat(char c) {
    skip();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }

  L expr() {
    L v;
    if (eat('-')) v = -term();
    else {
      eat('+');
      v = term();
    }
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }

  L term() {
    L v = power();
    for (;;) {
      if (eat('*')) v = v * power();
      else if (eat('/')) v = v * invert(power());
      else return v;
    }
  }

  L power() {
    if (eat('-')) return -power();
    L b = atom();
    if (!eat('^')) return b;
    const bool neg = eat('-');
    const long k = integer();
    if (k > 1000) fail("exponent too large");
    return neg ? invert(b).pow(static_cast<int>(k)) : b.pow(static_cast<int>(k));
  }

  L invert(const L& x) {
    if (x.terms().size() != 1) fail("only monomials can be inverted");
    const auto& [e, c] = *x.terms().begin();
    typename L::Exponent f{};
    for (std::size_t k = 0; k < N; ++k) f[k] = -e[k];
    return L::monomial(c.inverse(), f);
  }

  long integer() {
    skip();
    const std::size_t start = p_;
    while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
    if (p_ == start) fail("expected an integer");
    if (p_ - start > 9) fail("integer literal too long for an exponent or conductor");
    return std::stol(s_.substr(start, p_ - start));
  }

  L atom() {
    skip();
    if (p_ >= s_.size()) fail("unexpected end");
    const char c = s_[p_];
    if (c == '(') {
      ++p_;
      L v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (c == '[') {
      const auto close = s_.find(']', p_);
      if (close == std::string::npos) fail("unterminated scalar");
      const Scalar x = Scalar::parse(s_.substr(p_, close - p_ + 1));
      p_ = close + 1;
      return L(x);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = p_;
      while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
      return L(Scalar::parse(s_.substr(start, p_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = p_;
      while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
      const std::string id = s_.substr(start, p_ - start);
      for (std::size_t k = 0; k < N; ++k)
        if (id == vars_[k]) return L::var(k);
      if (id == "zeta") {
        if (!eat('(')) fail("expected '(' after zeta");
        const long m = integer();
        long e = 1;
        if (eat(',')) {
          const bool neg = eat('-');
          e = neg ? -integer() : integer();
        }
        if (!eat(')')) fail("expected ')'");
        if (m < 1 || m > 10000) fail("conductor out of range");
        return L(Scalar::zeta(static_cast<int>(m), e));
      }
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::array<const char*, N> vars_;
  std::size_t p_ = 0;
};

inline Laurent1 parse_laurent_z(const std::string& s) { return ExprParser<1>(s, {"z"}).parse(); }
inline Laurent2 parse_laurent_tz(const std::string& s) { return ExprParser<2>(s, {"t", "z"}).parse(); }

}  // namespace eqlevi::io
