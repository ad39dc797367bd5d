#pragma once

#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "symclass/expr.hpp"

namespace symclass {

class ParseError : public std::runtime_error {
 public:
  ParseError(size_t pos, const std::string& what)
      : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + what), pos_(pos) {}
  size_t position() const { return pos_; }

 private:
  size_t pos_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string text) : s_(std::move(text)) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(pos_, "unexpected trailing input");
    return e;
  }

 private:
  std::string s_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos_, std::string("expected ") + what);
  }

  // expr := ["-"] term { ("+"|"-") term }
  Expr parse_expr() {
    std::vector<Expr> terms;
    bool neg = accept('-');
    if (!neg) accept('+');
    Expr first = parse_term();
    terms.push_back(neg ? -first : first);
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        terms.push_back(parse_term());
      } else if (c == '-') {
        ++pos_;
        terms.push_back(-parse_term());
      } else {
        break;
      }
    }
    return Expr::sum(std::move(terms));
  }

  // term := factor { ("*"|"/") factor }
  Expr parse_term() {
    Expr acc = parse_factor();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * parse_factor();
      } else if (c == '/') {
        ++pos_;
        Expr d = parse_factor();
        if (d.is_zero_literal()) throw ParseError(pos_, "division by zero");
        acc = acc / d;
      } else {
        break;
      }
    }
    return acc;
  }

  // factor := base [ "^" integer ]
  Expr parse_factor() {
    Expr base = parse_base();
    if (peek() == '^') {
      ++pos_;
      long k = parse_signed_int();
      if (base.is_zero_literal() && k < 0) throw ParseError(pos_, "zero to a negative power");
      return Expr::pow(base, k);
    }
    return base;
  }

  long parse_signed_int() {
    skip_ws();
    size_t start = pos_;
    bool neg = false;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      neg = s_[pos_] == '-';
      ++pos_;
    }
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      throw ParseError(pos_, "expected integer exponent");
    long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1000000) throw ParseError(start, "exponent too large");
      ++pos_;
    }
    return neg ? -v : v;
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError(pos_, "unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  // number := digits [ "." digits ] [ ("e"|"E") [sign] digits ]
  // Decimal and scientific literals are converted exactly to rationals.
  Expr parse_number() {
    size_t start = pos_;
    Int int_part = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      int_part = int_part * 10 + (s_[pos_] - '0');
      ++pos_;
    }
    Int frac_num = 0;
    long frac_digits = 0;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        throw ParseError(pos_, "expected digits after decimal point");
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        frac_num = frac_num * 10 + (s_[pos_] - '0');
        ++frac_digits;
        ++pos_;
      }
    }
    long exp10 = 0;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      // Exponent suffix only when followed by [sign] digit; otherwise the
      // 'e' begins an identifier (implicit products are rejected later).
      size_t look = pos_ + 1;
      bool has_sign = look < s_.size() && (s_[look] == '+' || s_[look] == '-');
      size_t digit_at = look + (has_sign ? 1 : 0);
      if (digit_at < s_.size() && std::isdigit(static_cast<unsigned char>(s_[digit_at]))) {
        bool neg = has_sign && s_[look] == '-';
        pos_ = digit_at;
        long v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          v = v * 10 + (s_[pos_] - '0');
          if (v > 9999) throw ParseError(start, "numeric literal exponent out of exact range");
          ++pos_;
        }
        exp10 = neg ? -v : v;
      }
    }
    Rational r(int_part);
    if (frac_digits > 0) {
      Int den = 1;
      for (long j = 0; j < frac_digits; ++j) den *= 10;
      r += Rational(frac_num, den);
    }
    if (exp10 > 0) {
      Int p = 1;
      for (long j = 0; j < exp10; ++j) p *= 10;
      r *= Rational(p);
    } else if (exp10 < 0) {
      Int p = 1;
      for (long j = 0; j < -exp10; ++j) p *= 10;
      r /= Rational(p);
    }
    return Expr::number(CRat(r));
  }

  Expr parse_ident() {
    size_t start = pos_;
    std::string name;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      name += s_[pos_];
      ++pos_;
    }
    if (name == "i") return Expr::i();
    if (name == "t") return Expr::t();
    if (name == "x") return Expr::x();
    bool call = peek() == '(';
    if (name == "exp" || name == "sin" || name == "cos" || name == "tan") {
      if (!call) throw ParseError(start, "'" + name + "' is reserved for function application");
      ++pos_;  // consume '('
      Expr arg = parse_expr();
      expect(')', "')'");
      if (name == "exp") return Expr::exp(arg);
      if (name == "sin") return Expr::sin(arg);
      if (name == "cos") return Expr::cos(arg);
      return Expr::tan(arg);
    }
    if (call) throw ParseError(start, "unknown function '" + name + "'");
    return Expr::param(name);
  }
};

}  // namespace detail

/// Parse the exact expression grammar.  Throws ParseError with a position.
inline Expr parse(const std::string& text) { return detail::Parser(text).run(); }

}  // namespace symclass
