#include "efpce/numeric.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace efpce {

namespace {

bool is_integer_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

Rational parse_integer(std::string_view s) {
  std::string text(s.front() == '+' ? s.substr(1) : s);
  return Rational(mpz_class(text, 10));
}

// Splits "[-]digits[.digits][e[-]digits]" into an exact rational.
bool parse_decimal_exact(std::string_view s, Rational& out) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) negative = s[i++] == '-';
  std::string digits;
  long scale = 0;
  bool any = false;
  for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i, any = true) digits += s[i];
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i, any = true) {
      digits += s[i];
      --scale;
    }
  }
  if (!any) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    std::string_view exp = s.substr(i);
    if (!is_integer_literal(exp)) return false;
    long e = 0;
    auto first = exp.data() + (exp.front() == '+' ? 1 : 0);
    auto [p, ec] = std::from_chars(first, exp.data() + exp.size(), e);
    if (ec != std::errc() || p != exp.data() + exp.size() || std::labs(e) > 4000)
      return false;
    scale += e;
    i = s.size();
  }
  if (i != s.size()) return false;
  mpz_class mant(digits, 10);
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  out = scale >= 0 ? Rational(mant * ten_pow) : Rational(mant, ten_pow);
  out.canonicalize();
  if (negative) out = -out;
  return true;
}

}  // namespace

Number parse_number(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den.front() == '-' ||
        den.front() == '+')
      throw std::invalid_argument("malformed fraction '" + std::string(text) + "'");
    Rational d = parse_integer(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational r = parse_integer(num) / d;
    return Number{r, true};
  }
  if (is_integer_literal(text)) return Number{parse_integer(text), true};
  Rational check;
  if (!parse_decimal_exact(text, check))
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  double d = 0.0;
  auto [p, ec] = std::from_chars(text.data() + (text.front() == '+' ? 1 : 0),
                                 text.data() + text.size(), d);
  if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(d))
    throw std::invalid_argument("number out of range '" + std::string(text) + "'");
  return Number{Rational(d), false};
}

Rational parse_exact(std::string_view text) {
  if (text.find('/') != std::string_view::npos || is_integer_literal(text))
    return parse_number(text).value;
  Rational r;
  if (!parse_decimal_exact(text, r))
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  return r;
}

std::string format_rational(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

std::string format_number(const Number& n) {
  return n.exact ? format_rational(n.value) : format_double(n.to_double());
}

}  // namespace efpce
