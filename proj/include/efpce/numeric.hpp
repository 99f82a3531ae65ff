#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <type_traits>

namespace efpce {

using Rational = mpq_class;

/// A parsed numeric literal. Fractions and integers are exact; decimals are
/// rounded to the nearest double and remember that they are not exact.
struct Number {
  Rational value{0};
  bool exact = true;

  double to_double() const { return value.get_d(); }
  friend bool operator==(const Number& a, const Number& b) {
    return a.exact == b.exact && a.value == b.value;
  }
};

/// Accepts "3", "-1/2", "0.25", "1e-3". Throws std::invalid_argument.
Number parse_number(std::string_view text);

/// Parses a decimal or fraction literal exactly ("1e-3" -> 1/1000). Used for
/// tremble parameters and epsilon grids, which are specified by the user.
Rational parse_exact(std::string_view text);

/// "p/q", or "p" when q == 1.
std::string format_rational(const Rational& r);
/// Shortest representation that round-trips through strtod.
std::string format_double(double x);
std::string format_number(const Number& n);

template <class T>
inline constexpr bool kIsExact = std::is_same_v<T, Rational>;

template <class T>
T convert(const Rational& r) {
  if constexpr (kIsExact<T>) {
    return r;
  } else {
    return r.get_d();
  }
}

inline int sgn(double x) { return (x > 0) - (x < 0); }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& r) { return r.get_d(); }

template <class T>
T power(const T& base, int exponent) {
  T out = 1;
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

}  // namespace efpce
