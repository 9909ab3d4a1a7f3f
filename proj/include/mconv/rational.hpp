#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <type_traits>

namespace mconv {

/// Arbitrary-precision exact rational. Weights of finite-support measures in
/// exact mode live here, so the algebraic laws hold with equality.
using Rational = boost::multiprecision::cpp_rational;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

template <class S>
S abs_value(const S& v) {
  return v < S(0) ? S(-v) : v;
}

/// Parses "p", "p/q", or (for non-integers) a decimal such as "0.25" into an
/// exact rational. Throws std::invalid_argument on malformed input or q == 0.
Rational parse_rational(std::string_view text);

/// "p/q" in lowest terms, or "p" when q == 1.
std::string format_rational(const Rational& v);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

template <class S>
S scalar_from_double(double v) {
  if constexpr (is_exact_v<S>) {
    return Rational(v);
  } else {
    return v;
  }
}

template <class S>
S scalar_from_rational(const Rational& v) {
  if constexpr (is_exact_v<S>) {
    return v;
  } else {
    return to_double(v);
  }
}

}  // namespace mconv
