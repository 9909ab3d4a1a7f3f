#include "mconv/measures.hpp"

#include <charconv>

namespace mconv {

namespace {

constexpr std::uint64_t kTrapezoidNodes = 4096;

double overlap_length(const ArcUnion& a, const ArcUnion& b) {
  double total = 0.0;
  for (const auto& x : a.arcs())
    for (const auto& y : b.arcs()) {
      const double lo = std::max(x.begin, y.begin);
      const double hi = std::min(x.end, y.end);
      if (hi > lo) total += hi - lo;
    }
  return total;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto parse_int = [](std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer");
    std::size_t start = (s.front() == '-' || s.front() == '+') ? 1 : 0;
    if (start == s.size()) throw std::invalid_argument("sign without digits");
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad digit in '" + std::string(s) + "'");
    // cpp_int reads a leading 0 as octal
    std::size_t first = start;
    while (first + 1 < s.size() && s[first] == '0') ++first;
    const boost::multiprecision::cpp_int v(std::string(s.substr(first)));
    return start && s.front() == '-' ? boost::multiprecision::cpp_int(-v) : v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_int(trim(text.substr(0, slash)));
    const auto den = parse_int(trim(text.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const bool negative = text.front() == '-';
    std::string_view body = (text.front() == '-' || text.front() == '+') ? text.substr(1) : text;
    const auto d = body.find('.');
    std::string digits = std::string(body.substr(0, d)) + std::string(body.substr(d + 1));
    if (digits.empty()) throw std::invalid_argument("bad decimal '" + std::string(text) + "'");
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = d + 1; i < body.size(); ++i) scale *= 10;
    Rational r(parse_int(digits), scale);
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_int(text));
}

std::string format_rational(const Rational& v) {
  const auto num = boost::multiprecision::numerator(v);
  const auto den = boost::multiprecision::denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

SampledMeasure<double> uniform_circle_measure() {
  return SampledMeasure<double>(
      "uniform-circle", [](StreamKey key, std::uint64_t i) { return uniform01(key, i); },
      [](const ArcUnion& e) { return e.length(); },
      [](const std::function<double(const double&)>& f) {
        double total = 0.0;
        for (std::uint64_t j = 0; j < kTrapezoidNodes; ++j)
          total += f(static_cast<double>(j) / static_cast<double>(kTrapezoidNodes));
        return total / static_cast<double>(kTrapezoidNodes);
      });
}

SampledMeasure<double> uniform_arc_measure(double begin, double length) {
  if (!(length > 0.0 && length <= 1.0)) throw std::invalid_argument("arc length must lie in (0, 1]");
  const double start = wrap_turns(begin);
  const ArcUnion support({ArcUnion::Arc{start, start + length}});
  return SampledMeasure<double>(
      "uniform-arc",
      [start, length](StreamKey key, std::uint64_t i) { return wrap_turns(start + length * uniform01(key, i)); },
      [support, length](const ArcUnion& e) { return overlap_length(support, e) / length; });
}

}  // namespace mconv
