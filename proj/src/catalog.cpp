#include "mconv/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace mconv {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + s + "' is not a number");
  }
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("'" + s + "' is not a finite number");
  return v;
}

std::uint32_t parse_index(const std::string& s, std::size_t limit) {
  const double v = parse_real(s);
  if (v < 0 || v != std::floor(v) || v >= static_cast<double>(limit))
    throw std::invalid_argument("'" + s + "' is not a point index below " + std::to_string(limit));
  return static_cast<std::uint32_t>(v);
}

int parse_frequency(const std::string& s) {
  const double v = parse_real(s);
  if (v < 0 || v != std::floor(v) || v > 1024) throw std::invalid_argument("frequency '" + s + "' must be an integer in [0, 1024]");
  return static_cast<int>(v);
}

}  // namespace

ParsedLabel parse_label(std::string_view label) {
  const std::string text = trim(label);
  const auto open = text.find('(');
  if (open == std::string::npos) return {text, {}};
  if (text.back() != ')') throw std::invalid_argument("test function label '" + text + "' has unbalanced parentheses");
  ParsedLabel out{trim(std::string_view(text).substr(0, open)), {}};
  const std::string inner = text.substr(open + 1, text.size() - open - 2);
  if (trim(inner).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = inner.find(',', start);
    out.args.push_back(trim(std::string_view(inner).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

FiniteGroup permutation_group(const std::vector<std::vector<std::uint32_t>>& perms) {
  if (perms.empty()) throw std::invalid_argument("empty permutation list");
  const std::size_t n = perms.size();
  const std::size_t m = perms.front().size();
  std::map<std::vector<std::uint32_t>, std::uint32_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (perms[i].size() != m) throw std::invalid_argument("permutations act on different point counts");
    if (!index.emplace(perms[i], static_cast<std::uint32_t>(i)).second)
      throw std::invalid_argument("permutation listed twice");
  }
  std::vector<std::uint32_t> identity(m);
  for (std::size_t x = 0; x < m; ++x) identity[x] = static_cast<std::uint32_t>(x);
  const auto id = index.find(identity);
  if (id == index.end()) throw std::invalid_argument("permutation list lacks the identity");
  std::vector<std::uint32_t> table(n * n);
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      std::vector<std::uint32_t> gh(m);
      for (std::size_t x = 0; x < m; ++x) {
        if (perms[h][x] >= m) throw std::invalid_argument("permutation entry out of range");
        gh[x] = perms[g][perms[h][x]];
      }
      const auto it = index.find(gh);
      if (it == index.end()) throw std::invalid_argument("permutation list is not closed under composition");
      table[g * n + h] = it->second;
    }
  return FiniteGroup(n, std::move(table), id->second);
}

FiniteActionSystem permutation_action(const std::vector<std::vector<std::uint32_t>>& perms, std::string name) {
  FiniteGroup group = permutation_group(perms);
  const std::size_t m = perms.front().size();
  std::vector<std::uint32_t> action;
  action.reserve(perms.size() * m);
  for (const auto& p : perms) action.insert(action.end(), p.begin(), p.end());
  return FiniteActionSystem(std::move(group), m, std::move(action), std::move(name));
}

FiniteActionSystem cyclic_rotation(std::size_t n, std::string name) {
  if (n == 0) throw std::invalid_argument("cyclic group order must be positive");
  std::vector<std::vector<std::uint32_t>> perms(n, std::vector<std::uint32_t>(n));
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t x = 0; x < n; ++x) perms[g][x] = static_cast<std::uint32_t>((g + x) % n);
  if (name.empty()) name = "z" + std::to_string(n) + "-rotation";
  return permutation_action(perms, std::move(name));
}

FiniteActionSystem trivial_system(std::size_t points) {
  std::vector<std::uint32_t> id(points);
  for (std::size_t x = 0; x < points; ++x) id[x] = static_cast<std::uint32_t>(x);
  return FiniteActionSystem(FiniteGroup(1, {0}, 0), points, id, "trivial");
}

std::vector<std::string> builtin_finite_names() { return {"z2-swap", "z3-rotation", "s3-natural", "dihedral-4"}; }

FiniteActionSystem builtin_finite_system(std::string_view name) {
  if (name == "z2-swap") return permutation_action({{0, 1}, {1, 0}}, "z2-swap");
  if (name == "z3-rotation") return cyclic_rotation(3, "z3-rotation");
  if (name == "s3-natural") {
    std::vector<std::vector<std::uint32_t>> perms = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    return permutation_action(perms, "s3-natural");
  }
  if (name == "dihedral-4") {
    // Rotations x -> x + k, then reflections x -> k - x, on the square's vertices.
    std::vector<std::vector<std::uint32_t>> perms;
    for (std::uint32_t k = 0; k < 4; ++k) perms.push_back({k % 4, (k + 1) % 4, (k + 2) % 4, (k + 3) % 4});
    for (std::uint32_t k = 0; k < 4; ++k) perms.push_back({k % 4, (k + 3) % 4, (k + 2) % 4, (k + 1) % 4});
    return permutation_action(perms, "dihedral-4");
  }
  std::string known;
  for (const auto& n : builtin_finite_names()) known += " " + n;
  throw std::invalid_argument("unknown built-in system '" + std::string(name) + "' (finite systems:" + known + ", plus " +
                              std::string(kCircleScenario) + ")");
}

template <class S>
TestFunction<PointIndex, S> finite_test_function(std::string_view label, std::size_t points) {
  const ParsedLabel p = parse_label(label);
  std::vector<S> values(points, S(0));
  if (p.name == "const") {
    if (p.args.size() != 1) throw std::invalid_argument("const(c) takes one argument");
    values.assign(points, scalar_from_rational<S>(parse_rational(p.args[0])));
  } else if (p.name == "indicator") {
    for (const auto& a : p.args) values[parse_index(a, points)] = S(1);
  } else if (p.name == "table") {
    if (p.args.size() != points)
      throw std::invalid_argument("table(...) needs exactly " + std::to_string(points) + " values");
    for (std::size_t i = 0; i < points; ++i) values[i] = scalar_from_rational<S>(parse_rational(p.args[i]));
  } else {
    throw std::invalid_argument("unknown finite test function '" + p.name + "' (const, indicator, table)");
  }
  S bound(0);
  for (const S& v : values) bound = std::max(bound, abs_value(v));
  return TestFunction<PointIndex, S>{[values](const PointIndex& x) {
                                       if (x.value >= values.size()) throw std::out_of_range("point outside the test function's space");
                                       return values[x.value];
                                     },
                                     bound, trim(label)};
}

template TestFunction<PointIndex, Rational> finite_test_function<Rational>(std::string_view, std::size_t);
template TestFunction<PointIndex, double> finite_test_function<double>(std::string_view, std::size_t);

TestFunction<double, double> circle_test_function(std::string_view label) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const ParsedLabel p = parse_label(label);
  const std::string name = trim(label);
  if (p.name == "const") {
    if (p.args.size() != 1) throw std::invalid_argument("const(c) takes one argument");
    const double c = parse_real(p.args[0]);
    return {[c](const double&) { return c; }, std::abs(c), name};
  }
  if (p.name == "cos" || p.name == "sin" || p.name == "cos2") {
    if (p.args.size() > 1) throw std::invalid_argument(p.name + "(k) takes at most one argument");
    const int k = p.args.empty() ? 1 : parse_frequency(p.args[0]);
    if (p.name == "cos") return {[k](const double& t) { return std::cos(two_pi * k * t); }, 1.0, name};
    if (p.name == "sin") return {[k](const double& t) { return std::sin(two_pi * k * t); }, 1.0, name};
    return {[k](const double& t) {
              const double c = std::cos(two_pi * k * t);
              return c * c;
            },
            1.0, name};
  }
  if (p.name == "trig") {
    if (p.args.empty() || p.args.size() % 2 == 0)
      throw std::invalid_argument("trig(c0, a1, b1, ...) needs an odd number of coefficients");
    std::vector<double> coef;
    double bound = 0.0;
    for (const auto& a : p.args) {
      coef.push_back(parse_real(a));
      bound += std::abs(coef.back());
    }
    return {[coef](const double& t) {
              double v = coef[0];
              for (std::size_t k = 1; 2 * k <= coef.size() - 1; ++k)
                v += coef[2 * k - 1] * std::cos(two_pi * k * t) + coef[2 * k] * std::sin(two_pi * k * t);
              return v;
            },
            // Summation rounding can overshoot the exact sup norm by a few ulps.
            bound * (1.0 + 1e-12), name};
  }
  throw std::invalid_argument("unknown circle test function '" + p.name + "' (const, cos, sin, cos2, trig)");
}

}  // namespace mconv
