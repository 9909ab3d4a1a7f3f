#pragma once

#include "mconv/groups_actions.hpp"
#include "mconv/rational.hpp"
#include "mconv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mconv {

/// Float-mode weight sums further than this from 1 are rejected.
inline constexpr double kWeightDriftError = 1e-9;
/// Float-mode weight sums further than this (but within the error bound) are
/// renormalized; closer sums are kept untouched.
inline constexpr double kWeightDriftRenormalize = 1e-12;

/// Default failure probability for Hoeffding half-widths.
inline constexpr double kDefaultDelta = 0.05;

/// Measurable-set type matching a point type.
template <class P>
struct set_for;
template <>
struct set_for<PointIndex> {
  using type = PointSubset;
};
template <>
struct set_for<GroupIndex> {
  using type = GroupSubset;
};
template <>
struct set_for<double> {
  using type = ArcUnion;
};
template <class P>
using set_for_t = typename set_for<P>::type;

/// Probability measure with finite support.
///
/// Canonical form: support strictly increasing, every weight positive. Two
/// measures are equal as measures iff their canonical forms are identical, so
/// operator== is measure equality. In exact mode (S = Rational) the weights
/// must sum to exactly 1; in float mode (S = double) see kWeightDriftError.
template <class P, class S>
class FiniteMeasure {
 public:
  using point_type = P;
  using scalar_type = S;
  using Atom = std::pair<P, S>;

  /// Merges repeated points, drops zero weights, sorts the support.
  explicit FiniteMeasure(std::vector<Atom> atoms) {
    std::map<P, S> merged;
    for (auto& [p, w] : atoms) {
      if constexpr (!is_exact_v<S>) {
        if (!std::isfinite(w)) throw std::invalid_argument("measure weight is not finite");
      }
      if (w < S(0)) throw std::invalid_argument("measure weight is negative");
      auto [it, inserted] = merged.try_emplace(p, w);
      if (!inserted) it->second += w;
    }
    S total(0);
    for (auto& [p, w] : merged) {
      if (w != S(0)) {
        atoms_.emplace_back(p, w);
        total += w;
      }
    }
    if (atoms_.empty()) throw std::invalid_argument("measure has no mass");
    if constexpr (is_exact_v<S>) {
      if (total != S(1))
        throw std::invalid_argument("rational weights sum to " + format_rational(total) + ", not 1");
    } else {
      const double drift = std::abs(total - 1.0);
      if (drift > kWeightDriftError)
        throw std::invalid_argument("float weights sum to " + format_double(total) + ", drift exceeds 1e-9");
      if (drift > kWeightDriftRenormalize)
        for (auto& atom : atoms_) atom.second /= total;
    }
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }

  /// Weight of a single point; zero off the support.
  S weight(const P& p) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), p,
                               [](const Atom& a, const P& q) { return a.first < q; });
    return (it != atoms_.end() && it->first == p) ? it->second : S(0);
  }

  friend bool operator==(const FiniteMeasure&, const FiniteMeasure&) = default;

 private:
  std::vector<Atom> atoms_;
};

template <class P>
using ExactMeasure = FiniteMeasure<P, Rational>;
template <class P>
using FloatMeasure = FiniteMeasure<P, double>;

/// Monte Carlo value with a two-sided Hoeffding half-width at failure
/// probability `delta`. Exact values carry half_width 0 and samples 0.
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;
  std::uint64_t samples = 0;
  double delta = kDefaultDelta;
};

/// Hoeffding half-width for the mean of n i.i.d. draws confined to an
/// interval of width `range_width`.
inline double hoeffding_half_width(double range_width, std::uint64_t n, double delta) {
  if (n == 0) throw std::invalid_argument("half-width needs at least one sample");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  return range_width * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

/// Probability measure known only through a deterministic sampler.
///
/// Draw i under stream key k is sampler(k, i); the same (k, i) always yields
/// the same point. An optional evaluator gives exact set measures, and an
/// optional quadrature gives exact (or high-order) integrals of bounded
/// functions; both serve as ground truth for the Monte Carlo paths.
template <class P>
class SampledMeasure {
 public:
  using point_type = P;
  using set_type = set_for_t<P>;
  using Sampler = std::function<P(StreamKey, std::uint64_t)>;
  using Evaluator = std::function<double(const set_type&)>;
  using Quadrature = std::function<double(const std::function<double(const P&)>&)>;

  SampledMeasure(std::string label, Sampler sampler, Evaluator evaluator = {}, Quadrature quadrature = {})
      : label_(std::move(label)),
        sampler_(std::move(sampler)),
        evaluator_(std::move(evaluator)),
        quadrature_(std::move(quadrature)) {
    if (!sampler_) throw std::invalid_argument("sampled measure needs a sampler");
  }

  P sample(StreamKey key, std::uint64_t index) const { return sampler_(key, index); }
  const std::string& label() const { return label_; }
  bool has_evaluator() const { return static_cast<bool>(evaluator_); }
  bool has_quadrature() const { return static_cast<bool>(quadrature_); }
  const Evaluator& evaluator() const { return evaluator_; }
  const Quadrature& quadrature() const { return quadrature_; }

 private:
  std::string label_;
  Sampler sampler_;
  Evaluator evaluator_;
  Quadrature quadrature_;
};

/// Bounded function used for integration and weak neighborhoods.
/// The evaluator must satisfy |f(x)| <= bound; integrate() enforces this on
/// every point it touches.
template <class P, class S>
struct TestFunction {
  std::function<S(const P&)> evaluate;
  S bound;
  std::string label;

  S operator()(const P& x) const { return evaluate(x); }
};

template <class P, class S>
S checked_value(const TestFunction<P, S>& f, const P& x) {
  S v = f.evaluate(x);
  if constexpr (!is_exact_v<S>) {
    if (!std::isfinite(v)) throw std::domain_error("test function '" + f.label + "' returned a non-finite value");
  }
  if (abs_value(v) > f.bound)
    throw std::domain_error("test function '" + f.label + "' exceeds its declared bound");
  return v;
}

// ---------------------------------------------------------------- operations

template <class S, class P>
FiniteMeasure<P, S> dirac(const P& x) {
  return FiniteMeasure<P, S>({{x, S(1)}});
}

/// Uniform convex combination (1/n) sum delta_{g_i}; repeats are merged.
template <class S, class P>
FiniteMeasure<P, S> average_of_points(const std::vector<P>& points) {
  if (points.empty()) throw std::invalid_argument("average of an empty list of points");
  std::map<P, std::uint64_t> counts;
  for (const P& p : points) ++counts[p];
  std::vector<std::pair<P, S>> atoms;
  const auto n = static_cast<std::int64_t>(points.size());
  for (auto& [p, c] : counts) {
    if constexpr (is_exact_v<S>) {
      atoms.emplace_back(p, Rational(static_cast<std::int64_t>(c), n));
    } else {
      atoms.emplace_back(p, static_cast<double>(c) / static_cast<double>(n));
    }
  }
  return FiniteMeasure<P, S>(std::move(atoms));
}

template <class P, class S, class Set>
S measure_of(const FiniteMeasure<P, S>& nu, const Set& e) {
  S total(0);
  for (const auto& [p, w] : nu.atoms())
    if (e.contains(p)) total += w;
  return total;
}

/// Exact when an evaluator is attached; otherwise the empirical frequency of
/// `budget` draws with its Hoeffding half-width.
template <class P>
Estimate measure_of(const SampledMeasure<P>& nu, const set_for_t<P>& e, std::uint64_t budget = 0,
                    StreamKey key = {}, double delta = kDefaultDelta) {
  if (nu.has_evaluator()) return Estimate{nu.evaluator()(e), 0.0, 0, delta};
  if (budget == 0) throw std::invalid_argument("sampled measure without evaluator needs a positive sample budget");
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < budget; ++i)
    if (e.contains(nu.sample(key, i))) ++hits;
  return Estimate{static_cast<double>(hits) / static_cast<double>(budget), hoeffding_half_width(1.0, budget, delta),
                  budget, delta};
}

/// Push-forward g_* nu under x -> g.x; colliding images are merged.
template <ActionSystem Sys, class S>
FiniteMeasure<typename Sys::point_type, S> pushforward(const Sys& sys, const typename Sys::element_type& g,
                                                       const FiniteMeasure<typename Sys::point_type, S>& nu) {
  std::vector<std::pair<typename Sys::point_type, S>> atoms;
  atoms.reserve(nu.support_size());
  for (const auto& [x, w] : nu.atoms()) atoms.emplace_back(sys.act(g, x), w);
  return FiniteMeasure<typename Sys::point_type, S>(std::move(atoms));
}

template <ActionSystem Sys>
SampledMeasure<typename Sys::point_type> pushforward(const Sys& sys, const typename Sys::element_type& g,
                                                     const SampledMeasure<typename Sys::point_type>& nu) {
  using P = typename Sys::point_type;
  typename SampledMeasure<P>::Evaluator eval;
  if (nu.has_evaluator())
    eval = [sys, g, base = nu.evaluator()](const set_for_t<P>& e) { return base(sys.preimage(g, e)); };
  typename SampledMeasure<P>::Quadrature quad;
  if (nu.has_quadrature())
    quad = [sys, g, base = nu.quadrature()](const std::function<double(const P&)>& f) {
      return base([&](const P& x) { return f(sys.act(g, x)); });
    };
  return SampledMeasure<P>(
      "pushforward(" + nu.label() + ")",
      [sys, g, nu](StreamKey key, std::uint64_t i) { return sys.act(g, nu.sample(key, i)); }, std::move(eval),
      std::move(quad));
}

/// Exact weighted sum over the support.
template <class P, class S>
S integrate(const TestFunction<P, S>& f, const FiniteMeasure<P, S>& nu) {
  S total(0);
  for (const auto& [x, w] : nu.atoms()) total += w * checked_value(f, x);
  return total;
}

/// Empirical mean of `budget` draws; half-width uses the range [-B, B].
template <class P>
Estimate integrate(const TestFunction<P, double>& f, const SampledMeasure<P>& nu, std::uint64_t budget,
                   StreamKey key = {}, double delta = kDefaultDelta) {
  if (budget == 0) throw std::invalid_argument("Monte Carlo integration needs a positive sample budget");
  double sum = 0.0;
  for (std::uint64_t i = 0; i < budget; ++i) sum += checked_value(f, nu.sample(key, i));
  return Estimate{sum / static_cast<double>(budget), hoeffding_half_width(2.0 * f.bound, budget, delta), budget,
                  delta};
}

/// Total variation distance between finite measures on the same space.
template <class P, class S>
S tv_distance(const FiniteMeasure<P, S>& a, const FiniteMeasure<P, S>& b) {
  S total(0);
  auto ia = a.atoms().begin();
  auto ib = b.atoms().begin();
  while (ia != a.atoms().end() || ib != b.atoms().end()) {
    if (ib == b.atoms().end() || (ia != a.atoms().end() && ia->first < ib->first)) {
      total += ia->second;
      ++ia;
    } else if (ia == a.atoms().end() || ib->first < ia->first) {
      total += ib->second;
      ++ib;
    } else {
      total += abs_value(S(ia->second - ib->second));
      ++ia;
      ++ib;
    }
  }
  return total / S(2);
}

/// Converts weights between modes; exact -> float rounds each weight.
template <class To, class P, class From>
FiniteMeasure<P, To> convert_weights(const FiniteMeasure<P, From>& nu) {
  std::vector<std::pair<P, To>> atoms;
  for (const auto& [p, w] : nu.atoms()) {
    if constexpr (std::is_same_v<To, From>) {
      atoms.emplace_back(p, w);
    } else if constexpr (is_exact_v<To>) {
      atoms.emplace_back(p, Rational(w));
    } else {
      atoms.emplace_back(p, to_double(w));
    }
  }
  return FiniteMeasure<P, To>(std::move(atoms));
}

/// Inverse-CDF sampler over the canonical support order.
template <class P, class S>
SampledMeasure<P> as_sampled(const FiniteMeasure<P, S>& nu, std::string label = "finite") {
  std::vector<P> support;
  std::vector<double> cumulative;
  S running(0);
  for (const auto& [p, w] : nu.atoms()) {
    running += w;
    support.push_back(p);
    cumulative.push_back(to_double(running));
  }
  cumulative.back() = 1.0;
  auto pick = [support, cumulative](StreamKey key, std::uint64_t i) {
    const double u = uniform01(key, i);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return support[std::min<std::size_t>(it - cumulative.begin(), support.size() - 1)];
  };
  auto eval = [nu](const set_for_t<P>& e) { return to_double(measure_of(nu, e)); };
  auto quad = [nu](const std::function<double(const P&)>& f) {
    double total = 0.0;
    for (const auto& [p, w] : nu.atoms()) total += to_double(w) * f(p);
    return total;
  };
  return SampledMeasure<P>(std::move(label), pick, eval, quad);
}

/// Haar measure on the circle. The quadrature is the N-point trapezoid rule
/// with N = 4096, exact for trigonometric polynomials of degree below 4096.
SampledMeasure<double> uniform_circle_measure();

/// Uniform measure on the arc [begin, begin + length) of the circle.
SampledMeasure<double> uniform_arc_measure(double begin, double length);

}  // namespace mconv
