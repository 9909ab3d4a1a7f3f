#pragma once

#include "mconv/groups_actions.hpp"
#include "mconv/measures.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace mconv {

enum class Axis { left, right };

// ------------------------------------------------------------ product sets

/// Finite set of pairs (l, r), kept sorted and deduplicated.
template <class L, class R>
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(std::vector<std::pair<L, R>> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  }

  bool contains(const L& l, const R& r) const {
    return std::binary_search(pairs_.begin(), pairs_.end(), std::pair<L, R>{l, r});
  }
  const std::vector<std::pair<L, R>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  friend bool operator==(const PairSet&, const PairSet&) = default;

 private:
  std::vector<std::pair<L, R>> pairs_;
};

/// Finite union of rectangles (arc union) x (arc union) on the torus,
/// canonicalized into pieces with pairwise disjoint left arcs, hence
/// pairwise disjoint rectangles.
class RectangleUnion {
 public:
  struct Piece {
    ArcUnion::Arc left;
    ArcUnion right;
  };

  RectangleUnion() = default;
  explicit RectangleUnion(const std::vector<std::pair<ArcUnion, ArcUnion>>& rectangles);

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool contains(double l, double r) const;
  /// W_l = {r : (l, r) in W}.
  ArcUnion left_section(double l) const;
  /// W^r = {l : (l, r) in W}.
  ArcUnion right_section(double r) const;
  /// Lebesgue measure on the torus.
  double area() const;

 private:
  std::vector<Piece> pieces_;
};

// -------------------------------------------------------- product measures

/// mu x nu for finite supports: the weight grid w(l, r) = mu(l) nu(r).
template <class L, class R, class S>
class FiniteProduct {
 public:
  FiniteProduct(FiniteMeasure<L, S> left, FiniteMeasure<R, S> right)
      : left_(std::move(left)), right_(std::move(right)) {}

  const FiniteMeasure<L, S>& left() const { return left_; }
  const FiniteMeasure<R, S>& right() const { return right_; }

  S weight(const L& l, const R& r) const { return left_.weight(l) * right_.weight(r); }

  /// Direct grid mass of W.
  S mass(const PairSet<L, R>& w) const {
    S total(0);
    for (const auto& [l, r] : w.pairs()) total += weight(l, r);
    return total;
  }

  S total_mass() const {
    S total(0);
    for (const auto& [l, a] : left_.atoms())
      for (const auto& [r, b] : right_.atoms()) total += a * b;
    return total;
  }

 private:
  FiniteMeasure<L, S> left_;
  FiniteMeasure<R, S> right_;
};

/// mu x nu for sampled factors: coordinates come from independent streams.
template <class L, class R>
class SampledProduct {
 public:
  SampledProduct(SampledMeasure<L> left, SampledMeasure<R> right)
      : left_(std::move(left)), right_(std::move(right)) {}

  const SampledMeasure<L>& left() const { return left_; }
  const SampledMeasure<R>& right() const { return right_; }

  std::pair<L, R> sample(StreamKey key, std::uint64_t i) const {
    return {left_.sample(key.child(0), i), right_.sample(key.child(1), i)};
  }

 private:
  SampledMeasure<L> left_;
  SampledMeasure<R> right_;
};

template <class L, class R, class S>
FiniteProduct<L, R, S> product(const FiniteMeasure<L, S>& mu, const FiniteMeasure<R, S>& nu) {
  return FiniteProduct<L, R, S>(mu, nu);
}

template <class L, class R>
SampledProduct<L, R> product(const SampledMeasure<L>& mu, const SampledMeasure<R>& nu) {
  return SampledProduct<L, R>(mu, nu);
}

/// Iterated integral of the sections of W: axis::left integrates nu(W_l)
/// against mu, axis::right integrates mu(W^r) against nu.
template <class L, class R, class S>
S slice_integral(const FiniteProduct<L, R, S>& lambda, const PairSet<L, R>& w, Axis axis) {
  S total(0);
  if (axis == Axis::left) {
    for (const auto& [l, a] : lambda.left().atoms()) {
      S section(0);
      for (const auto& [r, b] : lambda.right().atoms())
        if (w.contains(l, r)) section += b;
      total += a * section;
    }
  } else {
    for (const auto& [r, b] : lambda.right().atoms()) {
      S section(0);
      for (const auto& [l, a] : lambda.left().atoms())
        if (w.contains(l, r)) section += a;
      total += b * section;
    }
  }
  return total;
}

/// Torus mass of W: exact when both factors carry evaluators, otherwise the
/// frequency of `budget` product draws.
Estimate product_mass(const SampledProduct<double, double>& lambda, const RectangleUnion& w, std::uint64_t budget,
                      StreamKey key = {}, double delta = kDefaultDelta);

/// Monte Carlo over the outer axis; the section measure comes from the inner
/// factor's exact evaluator, which is therefore required.
Estimate slice_integral(const SampledProduct<double, double>& lambda, const RectangleUnion& w, Axis axis,
                        std::uint64_t budget, StreamKey key = {}, double delta = kDefaultDelta);

// -------------------------------------------------------------- convolution

/// pi^{-1}[E] = {(g, x) : g.x in E} on a finite system.
template <FiniteSystem Sys>
PairSet<typename Sys::element_type, typename Sys::point_type> action_preimage(const Sys& sys,
                                                                              const typename Sys::point_set& e) {
  std::vector<std::pair<typename Sys::element_type, typename Sys::point_type>> pairs;
  for (const auto& g : sys.elements())
    for (const auto& x : sys.points())
      if (e.contains(sys.act(g, x))) pairs.emplace_back(g, x);
  return PairSet<typename Sys::element_type, typename Sys::point_type>(std::move(pairs));
}

/// mu * nu: the image of the product grid under the action map,
/// sum over (g, x) of mu(g) nu(x) delta_{g.x}.
template <ActionSystem Sys, class S>
FiniteMeasure<typename Sys::point_type, S> convolve(const Sys& sys,
                                                    const FiniteMeasure<typename Sys::element_type, S>& mu,
                                                    const FiniteMeasure<typename Sys::point_type, S>& nu) {
  std::vector<std::pair<typename Sys::point_type, S>> atoms;
  atoms.reserve(mu.support_size() * nu.support_size());
  for (const auto& [g, a] : mu.atoms())
    for (const auto& [x, b] : nu.atoms()) atoms.emplace_back(sys.act(g, x), a * b);
  return FiniteMeasure<typename Sys::point_type, S>(std::move(atoms));
}

/// Sampled mu * nu: draw i is g_i . x_i with g_i, x_i from independent
/// sub-streams of the caller's key.
template <ActionSystem Sys>
SampledMeasure<typename Sys::point_type> convolve(const Sys& sys, const SampledMeasure<typename Sys::element_type>& mu,
                                                  const SampledMeasure<typename Sys::point_type>& nu) {
  return SampledMeasure<typename Sys::point_type>(
      mu.label() + "*" + nu.label(),
      [sys, mu, nu](StreamKey key, std::uint64_t i) {
        return sys.act(mu.sample(key.child(0), i), nu.sample(key.child(1), i));
      });
}

/// (mu * nu)(E) as the integral of nu(g^{-1}E) against mu.
template <ActionSystem Sys, class S>
S convolve_via_group_integral(const Sys& sys, const FiniteMeasure<typename Sys::element_type, S>& mu,
                              const FiniteMeasure<typename Sys::point_type, S>& nu,
                              const typename Sys::point_set& e) {
  S total(0);
  for (const auto& [g, a] : mu.atoms()) total += a * measure_of(nu, sys.preimage(g, e));
  return total;
}

/// Sampled mu: Monte Carlo over g with nu(g^{-1}E) evaluated exactly.
template <ActionSystem Sys>
Estimate convolve_via_group_integral(const Sys& sys, const SampledMeasure<typename Sys::element_type>& mu,
                                     const SampledMeasure<typename Sys::point_type>& nu,
                                     const typename Sys::point_set& e, std::uint64_t budget, StreamKey key = {},
                                     double delta = kDefaultDelta) {
  if (!nu.has_evaluator()) throw std::invalid_argument("group-integral formula needs an exact evaluator for nu");
  if (budget == 0) throw std::invalid_argument("group-integral formula needs a positive sample budget");
  double sum = 0.0;
  for (std::uint64_t i = 0; i < budget; ++i) sum += nu.evaluator()(sys.preimage(mu.sample(key, i), e));
  return Estimate{sum / static_cast<double>(budget), hoeffding_half_width(1.0, budget, delta), budget, delta};
}

/// (mu * nu)(E) as the integral of mu(E:x) against nu.
template <ActionSystem Sys, class S>
S convolve_via_section_integral(const Sys& sys, const FiniteMeasure<typename Sys::element_type, S>& mu,
                                const FiniteMeasure<typename Sys::point_type, S>& nu,
                                const typename Sys::point_set& e) {
  S total(0);
  for (const auto& [x, b] : nu.atoms()) total += b * measure_of(mu, sys.section(e, x));
  return total;
}

/// Sampled nu: Monte Carlo over x with mu(E:x) evaluated exactly.
template <ActionSystem Sys>
Estimate convolve_via_section_integral(const Sys& sys, const SampledMeasure<typename Sys::element_type>& mu,
                                       const SampledMeasure<typename Sys::point_type>& nu,
                                       const typename Sys::point_set& e, std::uint64_t budget, StreamKey key = {},
                                       double delta = kDefaultDelta) {
  if (!mu.has_evaluator()) throw std::invalid_argument("section-integral formula needs an exact evaluator for mu");
  if (budget == 0) throw std::invalid_argument("section-integral formula needs a positive sample budget");
  double sum = 0.0;
  for (std::uint64_t i = 0; i < budget; ++i) sum += mu.evaluator()(sys.section(e, nu.sample(key, i)));
  return Estimate{sum / static_cast<double>(budget), hoeffding_half_width(1.0, budget, delta), budget, delta};
}

/// The three sides of the Fubini identity for f o pi:
///   direct      = int f d(mu * nu)
///   group_inner = int [ int f(g.x) dmu(g) ] dnu(x)
///   space_inner = int [ int f(g.x) dnu(x) ] dmu(g)
template <class T>
struct FubiniTriple {
  T direct;
  T group_inner;
  T space_inner;
};

template <ActionSystem Sys, class S>
FubiniTriple<S> fubini_triple(const Sys& sys, const TestFunction<typename Sys::point_type, S>& f,
                              const FiniteMeasure<typename Sys::element_type, S>& mu,
                              const FiniteMeasure<typename Sys::point_type, S>& nu) {
  FubiniTriple<S> out{integrate(f, convolve(sys, mu, nu)), S(0), S(0)};
  for (const auto& [x, b] : nu.atoms()) {
    S inner(0);
    for (const auto& [g, a] : mu.atoms()) inner += a * checked_value(f, sys.act(g, x));
    out.group_inner += b * inner;
  }
  for (const auto& [g, a] : mu.atoms()) {
    S inner(0);
    for (const auto& [x, b] : nu.atoms()) inner += b * checked_value(f, sys.act(g, x));
    out.space_inner += a * inner;
  }
  return out;
}

/// Monte Carlo Fubini triple. Each value averages `budget` bounded terms from
/// its own sub-stream; the iterated forms average inner means of
/// `inner_budget` draws, so every half-width is the Hoeffding bound for
/// `budget` terms in [-B, B].
template <ActionSystem Sys>
FubiniTriple<Estimate> fubini_triple(const Sys& sys, const TestFunction<typename Sys::point_type, double>& f,
                                     const SampledMeasure<typename Sys::element_type>& mu,
                                     const SampledMeasure<typename Sys::point_type>& nu, std::uint64_t budget,
                                     StreamKey key = {}, double delta = kDefaultDelta,
                                     std::uint64_t inner_budget = 64) {
  if (budget == 0 || inner_budget == 0) throw std::invalid_argument("Fubini estimate needs positive budgets");
  const double hw = hoeffding_half_width(2.0 * f.bound, budget, delta);
  const auto m = static_cast<double>(inner_budget);
  FubiniTriple<Estimate> out{integrate(f, convolve(sys, mu, nu), budget, key.child(0), delta),
                             Estimate{0.0, hw, budget, delta}, Estimate{0.0, hw, budget, delta}};
  double outer_group = 0.0;
  double outer_space = 0.0;
  for (std::uint64_t j = 0; j < budget; ++j) {
    const auto x = nu.sample(key.child(1), j);
    double inner = 0.0;
    for (std::uint64_t i = 0; i < inner_budget; ++i)
      inner += checked_value(f, sys.act(mu.sample(key.child(2), j * inner_budget + i), x));
    outer_group += inner / m;

    const auto g = mu.sample(key.child(3), j);
    inner = 0.0;
    for (std::uint64_t i = 0; i < inner_budget; ++i)
      inner += checked_value(f, sys.act(g, nu.sample(key.child(4), j * inner_budget + i)));
    outer_space += inner / m;
  }
  out.group_inner.value = outer_group / static_cast<double>(budget);
  out.space_inner.value = outer_space / static_cast<double>(budget);
  return out;
}

/// True when every pair of values differs by at most the sum of their
/// half-widths.
inline bool agree_within_half_widths(const FubiniTriple<Estimate>& t) {
  const auto close = [](const Estimate& a, const Estimate& b) {
    return std::abs(a.value - b.value) <= a.half_width + b.half_width;
  };
  return close(t.direct, t.group_inner) && close(t.direct, t.space_inner) && close(t.group_inner, t.space_inner);
}

/// Convolution of measures on a group, i.e. the action of G on itself by
/// left translation: delta_g * delta_h = delta_{gh}.
template <class S>
FiniteMeasure<GroupIndex, S> convolve_group(const FiniteGroup& group, const FiniteMeasure<GroupIndex, S>& mu1,
                                            const FiniteMeasure<GroupIndex, S>& mu2) {
  return convolve(LeftTranslation(group), mu1, mu2);
}

template <class S>
FiniteMeasure<double, S> convolve_group(const CircleRotation& circle, const FiniteMeasure<double, S>& mu1,
                                        const FiniteMeasure<double, S>& mu2) {
  return convolve(circle, mu1, mu2);
}

}  // namespace mconv
