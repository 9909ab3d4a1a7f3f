#pragma once

#include "mconv/measures.hpp"
#include "mconv/product_convolution.hpp"

#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace mconv {

/// One strict constraint lower < int f dnu < upper.
template <class P, class S>
struct WeakConstraint {
  TestFunction<P, S> function;
  S lower;
  S upper;
};

/// Basic weak-open set: the intersection of finitely many constraints.
template <class P, class S>
class WeakNeighborhood {
 public:
  explicit WeakNeighborhood(std::vector<WeakConstraint<P, S>> constraints) : constraints_(std::move(constraints)) {
    for (const auto& c : constraints_)
      if (!(c.lower < c.upper))
        throw std::invalid_argument("constraint on '" + c.function.label + "' has lower >= upper");
  }

  const std::vector<WeakConstraint<P, S>>& constraints() const { return constraints_; }
  std::size_t size() const { return constraints_.size(); }

 private:
  std::vector<WeakConstraint<P, S>> constraints_;
};

enum class Membership { inside, outside, undecided };

/// `margin` is the worst signed clearance over all constraints: the distance
/// from the value (less its half-width, in sampled mode) to the nearer bound.
/// Negative or zero margins mean some bound was not cleared.
struct MembershipResult {
  Membership verdict = Membership::outside;
  double margin = 0.0;
};

/// Exact strict-inequality test; a value on a bound is outside.
template <class P, class S>
MembershipResult member(const FiniteMeasure<P, S>& nu, const WeakNeighborhood<P, S>& n) {
  bool inside = true;
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& c : n.constraints()) {
    const S v = integrate(c.function, nu);
    if (!(c.lower < v && v < c.upper)) inside = false;
    const S clearance = std::min(S(v - c.lower), S(c.upper - v));
    margin = std::min(margin, to_double(clearance));
  }
  return {inside ? Membership::inside : Membership::outside, margin};
}

/// Monte Carlo test: inside when every estimate clears both bounds by its
/// half-width, outside when some estimate clears a bound from the wrong side,
/// undecided otherwise.
template <class P>
MembershipResult member(const SampledMeasure<P>& nu, const WeakNeighborhood<P, double>& n, std::uint64_t budget,
                        StreamKey key = {}, double delta = kDefaultDelta) {
  bool all_inside = true;
  bool any_outside = false;
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& c : n.constraints()) {
    const Estimate e = integrate(c.function, nu, budget, key, delta);
    const double lo = e.value - e.half_width;
    const double hi = e.value + e.half_width;
    if (!(c.lower < lo && hi < c.upper)) all_inside = false;
    if (hi <= c.lower || lo >= c.upper) any_outside = true;
    margin = std::min(margin, std::min(e.value - c.lower, c.upper - e.value) - e.half_width);
  }
  if (all_inside) return {Membership::inside, margin};
  return {any_outside ? Membership::outside : Membership::undecided, margin};
}

/// max_i |f_i(x) - f_i(y)|; zero exactly when no test function separates x
/// from y.
template <class P, class S>
S dirac_embedding_check(const P& x, const P& y, const std::vector<TestFunction<P, S>>& tests) {
  S worst(0);
  for (const auto& f : tests) worst = std::max(worst, abs_value(S(checked_value(f, x) - checked_value(f, y))));
  return worst;
}

/// Pulls N back along nu -> mu * nu: constraint i becomes
///   lower_i < int H_i dnu' < upper_i,  H_i(x) = int f_i(g.x) dmu(g),
/// so that int H_i dnu' = int f_i d(mu * nu') for every nu'.
template <ActionSystem Sys, class S>
WeakNeighborhood<typename Sys::point_type, S> pull_back_neighborhood(
    const Sys& sys, const FiniteMeasure<typename Sys::element_type, S>& mu,
    const WeakNeighborhood<typename Sys::point_type, S>& n) {
  using X = typename Sys::point_type;
  std::vector<WeakConstraint<X, S>> pulled;
  for (const auto& c : n.constraints()) {
    auto h = [sys, mu, f = c.function](const X& x) {
      S total(0);
      for (const auto& [g, a] : mu.atoms()) total += a * checked_value(f, sys.act(g, x));
      return total;
    };
    // |H| <= B since mu is a probability; float sums can overshoot by rounding
    S bound = c.function.bound;
    if constexpr (!is_exact_v<S>) bound *= 1.0 + 1e-12;
    pulled.push_back({TestFunction<X, S>{h, bound, "pullback(" + c.function.label + ")"}, c.lower, c.upper});
  }
  return WeakNeighborhood<X, S>(std::move(pulled));
}

/// Sampled mu: H_i averages over one frozen sample of `budget` group elements
/// shared by every evaluation point, so each H_i is a fixed function.
template <ActionSystem Sys>
WeakNeighborhood<typename Sys::point_type, double> pull_back_neighborhood(
    const Sys& sys, const SampledMeasure<typename Sys::element_type>& mu,
    const WeakNeighborhood<typename Sys::point_type, double>& n, std::uint64_t budget, StreamKey key = {}) {
  if (budget == 0) throw std::invalid_argument("pull-back along a sampled measure needs a positive budget");
  using G = typename Sys::element_type;
  std::vector<G> frozen;
  frozen.reserve(budget);
  for (std::uint64_t i = 0; i < budget; ++i) frozen.push_back(mu.sample(key, i));
  return pull_back_neighborhood(sys, average_of_points<double>(frozen), n);
}

}  // namespace mconv
