#pragma once

#include "mconv/measures.hpp"
#include "mconv/product_convolution.hpp"

#include <boost/integer/common_factor.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace mconv {

/// Smallest n such that the mean of n i.i.d. draws of each of k functions,
/// every one ranging over an interval of width `range_width`, is within
/// `slack` of its expectation for all k simultaneously with probability at
/// least 1 - delta (Hoeffding plus a union bound):
///   n = ceil(range_width^2 * ln(2k / delta) / (2 slack^2)).
/// A zero-width range needs a single draw.
std::uint64_t hoeffding_samples(double slack, double delta, std::size_t constraints, double range_width);

/// The same bound solved for the slack: the deviation guaranteed at n draws.
double hoeffding_slack(std::uint64_t n, double delta, std::size_t constraints, double range_width);

/// n i.i.d. draws g_1, ..., g_n from the stream `key`.
template <class G>
std::vector<G> draw_elements(const SampledMeasure<G>& mu, std::uint64_t n, StreamKey key) {
  std::vector<G> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(mu.sample(key, i));
  return out;
}

/// Av(g_1, ..., g_n) for g_i drawn i.i.d. from mu.
template <class S, class G>
FiniteMeasure<G, S> empirical_average(const SampledMeasure<G>& mu, std::uint64_t n, StreamKey key) {
  if (n == 0) throw std::invalid_argument("empirical average needs at least one draw");
  return average_of_points<S>(draw_elements(mu, n, key));
}

template <class S, class G, class T>
FiniteMeasure<G, S> empirical_average(const FiniteMeasure<G, T>& mu, std::uint64_t n, StreamKey key) {
  return empirical_average<S>(as_sampled(mu), n, key);
}

/// A list whose uniform average is exactly mu: each g repeated mu(g) * L
/// times, L the least common multiple of the weight denominators.
template <class G>
std::vector<G> exact_average_points(const FiniteMeasure<G, Rational>& mu) {
  using boost::multiprecision::cpp_int;
  cpp_int lcm = 1;
  for (const auto& [g, w] : mu.atoms()) lcm = boost::integer::lcm(lcm, cpp_int(boost::multiprecision::denominator(w)));
  std::vector<G> out;
  for (const auto& [g, w] : mu.atoms()) {
    const cpp_int count = boost::multiprecision::numerator(w) * (lcm / boost::multiprecision::denominator(w));
    for (cpp_int c = 0; c < count; ++c) out.push_back(g);
  }
  return out;
}

/// Constraint lower < int f d(mu * pinned) < upper, one factor of the
/// neighborhood O of the map nu -> mu * nu.
template <class X, class S>
struct PinnedConstraint {
  FiniteMeasure<X, S> pinned;
  TestFunction<X, S> function;
  S lower;
  S upper;
};

template <ActionSystem Sys, class S>
struct ApproximationRequest {
  using G = typename Sys::element_type;
  using X = typename Sys::point_type;

  Sys system;
  std::variant<FiniteMeasure<G, S>, SampledMeasure<G>> target;
  std::vector<PinnedConstraint<X, S>> constraints;
  double slack = 0.05;
  double failure_probability = kDefaultDelta;
  int max_retries = 3;
  /// Draws used to estimate int H_i dmu when the target is sampled and has
  /// no quadrature.
  std::uint64_t reference_budget = 1u << 20;
};

enum class ApproximationStatus { inside, statistical_failure, unsolvable };

std::string to_string(ApproximationStatus s);

struct ConstraintRecord {
  std::size_t id = 0;
  double lower = 0.0;
  double upper = 0.0;
  /// int f d(mu * pinned) for the target mu.
  double target = 0.0;
  /// int f d(Av(g) * pinned), computed by convolution.
  double achieved = 0.0;
  /// |achieved - (1/n) sum_j H(g_j)|; exactly 0 in exact mode.
  double transfer_gap = 0.0;
  /// Deviation guaranteed at n draws with probability 1 - delta.
  double half_width = 0.0;
  bool inside = false;
};

struct ApproximationReport {
  ApproximationStatus status = ApproximationStatus::unsolvable;
  std::string reason;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int attempts = 0;
  bool target_exact = true;
  double target_half_width = 0.0;
  /// Records of the final attempt (or of the targets alone when unsolvable).
  std::vector<ConstraintRecord> records;
  /// Membership verdict of every attempt, in order.
  std::vector<bool> attempt_verdicts;
};

template <class G>
struct ApproximationResult {
  std::vector<G> elements;
  ApproximationReport report;
};

namespace detail {

template <ActionSystem Sys, class S>
S pinned_h(const Sys& sys, const PinnedConstraint<typename Sys::point_type, S>& c,
           const typename Sys::element_type& g) {
  S total(0);
  for (const auto& [x, w] : c.pinned.atoms()) total += w * checked_value(c.function, sys.act(g, x));
  return total;
}

}  // namespace detail

/// Replaces mu by an empirical average Av(g_1, ..., g_n) whose convolution
/// action stays in the neighborhood O:
///   H_i(g) = int f_i(g.x) dnu_i(x),  target_i = int H_i dmu,
///   n = hoeffding_samples(slack, delta, k, max_i 2 B_i).
/// Attempt a draws from stream (seed, a); up to max_retries further attempts
/// follow a failed membership test.
template <ActionSystem Sys, class S>
ApproximationResult<typename Sys::element_type> approximate_action(const ApproximationRequest<Sys, S>& req,
                                                                   std::uint64_t seed) {
  using G = typename Sys::element_type;
  if (!(req.slack > 0.0)) throw std::invalid_argument("slack must be positive");
  if (!(req.failure_probability > 0.0 && req.failure_probability < 1.0))
    throw std::invalid_argument("failure probability must lie in (0, 1)");
  if (req.constraints.empty()) throw std::invalid_argument("approximation request has no constraints");
  if (req.max_retries < 0) throw std::invalid_argument("retry limit must be non-negative");

  const std::size_t k = req.constraints.size();
  ApproximationResult<G> result;
  auto& report = result.report;
  report.seed = seed;
  report.records.resize(k);

  double width = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& c = req.constraints[i];
    if (!(c.lower < c.upper)) throw std::invalid_argument("constraint has lower >= upper");
    width = std::max(width, 2.0 * to_double(c.function.bound));
    report.records[i].id = i;
    report.records[i].lower = to_double(c.lower);
    report.records[i].upper = to_double(c.upper);
  }

  // Targets int H_i dmu.
  for (std::size_t i = 0; i < k; ++i) {
    const auto& c = req.constraints[i];
    double t = 0.0;
    if (const auto* finite = std::get_if<FiniteMeasure<G, S>>(&req.target)) {
      S total(0);
      for (const auto& [g, w] : finite->atoms()) total += w * detail::pinned_h(req.system, c, g);
      t = to_double(total);
    } else {
      const auto& sampled = std::get<SampledMeasure<G>>(req.target);
      auto h = [&](const G& g) { return to_double(detail::pinned_h(req.system, c, g)); };
      if (sampled.has_quadrature()) {
        t = sampled.quadrature()(h);
      } else {
        report.target_exact = false;
        const StreamKey ref_key = StreamKey{seed, 0}.child(0xC0FFEE + i);
        double sum = 0.0;
        for (std::uint64_t j = 0; j < req.reference_budget; ++j) sum += h(sampled.sample(ref_key, j));
        t = sum / static_cast<double>(req.reference_budget);
        report.target_half_width = std::max(
            report.target_half_width,
            hoeffding_half_width(2.0 * to_double(c.function.bound), req.reference_budget, req.failure_probability));
      }
    }
    report.records[i].target = t;
  }

  for (const auto& rec : report.records) {
    const double lo = rec.target - report.target_half_width;
    const double hi = rec.target + report.target_half_width;
    if (!(rec.lower + req.slack < lo && hi < rec.upper - req.slack)) {
      report.status = ApproximationStatus::unsolvable;
      report.reason = "constraint " + std::to_string(rec.id) + ": target " + format_double(rec.target) +
                      " is not inside (lower + slack, upper - slack)";
      return result;
    }
  }

  const std::uint64_t n = hoeffding_samples(req.slack, req.failure_probability, k, width);
  report.samples = n;
  const SampledMeasure<G> sampler = std::visit(
      [](const auto& m) -> SampledMeasure<G> {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, SampledMeasure<G>>) {
          return m;
        } else {
          return as_sampled(m);
        }
      },
      req.target);

  for (int attempt = 0; attempt <= req.max_retries; ++attempt) {
    report.attempts = attempt + 1;
    result.elements = draw_elements(sampler, n, StreamKey{seed, static_cast<std::uint64_t>(attempt)});
    const auto av = average_of_points<S>(result.elements);
    bool all_inside = true;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& c = req.constraints[i];
      auto& rec = report.records[i];
      const S achieved = integrate(c.function, convolve(req.system, av, c.pinned));
      S h_sum(0);
      for (const G& g : result.elements) h_sum += detail::pinned_h(req.system, c, g);
      S h_mean = h_sum / S(static_cast<std::int64_t>(n));
      rec.achieved = to_double(achieved);
      rec.transfer_gap = to_double(abs_value(S(achieved - h_mean)));
      rec.half_width = hoeffding_slack(n, req.failure_probability, k, width);
      rec.inside = c.lower < achieved && achieved < c.upper;
      all_inside = all_inside && rec.inside;
    }
    report.attempt_verdicts.push_back(all_inside);
    if (all_inside) {
      report.status = ApproximationStatus::inside;
      return result;
    }
  }
  report.status = ApproximationStatus::statistical_failure;
  report.reason = "membership failed in all " + std::to_string(report.attempts) + " attempts";
  return result;
}

}  // namespace mconv
