#pragma once

#include "mconv/groups_actions.hpp"
#include "mconv/measures.hpp"
#include "mconv/product_convolution.hpp"
#include "mconv/rng.hpp"

#include <algorithm>
#include <vector>

namespace mconv {

/// Reproducible random instances for the property suites. Every call consumes
/// the next counters of one stream, so a fixed key replays the same sequence.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(StreamKey key) : key_(key) {}

  std::uint64_t below(std::uint64_t n) { return uniform_below(key_, counter_++, n); }
  double unit() { return uniform01(key_, counter_++); }

  /// Random support of 1..|universe| distinct points with integer weights in
  /// [1, max_weight], normalized.
  template <class S, class P>
  FiniteMeasure<P, S> measure(const std::vector<P>& universe, std::uint64_t max_weight = 12) {
    std::vector<P> pool = universe;
    const std::size_t size = 1 + below(pool.size());
    std::vector<std::pair<P, std::uint64_t>> picked;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = i + below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      const std::uint64_t w = 1 + below(max_weight);
      picked.emplace_back(pool[i], w);
      total += w;
    }
    std::vector<std::pair<P, S>> atoms;
    for (const auto& [p, w] : picked) {
      if constexpr (is_exact_v<S>) {
        atoms.emplace_back(p, Rational(static_cast<std::int64_t>(w), static_cast<std::int64_t>(total)));
      } else {
        atoms.emplace_back(p, static_cast<double>(w) / static_cast<double>(total));
      }
    }
    return FiniteMeasure<P, S>(std::move(atoms));
  }

  template <class I>
  IndexSubset<I> subset(std::size_t universe) {
    IndexSubset<I> s(universe);
    for (std::size_t i = 0; i < universe; ++i)
      if (below(2)) s.insert(I{static_cast<std::uint32_t>(i)});
    return s;
  }

  /// Function with values k/4, k in [-8, 8], on m points.
  template <class S>
  TestFunction<PointIndex, S> table_function(std::size_t m) {
    std::vector<S> values;
    S bound(0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto k = static_cast<std::int64_t>(below(17)) - 8;
      if constexpr (is_exact_v<S>) {
        values.emplace_back(Rational(k, 4));
      } else {
        values.push_back(static_cast<double>(k) / 4.0);
      }
      bound = std::max(bound, abs_value(values.back()));
    }
    return TestFunction<PointIndex, S>{[values](const PointIndex& x) { return values.at(x.value); }, bound, "random-table"};
  }

  template <class L, class R>
  PairSet<L, R> pair_set(const std::vector<L>& lefts, const std::vector<R>& rights) {
    std::vector<std::pair<L, R>> pairs;
    for (const L& l : lefts)
      for (const R& r : rights)
        if (below(2)) pairs.emplace_back(l, r);
    return PairSet<L, R>(std::move(pairs));
  }

  /// Union of 1..3 arcs with random endpoints.
  ArcUnion arcs() {
    std::vector<ArcUnion::Arc> out;
    const std::size_t count = 1 + below(3);
    for (std::size_t i = 0; i < count; ++i) {
      const double b = unit();
      out.push_back({b, b + 0.5 * unit()});
    }
    return ArcUnion(out);
  }

 private:
  StreamKey key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mconv
