#pragma once

#include "mconv/groups_actions.hpp"
#include "mconv/measures.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mconv {

/// Total map X -> X on a finite space, as the vector of images.
using TransitionMap = std::vector<std::uint32_t>;

/// The translation maps {x -> g.x : g in G}, sorted and deduplicated. For a
/// finite acting group this set is already closed, so it is the whole
/// enveloping semigroup.
std::vector<TransitionMap> enveloping_semigroup(const FiniteActionSystem& sys);

/// Exact m x m column-stochastic matrix. Entry (y, x) is the mass sent from
/// x to y, so column x is the image of delta_x and P * w(nu) = w(mu * nu).
class StochasticMatrix {
 public:
  explicit StochasticMatrix(std::size_t m);

  static StochasticMatrix identity(std::size_t m);
  static StochasticMatrix from_map(const TransitionMap& map);

  std::size_t size() const { return m_; }
  const Rational& at(std::size_t row, std::size_t col) const { return entries_[row * m_ + col]; }
  Rational& at(std::size_t row, std::size_t col) { return entries_[row * m_ + col]; }

  /// Every column nonnegative and summing to exactly 1.
  bool is_column_stochastic() const;

  std::vector<Rational> apply(const std::vector<Rational>& weights) const;
  StochasticMatrix operator*(const StochasticMatrix& rhs) const;
  /// Largest absolute entrywise difference.
  Rational max_abs_difference(const StochasticMatrix& rhs) const;

  friend bool operator==(const StochasticMatrix&, const StochasticMatrix&) = default;

 private:
  std::size_t m_;
  std::vector<Rational> entries_;
};

/// Dense weight vector of a measure on {0, ..., m-1}.
std::vector<Rational> weight_vector(const ExactMeasure<PointIndex>& nu, std::size_t m);
ExactMeasure<PointIndex> measure_from_weights(const std::vector<Rational>& weights);

/// P(mu) = sum_g mu(g) P_g with P_g the permutation matrix of x -> g.x.
StochasticMatrix measure_action_matrix(const FiniteActionSystem& sys, const ExactMeasure<GroupIndex>& mu);

/// All measures on {0, ..., order-1} whose weights are multiples of 1/q.
std::vector<ExactMeasure<GroupIndex>> simplex_grid(std::size_t order, std::uint32_t q);

struct EllisReport {
  std::string system;
  std::uint32_t grid_denominator = 0;
  std::size_t group_order = 0;
  std::size_t semigroup_size = 0;
  std::size_t matrices_checked = 0;
  /// True when mu -> P(mu) is injective, so weights are reconstructed from
  /// the matrix alone; otherwise the decomposition uses the Av witness only.
  bool injective = false;
  std::size_t reconstructed = 0;
  /// Largest entrywise residual over all checks; exactly 0 on success.
  Rational max_residual = 0;
  bool stochastic = true;
  bool agrees_with_convolution = true;
  bool passed = false;
};

/// For every grid measure mu on G, checks that P(mu) is column-stochastic,
/// agrees with the convolution module on vertex Diracs, and decomposes
/// exactly over {P_g}: once through a witness g-bar with Av(g-bar) = mu, and,
/// when the linear map mu -> P(mu) is injective, by recovering mu from P(mu)
/// through exact elimination. Throws if the group order exceeds max_order.
EllisReport ellis_equality_check(const FiniteActionSystem& sys, std::uint32_t grid_denominator,
                                 std::size_t max_order = 16);

}  // namespace mconv
