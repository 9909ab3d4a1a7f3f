#include "mconv/ellis_finite.hpp"

#include "mconv/approximation.hpp"
#include "mconv/product_convolution.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace mconv {

namespace {

using Column = std::vector<Rational>;

TransitionMap translation_map(const FiniteActionSystem& sys, GroupIndex g) {
  TransitionMap map(sys.point_count());
  for (PointIndex x : sys.points()) map[x.value] = sys.act(g, x).value;
  return map;
}

// Row-reduces `rows` in place (each row: coefficients then optionally the
// right-hand side) over the first `cols` columns; returns the pivot columns.
std::vector<std::size_t> row_reduce(std::vector<Column>& rows, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    const Rational lead = rows[r][c];
    for (auto& v : rows[r]) v /= lead;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      const Rational factor = rows[i][c];
      for (std::size_t j = c; j < rows[i].size(); ++j) rows[i][j] -= factor * rows[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// System whose unknowns are the weights mu(g): one equation per matrix entry
// plus the normalization sum mu(g) = 1.
std::vector<Column> decomposition_system(const std::vector<StochasticMatrix>& generators, const StochasticMatrix* rhs) {
  const std::size_t m = generators.front().size();
  const std::size_t n = generators.size();
  std::vector<Column> rows;
  for (std::size_t y = 0; y < m; ++y)
    for (std::size_t x = 0; x < m; ++x) {
      Column row(n + (rhs ? 1 : 0));
      for (std::size_t g = 0; g < n; ++g) row[g] = generators[g].at(y, x);
      if (rhs) row[n] = rhs->at(y, x);
      rows.push_back(std::move(row));
    }
  Column norm(n + (rhs ? 1 : 0), Rational(1));
  rows.push_back(std::move(norm));
  return rows;
}

// Unique weights w with sum_g w_g P_g = target, when the generators are
// linearly independent and the system is consistent.
std::optional<Column> reconstruct_weights(const std::vector<StochasticMatrix>& generators,
                                          const StochasticMatrix& target) {
  auto rows = decomposition_system(generators, &target);
  const std::size_t n = generators.size();
  const auto pivots = row_reduce(rows, n);
  if (pivots.size() != n) return std::nullopt;
  for (std::size_t i = n; i < rows.size(); ++i)
    if (rows[i][n] != 0) return std::nullopt;
  Column w(n);
  for (std::size_t i = 0; i < n; ++i) w[pivots[i]] = rows[i][n];
  return w;
}

}  // namespace

std::vector<TransitionMap> enveloping_semigroup(const FiniteActionSystem& sys) {
  std::vector<TransitionMap> maps;
  for (GroupIndex g : sys.elements()) maps.push_back(translation_map(sys, g));
  std::sort(maps.begin(), maps.end());
  maps.erase(std::unique(maps.begin(), maps.end()), maps.end());
  return maps;
}

StochasticMatrix::StochasticMatrix(std::size_t m) : m_(m), entries_(m * m, Rational(0)) {
  if (m == 0) throw std::invalid_argument("stochastic matrix needs at least one row");
}

StochasticMatrix StochasticMatrix::identity(std::size_t m) {
  StochasticMatrix p(m);
  for (std::size_t i = 0; i < m; ++i) p.at(i, i) = 1;
  return p;
}

StochasticMatrix StochasticMatrix::from_map(const TransitionMap& map) {
  StochasticMatrix p(map.size());
  for (std::size_t x = 0; x < map.size(); ++x) {
    if (map[x] >= map.size()) throw std::out_of_range("transition map image out of range");
    p.at(map[x], x) = 1;
  }
  return p;
}

bool StochasticMatrix::is_column_stochastic() const {
  for (std::size_t x = 0; x < m_; ++x) {
    Rational sum = 0;
    for (std::size_t y = 0; y < m_; ++y) {
      if (at(y, x) < 0) return false;
      sum += at(y, x);
    }
    if (sum != 1) return false;
  }
  return true;
}

std::vector<Rational> StochasticMatrix::apply(const std::vector<Rational>& weights) const {
  if (weights.size() != m_) throw std::invalid_argument("weight vector has the wrong length");
  std::vector<Rational> out(m_, Rational(0));
  for (std::size_t y = 0; y < m_; ++y)
    for (std::size_t x = 0; x < m_; ++x) out[y] += at(y, x) * weights[x];
  return out;
}

StochasticMatrix StochasticMatrix::operator*(const StochasticMatrix& rhs) const {
  if (rhs.m_ != m_) throw std::invalid_argument("matrix sizes differ");
  StochasticMatrix out(m_);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t k = 0; k < m_; ++k) {
      if (at(i, k) == 0) continue;
      for (std::size_t j = 0; j < m_; ++j) out.at(i, j) += at(i, k) * rhs.at(k, j);
    }
  return out;
}

Rational StochasticMatrix::max_abs_difference(const StochasticMatrix& rhs) const {
  if (rhs.m_ != m_) throw std::invalid_argument("matrix sizes differ");
  Rational worst = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) worst = std::max(worst, abs_value(Rational(entries_[i] - rhs.entries_[i])));
  return worst;
}

std::vector<Rational> weight_vector(const ExactMeasure<PointIndex>& nu, std::size_t m) {
  std::vector<Rational> w(m, Rational(0));
  for (const auto& [x, a] : nu.atoms()) {
    if (x.value >= m) throw std::out_of_range("measure support outside the space");
    w[x.value] = a;
  }
  return w;
}

ExactMeasure<PointIndex> measure_from_weights(const std::vector<Rational>& weights) {
  std::vector<std::pair<PointIndex, Rational>> atoms;
  for (std::size_t i = 0; i < weights.size(); ++i) atoms.emplace_back(PointIndex{static_cast<std::uint32_t>(i)}, weights[i]);
  return ExactMeasure<PointIndex>(std::move(atoms));
}

StochasticMatrix measure_action_matrix(const FiniteActionSystem& sys, const ExactMeasure<GroupIndex>& mu) {
  StochasticMatrix p(sys.point_count());
  for (const auto& [g, w] : mu.atoms())
    for (PointIndex x : sys.points()) p.at(sys.act(g, x).value, x.value) += w;
  return p;
}

std::vector<ExactMeasure<GroupIndex>> simplex_grid(std::size_t order, std::uint32_t q) {
  if (order == 0) throw std::invalid_argument("simplex grid needs a nonempty group");
  if (q == 0) throw std::invalid_argument("grid denominator must be positive");
  std::vector<ExactMeasure<GroupIndex>> out;
  std::vector<std::uint32_t> counts(order, 0);
  // Enumerate compositions of q into `order` nonnegative parts.
  auto recurse = [&](auto&& self, std::size_t slot, std::uint32_t left) -> void {
    if (slot + 1 == order) {
      counts[slot] = left;
      std::vector<std::pair<GroupIndex, Rational>> atoms;
      for (std::size_t g = 0; g < order; ++g)
        atoms.emplace_back(GroupIndex{static_cast<std::uint32_t>(g)}, Rational(counts[g], q));
      out.emplace_back(std::move(atoms));
      return;
    }
    for (std::uint32_t c = 0; c <= left; ++c) {
      counts[slot] = c;
      self(self, slot + 1, left - c);
    }
  };
  recurse(recurse, 0, q);
  return out;
}

EllisReport ellis_equality_check(const FiniteActionSystem& sys, std::uint32_t grid_denominator, std::size_t max_order) {
  if (sys.group_order() > max_order)
    throw std::invalid_argument("group order " + std::to_string(sys.group_order()) + " exceeds the Ellis check bound " +
                                std::to_string(max_order));
  EllisReport report;
  report.system = sys.name();
  report.grid_denominator = grid_denominator;
  report.group_order = sys.group_order();
  report.semigroup_size = enveloping_semigroup(sys).size();

  std::vector<StochasticMatrix> generators;
  for (GroupIndex g : sys.elements()) generators.push_back(StochasticMatrix::from_map(translation_map(sys, g)));
  {
    auto rows = decomposition_system(generators, nullptr);
    report.injective = row_reduce(rows, generators.size()).size() == generators.size();
  }

  const std::size_t m = sys.point_count();
  for (const auto& mu : simplex_grid(sys.group_order(), grid_denominator)) {
    const StochasticMatrix p = measure_action_matrix(sys, mu);
    ++report.matrices_checked;
    report.stochastic = report.stochastic && p.is_column_stochastic();

    for (PointIndex x : sys.points()) {
      const auto image = weight_vector(convolve(sys, mu, dirac<Rational>(x)), m);
      for (std::size_t y = 0; y < m; ++y)
        if (image[y] != p.at(y, x.value)) report.agrees_with_convolution = false;
    }

    // conv(G) side: an explicit g-bar with Av(g-bar) = mu.
    const auto witness = exact_average_points(mu);
    StochasticMatrix q(m);
    const Rational share(1, static_cast<std::int64_t>(witness.size()));
    for (GroupIndex g : witness)
      for (PointIndex x : sys.points()) q.at(sys.act(g, x).value, x.value) += share;
    report.max_residual = std::max(report.max_residual, p.max_abs_difference(q));

    if (report.injective) {
      const auto w = reconstruct_weights(generators, p);
      if (!w) {
        report.max_residual = std::max(report.max_residual, Rational(1));
        continue;
      }
      ++report.reconstructed;
      for (GroupIndex g : sys.elements())
        report.max_residual = std::max(report.max_residual, abs_value(Rational((*w)[g.value] - mu.weight(g))));
    }
  }
  report.passed = report.stochastic && report.agrees_with_convolution && report.max_residual == 0;
  return report;
}

}  // namespace mconv
