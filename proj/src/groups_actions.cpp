#include "mconv/groups_actions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mconv {

template <class I>
void IndexSubset<I>::check(I i) const {
  if (i.value >= bits_.size())
    throw std::out_of_range("subset member " + std::to_string(i.value) + " outside universe of size " +
                            std::to_string(bits_.size()));
}

template class IndexSubset<GroupIndex>;
template class IndexSubset<PointIndex>;

double wrap_turns(double t) {
  if (!std::isfinite(t)) throw std::out_of_range("circle coordinate is not finite");
  double r = t - std::floor(t);
  // t slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

ArcUnion::ArcUnion(const std::vector<Arc>& arcs) {
  std::vector<Arc> pieces;
  for (const Arc& a : arcs) {
    if (!std::isfinite(a.begin) || !std::isfinite(a.end))
      throw std::invalid_argument("arc endpoint is not finite");
    double span = a.end - a.begin;
    if (a.begin <= a.end && span >= 1.0) {
      pieces = {Arc{0.0, 1.0}};
      break;
    }
    double b = wrap_turns(a.begin);
    double e = wrap_turns(a.end);
    if (a.begin <= a.end && span == 0.0) continue;
    if (b < e) {
      pieces.push_back({b, e});
    } else if (b > e) {
      pieces.push_back({b, 1.0});
      if (e > 0.0) pieces.push_back({0.0, e});
    } else {
      // Endpoints coincide mod 1 on a nonempty arc: the whole circle.
      pieces = {Arc{0.0, 1.0}};
      break;
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Arc& x, const Arc& y) { return x.begin < y.begin || (x.begin == y.begin && x.end < y.end); });
  for (const Arc& a : pieces) {
    if (!arcs_.empty() && a.begin <= arcs_.back().end) {
      arcs_.back().end = std::max(arcs_.back().end, a.end);
    } else {
      arcs_.push_back(a);
    }
  }
}

bool ArcUnion::contains(double t) const {
  const double x = wrap_turns(t);
  return std::any_of(arcs_.begin(), arcs_.end(), [x](const Arc& a) { return a.begin <= x && x < a.end; });
}

double ArcUnion::length() const {
  double total = 0.0;
  for (const Arc& a : arcs_) total += a.end - a.begin;
  return total;
}

ArcUnion ArcUnion::shifted(double shift) const {
  if (arcs_.size() == 1 && arcs_[0] == Arc{0.0, 1.0}) return *this;
  std::vector<Arc> moved;
  moved.reserve(arcs_.size());
  for (const Arc& a : arcs_) {
    // Keep the arc length exact: wrap only the start point.
    const double b = wrap_turns(a.begin + shift);
    moved.push_back({b, b + (a.end - a.begin)});
  }
  return ArcUnion(moved);
}

FiniteGroup::FiniteGroup(std::size_t order, std::vector<std::uint32_t> table, std::uint32_t identity)
    : order_(order), identity_{identity} {
  if (order == 0) throw std::invalid_argument("group order must be at least 1");
  if (order > kMaxOrder)
    throw std::invalid_argument("group order " + std::to_string(order) + " exceeds the validated maximum of " +
                                std::to_string(kMaxOrder));
  if (table.size() != order * order)
    throw std::invalid_argument("operation table has " + std::to_string(table.size()) + " entries, expected " +
                                std::to_string(order * order));
  if (identity >= order) throw std::invalid_argument("identity index out of range");
  for (std::uint32_t v : table)
    if (v >= order) throw std::invalid_argument("operation table entry " + std::to_string(v) + " out of range");

  auto at = [&](std::size_t g, std::size_t h) { return table[g * order + h]; };
  for (std::size_t g = 0; g < order; ++g) {
    if (at(identity, g) != g || at(g, identity) != g)
      throw std::invalid_argument("element " + std::to_string(identity) + " is not a two-sided identity (fails at " +
                                  std::to_string(g) + ")");
  }
  std::vector<std::uint32_t> inv(order, static_cast<std::uint32_t>(order));
  for (std::size_t g = 0; g < order; ++g) {
    for (std::size_t h = 0; h < order; ++h) {
      if (at(g, h) == identity && at(h, g) == identity) {
        inv[g] = static_cast<std::uint32_t>(h);
        break;
      }
    }
    if (inv[g] == order) throw std::invalid_argument("element " + std::to_string(g) + " has no inverse");
  }
  for (std::size_t a = 0; a < order; ++a)
    for (std::size_t b = 0; b < order; ++b) {
      const std::size_t ab = at(a, b);
      for (std::size_t c = 0; c < order; ++c) {
        if (at(ab, c) != at(a, at(b, c)))
          throw std::invalid_argument("operation table is not associative at (" + std::to_string(a) + ", " +
                                      std::to_string(b) + ", " + std::to_string(c) + ")");
      }
    }
  table_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(table));
  inverse_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(inv));
}

GroupIndex FiniteGroup::multiply(GroupIndex g, GroupIndex h) const {
  if (!valid(g) || !valid(h)) throw std::out_of_range("group element index out of range");
  return GroupIndex{(*table_)[g.value * order_ + h.value]};
}

GroupIndex FiniteGroup::inverse(GroupIndex g) const {
  if (!valid(g)) throw std::out_of_range("group element index out of range");
  return GroupIndex{(*inverse_)[g.value]};
}

std::vector<GroupIndex> FiniteGroup::elements() const {
  std::vector<GroupIndex> out(order_);
  for (std::size_t i = 0; i < order_; ++i) out[i] = GroupIndex{static_cast<std::uint32_t>(i)};
  return out;
}

FiniteActionSystem::FiniteActionSystem(FiniteGroup group, std::size_t points, std::vector<std::uint32_t> action,
                                       std::string name)
    : group_(std::move(group)), points_(points), name_(std::move(name)) {
  if (points == 0) throw std::invalid_argument("space must have at least one point");
  const std::size_t n = group_.order();
  if (action.size() != n * points)
    throw std::invalid_argument("action table has " + std::to_string(action.size()) + " entries, expected " +
                                std::to_string(n * points));
  for (std::size_t g = 0; g < n; ++g) {
    std::vector<bool> hit(points, false);
    for (std::size_t x = 0; x < points; ++x) {
      const std::uint32_t y = action[g * points + x];
      if (y >= points) throw std::invalid_argument("action table entry " + std::to_string(y) + " out of range");
      if (hit[y])
        throw std::invalid_argument("action row " + std::to_string(g) + " is not a bijection (point " +
                                    std::to_string(y) + " hit twice)");
      hit[y] = true;
    }
  }
  const std::size_t e = group_.identity().value;
  for (std::size_t x = 0; x < points; ++x)
    if (action[e * points + x] != x)
      throw std::invalid_argument("identity does not fix point " + std::to_string(x));
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      const std::size_t gh =
          group_.multiply(GroupIndex{static_cast<std::uint32_t>(g)}, GroupIndex{static_cast<std::uint32_t>(h)}).value;
      for (std::size_t x = 0; x < points; ++x) {
        if (action[gh * points + x] != action[g * points + action[h * points + x]])
          throw std::invalid_argument("action is not compatible with the group law at (" + std::to_string(g) + ", " +
                                      std::to_string(h) + ", " + std::to_string(x) + ")");
      }
    }
  action_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(action));
}

PointIndex FiniteActionSystem::act(GroupIndex g, PointIndex x) const {
  if (!group_.valid(g)) throw std::out_of_range("group element index " + std::to_string(g.value) + " out of range");
  if (x.value >= points_) throw std::out_of_range("point index " + std::to_string(x.value) + " out of range");
  return PointIndex{(*action_)[g.value * points_ + x.value]};
}

std::vector<PointIndex> FiniteActionSystem::points() const {
  std::vector<PointIndex> out(points_);
  for (std::size_t i = 0; i < points_; ++i) out[i] = PointIndex{static_cast<std::uint32_t>(i)};
  return out;
}

PointSubset FiniteActionSystem::preimage(GroupIndex g, const PointSubset& e) const {
  if (e.universe_size() != points_) throw std::invalid_argument("subset is not over this system's space");
  PointSubset out(points_);
  for (PointIndex x : points())
    if (e.contains(act(g, x))) out.insert(x);
  return out;
}

GroupSubset FiniteActionSystem::section(const PointSubset& e, PointIndex x) const {
  if (e.universe_size() != points_) throw std::invalid_argument("subset is not over this system's space");
  GroupSubset out(group_.order());
  for (GroupIndex g : elements())
    if (e.contains(act(g, x))) out.insert(g);
  return out;
}

GroupSubset LeftTranslation::preimage(GroupIndex g, const GroupSubset& e) const {
  if (e.universe_size() != group_.order()) throw std::invalid_argument("subset is not over this group");
  GroupSubset out(group_.order());
  for (GroupIndex h : elements())
    if (e.contains(act(g, h))) out.insert(h);
  return out;
}

GroupSubset LeftTranslation::section(const GroupSubset& e, GroupIndex x) const {
  if (e.universe_size() != group_.order()) throw std::invalid_argument("subset is not over this group");
  GroupSubset out(group_.order());
  for (GroupIndex g : elements())
    if (e.contains(act(g, x))) out.insert(g);
  return out;
}

namespace {
void check_turns(double t, const char* what) {
  if (!std::isfinite(t) || t < 0.0 || t >= 1.0)
    throw std::out_of_range(std::string(what) + " must lie in [0, 1)");
}
}  // namespace

double CircleRotation::act(double g, double x) const {
  check_turns(g, "rotation angle");
  check_turns(x, "circle point");
  return wrap_turns(g + x);
}

double CircleRotation::inverse(double g) const {
  check_turns(g, "rotation angle");
  return wrap_turns(-g);
}

ArcUnion CircleRotation::preimage(double g, const ArcUnion& e) const {
  check_turns(g, "rotation angle");
  return e.shifted(-g);
}

ArcUnion CircleRotation::section(const ArcUnion& e, double x) const {
  check_turns(x, "circle point");
  return e.shifted(-x);
}

}  // namespace mconv
