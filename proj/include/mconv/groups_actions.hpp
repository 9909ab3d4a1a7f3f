#pragma once

#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mconv {

/// Tagged element index, so group elements and space points of a finite
/// system can never be mixed up.
template <class Tag>
struct Index {
  std::uint32_t value = 0;
  friend auto operator<=>(const Index&, const Index&) = default;
};

using GroupIndex = Index<struct GroupTag>;
using PointIndex = Index<struct PointTag>;

/// Subset of {0, ..., n-1}, stored as a bitmask.
template <class I>
class IndexSubset {
 public:
  explicit IndexSubset(std::size_t universe) : bits_(universe, false) {}

  static IndexSubset full(std::size_t universe) {
    IndexSubset s(universe);
    s.bits_.assign(universe, true);
    return s;
  }
  static IndexSubset of(std::size_t universe, const std::vector<I>& members) {
    IndexSubset s(universe);
    for (const I& m : members) s.insert(m);
    return s;
  }
  /// Bit i of `mask` selects element i; universe must be at most 64.
  static IndexSubset from_mask(std::size_t universe, std::uint64_t mask) {
    IndexSubset s(universe);
    for (std::size_t i = 0; i < universe; ++i) s.bits_[i] = ((mask >> i) & 1u) != 0;
    return s;
  }

  std::size_t universe_size() const { return bits_.size(); }
  bool contains(I i) const { return i.value < bits_.size() && bits_[i.value]; }
  void insert(I i) {
    check(i);
    bits_[i.value] = true;
  }
  std::size_t size() const {
    std::size_t n = 0;
    for (bool b : bits_) n += b ? 1 : 0;
    return n;
  }
  std::vector<I> members() const {
    std::vector<I> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(I{static_cast<std::uint32_t>(i)});
    return out;
  }

  friend bool operator==(const IndexSubset&, const IndexSubset&) = default;

 private:
  void check(I i) const;
  std::vector<bool> bits_;
};

using PointSubset = IndexSubset<PointIndex>;
using GroupSubset = IndexSubset<GroupIndex>;

/// Finite union of half-open arcs [begin, end) of the circle R/Z, in turns.
/// Stored normalized: sorted, pairwise disjoint, non-adjacent, inside [0, 1].
class ArcUnion {
 public:
  struct Arc {
    double begin = 0.0;
    double end = 0.0;
    friend bool operator==(const Arc&, const Arc&) = default;
  };

  ArcUnion() = default;
  /// Arcs with begin > end wrap through 0; an arc of length >= 1 is the whole
  /// circle. Endpoints are reduced mod 1 first.
  explicit ArcUnion(const std::vector<Arc>& arcs);

  static ArcUnion whole() { return ArcUnion({Arc{0.0, 1.0}}); }

  const std::vector<Arc>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  bool contains(double t) const;
  /// Lebesgue (Haar) measure of the set.
  double length() const;
  /// The set {t + shift mod 1 : t in *this}.
  ArcUnion shifted(double shift) const;

  friend bool operator==(const ArcUnion&, const ArcUnion&) = default;

 private:
  std::vector<Arc> arcs_;
};

/// Reduce a real number into [0, 1).
double wrap_turns(double t);

/// Finite group given by its Cayley table. Validated on construction.
class FiniteGroup {
 public:
  /// `table[g * order + h]` is the index of g*h. Throws std::invalid_argument
  /// if the table is not a group table with the given identity; the
  /// associativity scan is exhaustive and limited to order <= 256.
  FiniteGroup(std::size_t order, std::vector<std::uint32_t> table, std::uint32_t identity);

  std::size_t order() const { return order_; }
  GroupIndex identity() const { return identity_; }
  GroupIndex multiply(GroupIndex g, GroupIndex h) const;
  GroupIndex inverse(GroupIndex g) const;
  std::vector<GroupIndex> elements() const;
  bool valid(GroupIndex g) const { return g.value < order_; }

  static constexpr std::size_t kMaxOrder = 256;

 private:
  std::size_t order_;
  GroupIndex identity_;
  std::shared_ptr<const std::vector<std::uint32_t>> table_;
  std::shared_ptr<const std::vector<std::uint32_t>> inverse_;
};

/// Finite group acting on {0, ..., m-1} through an action table.
class FiniteActionSystem {
 public:
  using element_type = GroupIndex;
  using point_type = PointIndex;
  using point_set = PointSubset;
  using element_set = GroupSubset;

  /// `action[g * points + x]` is g.x. Throws std::invalid_argument if a row is
  /// not a bijection or either action axiom fails (checked exhaustively).
  FiniteActionSystem(FiniteGroup group, std::size_t points, std::vector<std::uint32_t> action,
                     std::string name = {});

  const FiniteGroup& group() const { return group_; }
  const std::string& name() const { return name_; }
  std::size_t point_count() const { return points_; }
  std::size_t group_order() const { return group_.order(); }

  PointIndex act(GroupIndex g, PointIndex x) const;
  GroupIndex identity() const { return group_.identity(); }
  GroupIndex multiply(GroupIndex g, GroupIndex h) const { return group_.multiply(g, h); }
  GroupIndex inverse(GroupIndex g) const { return group_.inverse(g); }

  std::vector<GroupIndex> elements() const { return group_.elements(); }
  std::vector<PointIndex> points() const;
  PointSubset whole_space() const { return PointSubset::full(points_); }
  GroupSubset whole_group() const { return GroupSubset::full(group_.order()); }

  /// g^{-1}E = {x : g.x in E}.
  PointSubset preimage(GroupIndex g, const PointSubset& e) const;
  /// E:x = {g : g.x in E}.
  GroupSubset section(const PointSubset& e, PointIndex x) const;

 private:
  FiniteGroup group_;
  std::size_t points_;
  std::shared_ptr<const std::vector<std::uint32_t>> action_;
  std::string name_;
};

/// A finite group acting on itself by left translation, g.h = gh.
class LeftTranslation {
 public:
  using element_type = GroupIndex;
  using point_type = GroupIndex;
  using point_set = GroupSubset;
  using element_set = GroupSubset;

  explicit LeftTranslation(FiniteGroup group) : group_(std::move(group)) {}

  const FiniteGroup& group() const { return group_; }
  std::size_t point_count() const { return group_.order(); }
  GroupIndex act(GroupIndex g, GroupIndex h) const { return group_.multiply(g, h); }
  GroupIndex identity() const { return group_.identity(); }
  GroupIndex multiply(GroupIndex g, GroupIndex h) const { return group_.multiply(g, h); }
  GroupIndex inverse(GroupIndex g) const { return group_.inverse(g); }
  std::vector<GroupIndex> elements() const { return group_.elements(); }
  std::vector<GroupIndex> points() const { return group_.elements(); }
  GroupSubset whole_space() const { return GroupSubset::full(group_.order()); }
  GroupSubset whole_group() const { return GroupSubset::full(group_.order()); }
  GroupSubset preimage(GroupIndex g, const GroupSubset& e) const;
  GroupSubset section(const GroupSubset& e, GroupIndex x) const;

 private:
  FiniteGroup group_;
};

/// The circle group R/Z acting on the circle by rotation. Elements and points
/// are reals in [0, 1) measured in turns.
class CircleRotation {
 public:
  using element_type = double;
  using point_type = double;
  using point_set = ArcUnion;
  using element_set = ArcUnion;

  double act(double g, double x) const;
  double identity() const { return 0.0; }
  double multiply(double g, double h) const { return act(g, h); }
  double inverse(double g) const;
  ArcUnion whole_space() const { return ArcUnion::whole(); }
  ArcUnion whole_group() const { return ArcUnion::whole(); }
  ArcUnion preimage(double g, const ArcUnion& e) const;
  ArcUnion section(const ArcUnion& e, double x) const;
};

template <class Sys>
concept ActionSystem = requires(const Sys& sys, const typename Sys::element_type& g,
                                const typename Sys::point_type& x,
                                const typename Sys::point_set& e) {
  { sys.act(g, x) } -> std::same_as<typename Sys::point_type>;
  { sys.multiply(g, g) } -> std::same_as<typename Sys::element_type>;
  { sys.inverse(g) } -> std::same_as<typename Sys::element_type>;
  { sys.identity() } -> std::same_as<typename Sys::element_type>;
  { sys.preimage(g, e) } -> std::same_as<typename Sys::point_set>;
  { sys.section(e, x) } -> std::same_as<typename Sys::element_set>;
  { sys.whole_space() } -> std::same_as<typename Sys::point_set>;
};

/// Systems whose group and space are finite and enumerable.
template <class Sys>
concept FiniteSystem = ActionSystem<Sys> && requires(const Sys& sys) {
  { sys.elements() } -> std::same_as<std::vector<typename Sys::element_type>>;
  { sys.points() } -> std::same_as<std::vector<typename Sys::point_type>>;
  { sys.point_count() } -> std::convertible_to<std::size_t>;
};

template <ActionSystem Sys>
typename Sys::point_type act(const Sys& sys, const typename Sys::element_type& g,
                             const typename Sys::point_type& x) {
  return sys.act(g, x);
}

template <ActionSystem Sys>
typename Sys::point_set preimage_set(const Sys& sys, const typename Sys::element_type& g,
                                     const typename Sys::point_set& e) {
  return sys.preimage(g, e);
}

template <ActionSystem Sys>
typename Sys::element_set section_set(const Sys& sys, const typename Sys::point_set& e,
                                      const typename Sys::point_type& x) {
  return sys.section(e, x);
}

}  // namespace mconv
