#include "mconv/catalog.hpp"
#include "mconv/groups_actions.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace mconv;

namespace {
const PointIndex a{0}, b{1};
const GroupIndex g0{0}, g1{1};
}  // namespace

TEST(Catalog, BuiltinsMatchHandWrittenPermutations) {
  for (const auto& ref : oracle::builtin_systems()) {
    SCOPED_TRACE(ref.name);
    const auto sys = builtin_finite_system(ref.name);
    ASSERT_EQ(sys.group_order(), ref.perms.size());
    ASSERT_EQ(sys.point_count(), ref.perms[0].size());
    for (std::uint32_t g = 0; g < ref.perms.size(); ++g) {
      for (std::uint32_t x = 0; x < ref.perms[0].size(); ++x) EXPECT_EQ(sys.act(GroupIndex{g}, PointIndex{x}).value, ref.perms[g][x]);
      for (std::uint32_t h = 0; h < ref.perms.size(); ++h)
        EXPECT_EQ(sys.multiply(GroupIndex{g}, GroupIndex{h}).value, oracle::compose(ref, g, h));
    }
  }
  EXPECT_THROW(builtin_finite_system("no-such-system"), std::invalid_argument);
}

TEST(Swap, ActPreimageSection) {
  const auto sys = builtin_finite_system("z2-swap");
  EXPECT_EQ(sys.act(g1, a), b);
  EXPECT_EQ(sys.act(sys.identity(), a), a);
  const auto e = PointSubset::of(2, {a});
  EXPECT_EQ(sys.preimage(g1, e), PointSubset::of(2, {b}));
  EXPECT_EQ(sys.section(e, a), GroupSubset::of(2, {g0}));
  EXPECT_EQ(sys.section(e, b), GroupSubset::of(2, {g1}));
  EXPECT_EQ(sys.section(sys.whole_space(), a), sys.whole_group());
  for (GroupIndex g : sys.elements()) EXPECT_EQ(sys.preimage(g, sys.whole_space()), sys.whole_space());
}

TEST(FiniteAxioms, IdentityAndCompatibilityEverywhere) {
  for (const auto& name : builtin_finite_names()) {
    const auto sys = builtin_finite_system(name);
    for (GroupIndex g : sys.elements()) {
      EXPECT_EQ(sys.multiply(g, sys.inverse(g)), sys.identity());
      for (GroupIndex h : sys.elements())
        for (PointIndex x : sys.points()) EXPECT_EQ(sys.act(sys.multiply(g, h), x), sys.act(g, sys.act(h, x)));
    }
  }
}

TEST(FiniteAxioms, PreimageAndSectionAgreeWithDefinition) {
  for (const auto& name : builtin_finite_names()) {
    const auto sys = builtin_finite_system(name);
    const std::size_t m = sys.point_count();
    for (std::uint64_t mask = 0; mask < (1u << m); ++mask) {
      const auto e = PointSubset::from_mask(m, mask);
      for (GroupIndex g : sys.elements())
        for (PointIndex x : sys.points()) {
          EXPECT_EQ(sys.preimage(g, e).contains(x), e.contains(sys.act(g, x)));
          EXPECT_EQ(sys.section(e, x).contains(g), e.contains(sys.act(g, x)));
        }
    }
  }
}

TEST(Construction, RejectsBadTables) {
  // not a latin square
  EXPECT_THROW(FiniteGroup(2, {0, 1, 1, 1}, 0), std::invalid_argument);
  // wrong identity
  EXPECT_THROW(FiniteGroup(2, {0, 1, 1, 0}, 1), std::invalid_argument);
  // wrong size
  EXPECT_THROW(FiniteGroup(2, {0, 1, 1}, 0), std::invalid_argument);
  // latin square with identity 0 that is not associative (order 5 loop)
  const std::vector<std::uint32_t> loop = {0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0};
  EXPECT_THROW(FiniteGroup(5, loop, 0), std::invalid_argument);

  const FiniteGroup z2(2, {0, 1, 1, 0}, 0);
  EXPECT_NO_THROW(FiniteActionSystem(z2, 2, {0, 1, 1, 0}));
  // non-bijective row
  EXPECT_THROW(FiniteActionSystem(z2, 2, {0, 1, 0, 0}), std::invalid_argument);
  // identity moves a point
  EXPECT_THROW(FiniteActionSystem(z2, 2, {1, 0, 1, 0}), std::invalid_argument);
  // out-of-range image
  EXPECT_THROW(FiniteActionSystem(z2, 2, {0, 1, 2, 0}), std::invalid_argument);
  // compatibility fails: Z3 rotation table under Z2? use S3 group with a wrong action
  const auto s3 = builtin_finite_system("s3-natural");
  std::vector<std::uint32_t> bad;
  for (GroupIndex g : s3.elements())
    for (PointIndex x : s3.points()) bad.push_back(g.value == 1 ? (x.value + 1) % 3 : s3.act(g, x).value);
  EXPECT_THROW(FiniteActionSystem(s3.group(), 3, bad), std::invalid_argument);
}

TEST(Construction, TrivialAndCyclic) {
  const auto t = trivial_system(3);
  EXPECT_EQ(t.group_order(), 1u);
  for (PointIndex x : t.points()) EXPECT_EQ(t.act(t.identity(), x), x);
  const auto z5 = cyclic_rotation(5);
  EXPECT_EQ(z5.act(GroupIndex{3}, PointIndex{4}).value, 2u);
}

TEST(Circle, ActAndWrap) {
  const CircleRotation c;
  EXPECT_DOUBLE_EQ(c.act(0.25, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(c.act(0.75, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(c.act(0.0, 0.3), 0.3);
  EXPECT_DOUBLE_EQ(c.inverse(0.25), 0.75);
  EXPECT_EQ(c.inverse(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_turns(-0.25), 0.75);
  EXPECT_DOUBLE_EQ(wrap_turns(2.5), 0.5);
  EXPECT_THROW(c.act(1.0, 0.5), std::out_of_range);
  EXPECT_THROW(c.act(0.5, -0.1), std::out_of_range);
}

TEST(Circle, PreimageIsArcShift) {
  const CircleRotation c;
  const ArcUnion e({{0.5, 0.75}});
  const auto pre = c.preimage(0.25, e);
  ASSERT_EQ(pre.arcs().size(), 1u);
  EXPECT_DOUBLE_EQ(pre.arcs()[0].begin, 0.25);
  EXPECT_DOUBLE_EQ(pre.arcs()[0].end, 0.5);
  EXPECT_EQ(c.preimage(0.4, ArcUnion::whole()), ArcUnion::whole());
  EXPECT_EQ(c.section(ArcUnion::whole(), 0.3), ArcUnion::whole());
  // E:x = E - x
  const auto sec = c.section(e, 0.5);
  EXPECT_TRUE(sec.contains(0.0));
  EXPECT_TRUE(sec.contains(0.2));
  EXPECT_FALSE(sec.contains(0.25));
  EXPECT_FALSE(sec.contains(0.6));
}

TEST(ArcUnionTest, NormalizationAndLength) {
  const ArcUnion wrapped({{0.75, 0.25}});
  EXPECT_DOUBLE_EQ(wrapped.length(), 0.5);
  EXPECT_TRUE(wrapped.contains(0.9));
  EXPECT_TRUE(wrapped.contains(0.0));
  EXPECT_FALSE(wrapped.contains(0.25));
  EXPECT_TRUE(wrapped.contains(0.75));
  const ArcUnion merged({{0.1, 0.3}, {0.2, 0.4}, {0.4, 0.5}});
  ASSERT_EQ(merged.arcs().size(), 1u);
  EXPECT_DOUBLE_EQ(merged.length(), 0.4);
  EXPECT_DOUBLE_EQ(ArcUnion({{0.2, 1.7}}).length(), 1.0);
  EXPECT_TRUE(ArcUnion().empty());
  EXPECT_DOUBLE_EQ(merged.shifted(0.8).length(), 0.4);
  EXPECT_TRUE(merged.shifted(0.8).contains(0.95));
}
