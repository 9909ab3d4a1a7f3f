#include "mconv/catalog.hpp"
#include "mconv/generators.hpp"
#include "mconv/product_convolution.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace mconv;
using testing_support::q;
using testing_support::weights_of;

namespace {
const PointIndex a{0}, b{1};
const GroupIndex g0{0}, g1{1};
using EM = FiniteMeasure<PointIndex, Rational>;
using EG = FiniteMeasure<GroupIndex, Rational>;
const EG half_g({{g0, q(1, 2)}, {g1, q(1, 2)}});

FiniteActionSystem swap2() { return builtin_finite_system("z2-swap"); }
}  // namespace

TEST(Product, RectangleAndGridValues) {
  const auto lam = product(dirac<Rational>(g1), dirac<Rational>(a));
  EXPECT_EQ(lam.mass(PairSet<GroupIndex, PointIndex>({{g1, a}})), 1);
  const auto half = product(half_g, dirac<Rational>(a));
  EXPECT_EQ(half.mass(PairSet<GroupIndex, PointIndex>({{g0, a}})), q(1, 2));
  EXPECT_EQ(half.total_mass(), 1);
}

TEST(Product, SliceExamples) {
  const auto lam = product(half_g, dirac<Rational>(a));
  const PairSet<GroupIndex, PointIndex> w({{g0, a}, {g1, b}});
  EXPECT_EQ(slice_integral(lam, w, Axis::left), q(1, 2));
  EXPECT_EQ(slice_integral(lam, w, Axis::right), q(1, 2));
  const PairSet<GroupIndex, PointIndex> full({{g0, a}, {g0, b}, {g1, a}, {g1, b}});
  EXPECT_EQ(slice_integral(lam, full, Axis::left), 1);
  EXPECT_EQ(slice_integral(lam, full, Axis::right), 1);
  EXPECT_EQ(slice_integral(lam, PairSet<GroupIndex, PointIndex>(), Axis::left), 0);
}

TEST(Convolve, DiracLaws) {
  for (const auto& name : builtin_finite_names()) {
    const auto sys = builtin_finite_system(name);
    for (GroupIndex g : sys.elements())
      for (PointIndex x : sys.points()) EXPECT_EQ(convolve(sys, dirac<Rational>(g), dirac<Rational>(x)), dirac<Rational>(sys.act(g, x)));
    InstanceGenerator gen(StreamKey{11, 0});
    for (int i = 0; i < 10; ++i) {
      const auto nu = gen.measure<Rational>(sys.points());
      EXPECT_EQ(convolve(sys, dirac<Rational>(sys.identity()), nu), nu);
      for (GroupIndex g : sys.elements()) EXPECT_EQ(convolve(sys, dirac<Rational>(g), nu), pushforward(sys, g, nu));
    }
  }
}

TEST(Convolve, SwapExample) {
  const auto sys = swap2();
  const auto out = convolve(sys, half_g, dirac<Rational>(a));
  EXPECT_EQ(out, EM({{a, q(1, 2)}, {b, q(1, 2)}}));
  const auto e = PointSubset::of(2, {a});
  EXPECT_EQ(convolve_via_group_integral(sys, half_g, dirac<Rational>(a), e), q(1, 2));
  EXPECT_EQ(convolve_via_section_integral(sys, half_g, dirac<Rational>(a), e), q(1, 2));
  EXPECT_EQ(convolve_via_group_integral(sys, half_g, dirac<Rational>(a), sys.whole_space()), 1);
  EXPECT_EQ(convolve_via_section_integral(sys, half_g, dirac<Rational>(a), sys.whole_space()), 1);
  // mu = delta_g gives nu(g^-1 E); nu = delta_x gives mu(E:x)
  const EM nu({{a, q(1, 3)}, {b, q(2, 3)}});
  EXPECT_EQ(convolve_via_group_integral(sys, dirac<Rational>(g1), nu, e), q(2, 3));
  EXPECT_EQ(convolve_via_section_integral(sys, half_g, dirac<Rational>(b), e), half_g.weight(g1));
}

TEST(Convolve, AgreesWithBruteForceOracle) {
  for (const auto& ref : oracle::builtin_systems()) {
    const auto sys = builtin_finite_system(ref.name);
    InstanceGenerator gen(StreamKey{12, 0});
    for (int i = 0; i < 50; ++i) {
      const auto mu = gen.measure<Rational>(sys.elements());
      const auto mu2 = gen.measure<Rational>(sys.elements());
      const auto nu = gen.measure<Rational>(sys.points());
      EXPECT_EQ(weights_of(convolve(sys, mu, nu)), oracle::convolve(ref, weights_of(mu), weights_of(nu)));
      EXPECT_EQ(weights_of(convolve_group(sys.group(), mu, mu2)), oracle::convolve_group(ref, weights_of(mu), weights_of(mu2)));
    }
  }
}

TEST(Convolve, ThreeFormulasAndProductMassExhaustive) {
  for (const auto& ref : oracle::builtin_systems()) {
    const auto sys = builtin_finite_system(ref.name);
    const std::size_t m = sys.point_count();
    InstanceGenerator gen(StreamKey{13, 0});
    for (int i = 0; i < 30; ++i) {
      const auto mu = gen.measure<Rational>(sys.elements());
      const auto nu = gen.measure<Rational>(sys.points());
      const auto expected = oracle::convolve(ref, weights_of(mu), weights_of(nu));
      const auto lam = product(mu, nu);
      for (std::uint64_t mask = 0; mask < (1u << m); ++mask) {
        const auto e = PointSubset::from_mask(m, mask);
        const Rational want = oracle::mass(expected, mask);
        EXPECT_EQ(measure_of(convolve(sys, mu, nu), e), want);
        EXPECT_EQ(convolve_via_group_integral(sys, mu, nu, e), want);
        EXPECT_EQ(convolve_via_section_integral(sys, mu, nu, e), want);
        EXPECT_EQ(lam.mass(action_preimage(sys, e)), want);
      }
    }
  }
}

TEST(Convolve, GroupConvolutionLaws) {
  const auto sys = swap2();
  EXPECT_EQ(convolve_group(sys.group(), half_g, half_g), half_g);
  EXPECT_EQ(convolve_group(sys.group(), dirac<Rational>(g1), dirac<Rational>(g1)), dirac<Rational>(g0));
  for (const auto& name : builtin_finite_names()) {
    const auto s = builtin_finite_system(name);
    InstanceGenerator gen(StreamKey{14, 0});
    for (int i = 0; i < 20; ++i) {
      const auto m1 = gen.measure<Rational>(s.elements());
      const auto m2 = gen.measure<Rational>(s.elements());
      const auto nu = gen.measure<Rational>(s.points());
      EXPECT_EQ(convolve_group(s.group(), dirac<Rational>(s.identity()), m1), m1);
      EXPECT_EQ(convolve(s, convolve_group(s.group(), m1, m2), nu), convolve(s, m1, convolve(s, m2, nu)));
    }
    for (GroupIndex g : s.elements())
      for (GroupIndex h : s.elements())
        EXPECT_EQ(convolve_group(s.group(), dirac<Rational>(g), dirac<Rational>(h)), dirac<Rational>(s.multiply(g, h)));
  }
}

TEST(Fubini, ExamplesAndOracle) {
  const auto sys = swap2();
  const TestFunction<PointIndex, Rational> c{[](const PointIndex&) { return q(5, 2); }, q(5, 2), "const"};
  auto t = fubini_triple(sys, c, half_g, dirac<Rational>(a));
  EXPECT_EQ(t.direct, q(5, 2));
  EXPECT_EQ(t.group_inner, q(5, 2));
  EXPECT_EQ(t.space_inner, q(5, 2));
  const auto ind = finite_test_function<Rational>("indicator(0)", 2);
  t = fubini_triple(sys, ind, half_g, dirac<Rational>(a));
  EXPECT_EQ(t.direct, q(1, 2));
  EXPECT_EQ(t.group_inner, q(1, 2));
  EXPECT_EQ(t.space_inner, q(1, 2));

  for (const auto& ref : oracle::builtin_systems()) {
    const auto s = builtin_finite_system(ref.name);
    InstanceGenerator gen(StreamKey{15, 0});
    for (int i = 0; i < 30; ++i) {
      const auto f = gen.table_function<Rational>(s.point_count());
      std::vector<Rational> values;
      for (PointIndex x : s.points()) values.push_back(f(x));
      const auto mu = gen.measure<Rational>(s.elements());
      const auto nu = gen.measure<Rational>(s.points());
      const auto tr = fubini_triple(s, f, mu, nu);
      const Rational want = oracle::integral(oracle::convolve(ref, weights_of(mu), weights_of(nu)), values);
      EXPECT_EQ(tr.direct, want);
      EXPECT_EQ(tr.group_inner, want);
      EXPECT_EQ(tr.space_inner, want);
      const auto id = fubini_triple(s, f, dirac<Rational>(s.identity()), nu);
      EXPECT_EQ(id.direct, integrate(f, nu));
    }
  }
}

TEST(Slice, RandomInstancesAgainstGridSum) {
  for (const auto& ref : oracle::builtin_systems()) {
    const auto s = builtin_finite_system(ref.name);
    InstanceGenerator gen(StreamKey{16, 0});
    for (int i = 0; i < 50; ++i) {
      const auto mu = gen.measure<Rational>(s.elements());
      const auto nu = gen.measure<Rational>(s.points());
      const auto w = gen.pair_set(s.elements(), s.points());
      std::vector<std::pair<std::uint32_t, std::uint32_t>> raw;
      for (GroupIndex g : s.elements())
        for (PointIndex x : s.points())
          if (w.contains(g, x)) raw.emplace_back(g.value, x.value);
      const Rational want = oracle::product_mass(weights_of(mu), weights_of(nu), raw);
      const auto lam = product(mu, nu);
      EXPECT_EQ(lam.mass(w), want);
      EXPECT_EQ(slice_integral(lam, w, Axis::left), want);
      EXPECT_EQ(slice_integral(lam, w, Axis::right), want);
    }
  }
}

TEST(FloatMode, MatchesExactWithinRounding) {
  const auto s = builtin_finite_system("dihedral-4");
  InstanceGenerator gen(StreamKey{17, 0});
  for (int i = 0; i < 50; ++i) {
    const auto mu = gen.measure<Rational>(s.elements());
    const auto nu = gen.measure<Rational>(s.points());
    const auto exact = convert_weights<double>(convolve(s, mu, nu));
    const auto approx = convolve(s, convert_weights<double>(mu), convert_weights<double>(nu));
    EXPECT_LE(tv_distance(exact, approx), 1e-14);
  }
}

TEST(Sampled, CircleConvolutionOfUniformIsUniform) {
  const CircleRotation c;
  const auto u = uniform_circle_measure();
  const auto conv = convolve(c, u, u);
  const ArcUnion e({{0.1, 0.4}});
  const auto est = measure_of(conv, e, 40000, StreamKey{4, 0});
  EXPECT_LE(std::abs(est.value - 0.3), est.half_width);
  const auto via_g = convolve_via_group_integral(c, u, u, e, 4000, StreamKey{4, 1});
  const auto via_s = convolve_via_section_integral(c, u, u, e, 4000, StreamKey{4, 2});
  // the inner integral is exact and constant, so both are exact here
  EXPECT_NEAR(via_g.value, 0.3, 1e-12);
  EXPECT_NEAR(via_s.value, 0.3, 1e-12);
}

TEST(Sampled, DiracConvolutionOnCircle) {
  const CircleRotation c;
  const auto d = convolve(c, dirac<double>(0.25), dirac<double>(0.5));
  EXPECT_EQ(d, dirac<double>(0.75));
  const auto g = convolve_group(c, dirac<double>(0.5), dirac<double>(0.75));
  EXPECT_EQ(g, dirac<double>(0.25));
}

TEST(Sampled, FubiniAndSliceOnCircle) {
  const CircleRotation c;
  const auto u = uniform_circle_measure();
  int agree = 0;
  for (std::uint64_t r = 0; r < 40; ++r) {
    const auto t = fubini_triple(c, circle_test_function("cos2(1)"), u, u, 1024, StreamKey{5, r}, 0.05, 8);
    agree += agree_within_half_widths(t);
  }
  EXPECT_GE(agree, 36);
  const RectangleUnion w({{ArcUnion({{0.0, 0.5}}), ArcUnion({{0.25, 0.75}})}});
  EXPECT_NEAR(w.area(), 0.25, 1e-15);
  const auto lam = product(u, u);
  const auto exact = product_mass(lam, w, 1000, StreamKey{6, 0});
  EXPECT_NEAR(exact.value, 0.25, 1e-12);
  const auto left = slice_integral(lam, w, Axis::left, 4000, StreamKey{6, 1});
  EXPECT_LE(std::abs(left.value - 0.25), left.half_width);
}
