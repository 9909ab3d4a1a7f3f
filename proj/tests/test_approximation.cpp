#include "mconv/approximation.hpp"
#include "mconv/catalog.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mconv;
using testing_support::q;

TEST(SampleSize, ClosedFormValues) {
  EXPECT_EQ(hoeffding_samples(0.1, 0.05, 1, 1.0), 185u);
  EXPECT_EQ(hoeffding_samples(0.5, 0.5, 1, 1.0), 3u);
  EXPECT_EQ(hoeffding_samples(0.1, 0.05, 1, 0.0), 1u);
  // circle scenario: two trig constraints of range [-1, 1]
  EXPECT_EQ(hoeffding_samples(0.05, 0.05, 2, 2.0), static_cast<std::uint64_t>(std::ceil(4.0 * std::log(80.0) / 0.005)));
  EXPECT_THROW(hoeffding_samples(0.0, 0.05, 1, 1.0), std::invalid_argument);
  EXPECT_THROW(hoeffding_samples(0.1, 1.0, 1, 1.0), std::invalid_argument);
}

TEST(SampleSize, Monotone) {
  std::uint64_t prev = 0;
  for (double eps = 1.0; eps > 0.01; eps *= 0.8) {
    const auto n = hoeffding_samples(eps, 0.05, 2, 2.0);
    EXPECT_GE(n, prev);
    prev = n;
  }
  prev = 0;
  for (double d = 0.9; d > 1e-6; d *= 0.5) {
    const auto n = hoeffding_samples(0.1, d, 3, 1.0);
    EXPECT_GE(n, prev);
    prev = n;
  }
  for (std::size_t k = 1; k < 10; ++k) EXPECT_LE(hoeffding_samples(0.1, 0.05, k, 1.0), hoeffding_samples(0.1, 0.05, k + 1, 1.0));
  EXPECT_LE(hoeffding_slack(185, 0.05, 1, 1.0), 0.1);
}

TEST(EmpiricalAverage, Examples) {
  const GroupIndex g{2};
  EXPECT_EQ(empirical_average<Rational>(dirac<Rational>(g), 17, StreamKey{1, 0}), dirac<Rational>(g));
  const FiniteMeasure<GroupIndex, Rational> uz2({{GroupIndex{0}, q(1, 2)}, {GroupIndex{1}, q(1, 2)}});
  const auto one = empirical_average<Rational>(uz2, 1, StreamKey{1, 0});
  EXPECT_EQ(one.support_size(), 1u);
  const auto big = empirical_average<double>(uz2, 10000, StreamKey{1, 0});
  EXPECT_NEAR(big.weight(GroupIndex{0}), 0.5, 0.02);
  EXPECT_NEAR(big.weight(GroupIndex{1}), 0.5, 0.02);
  EXPECT_THROW(empirical_average<Rational>(uz2, 0, StreamKey{1, 0}), std::invalid_argument);
}

TEST(EmpiricalAverage, ExactWitness) {
  const FiniteMeasure<GroupIndex, Rational> mu({{GroupIndex{0}, q(1, 6)}, {GroupIndex{1}, q(1, 2)}, {GroupIndex{2}, q(1, 3)}});
  const auto pts = exact_average_points(mu);
  EXPECT_EQ(pts.size(), 6u);
  EXPECT_EQ(average_of_points<Rational>(pts), mu);
}

namespace {
ApproximationRequest<CircleRotation, double> circle_request(double lower, double upper, std::size_t k = 2) {
  ApproximationRequest<CircleRotation, double> req{CircleRotation{}, uniform_circle_measure(), {}};
  const char* labels[] = {"cos(1)", "sin(1)"};
  for (std::size_t i = 0; i < k; ++i)
    req.constraints.push_back({dirac<double>(0.0), circle_test_function(labels[i % 2]), lower, upper});
  req.slack = 0.05;
  req.failure_probability = 0.05;
  return req;
}
}  // namespace

TEST(Approximate, CircleScenarioLandsInside) {
  const auto res = approximate_action(circle_request(-0.1, 0.1), 1);
  EXPECT_EQ(res.report.status, ApproximationStatus::inside);
  EXPECT_EQ(res.report.samples, hoeffding_samples(0.05, 0.05, 2, 2.0));
  EXPECT_EQ(res.elements.size(), res.report.samples);
  double mean_cos = 0;
  for (double g : res.elements) mean_cos += std::cos(2 * M_PI * g);
  mean_cos /= static_cast<double>(res.elements.size());
  EXPECT_LT(std::abs(mean_cos), 0.05);
  EXPECT_NEAR(res.report.records[0].achieved, mean_cos, 1e-12);
  for (const auto& r : res.report.records) EXPECT_LT(r.transfer_gap, 1e-12);
}

TEST(Approximate, SuccessRateOverSeeds) {
  int inside = 0;
  for (std::uint64_t s = 0; s < 60; ++s) inside += approximate_action(circle_request(-0.1, 0.1), s).report.status == ApproximationStatus::inside;
  EXPECT_GE(inside, 57);
}

TEST(Approximate, Deterministic) {
  const auto r1 = approximate_action(circle_request(-0.1, 0.1), 77);
  const auto r2 = approximate_action(circle_request(-0.1, 0.1), 77);
  EXPECT_EQ(r1.elements, r2.elements);
  EXPECT_EQ(r1.report.records[0].achieved, r2.report.records[0].achieved);
}

TEST(Approximate, IdenticalConstraintsIdenticalVerdicts) {
  auto req = circle_request(-0.1, 0.1, 1);
  req.constraints.push_back(req.constraints[0]);
  req.constraints.push_back(req.constraints[0]);
  const auto res = approximate_action(req, 4);
  ASSERT_EQ(res.report.records.size(), 3u);
  for (const auto& r : res.report.records) {
    EXPECT_EQ(r.inside, res.report.records[0].inside);
    EXPECT_EQ(r.achieved, res.report.records[0].achieved);
  }
}

TEST(Approximate, SlackWiderThanConstraintIsUnsolvable) {
  const auto res = approximate_action(circle_request(-0.04, 0.04), 1);
  EXPECT_EQ(res.report.status, ApproximationStatus::unsolvable);
  EXPECT_TRUE(res.elements.empty());
  EXPECT_EQ(to_string(res.report.status), "unsolvable");
}

TEST(Approximate, ExactTransferOnFiniteSystems) {
  const auto sys = builtin_finite_system("s3-natural");
  ApproximationRequest<FiniteActionSystem, Rational> req{sys, average_of_points<Rational>(sys.elements()), {}};
  req.constraints.push_back({dirac<Rational>(PointIndex{0}), finite_test_function<Rational>("indicator(0)", 3), q(0), q(2, 3)});
  req.constraints.push_back({FiniteMeasure<PointIndex, Rational>({{PointIndex{1}, q(1, 2)}, {PointIndex{2}, q(1, 2)}}),
                             finite_test_function<Rational>("table(1, -1, 1/2)", 3), q(-1, 2), q(1, 2)});
  req.slack = 0.2;
  const auto res = approximate_action(req, 5);
  ASSERT_EQ(res.report.status, ApproximationStatus::inside);
  for (const auto& r : res.report.records) EXPECT_EQ(r.transfer_gap, 0.0);
  // recompute int f d(Av * pinned) by hand from the returned draws
  const auto av = average_of_points<Rational>(res.elements);
  Rational expect = 0;
  for (const auto& [g, w] : av.atoms()) expect += w * (sys.act(g, PointIndex{0}) == PointIndex{0} ? 1 : 0);
  EXPECT_DOUBLE_EQ(res.report.records[0].achieved, to_double(expect));
}
