#include "hullsim/construction.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace {

using hullsim::ConstructionSpec;
using hullsim::DirectionMode;
using hullsim::PartitionScheme;
using hullsim::SymmetricConvexBody;
using hullsim::Vector;

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

TEST(NormalizerTest, MatchesClosedForm) {
  EXPECT_DOUBLE_EQ(hullsim::normalizer_b(std::exp(2.0)), 2.0);
  EXPECT_DOUBLE_EQ(hullsim::normalizer_b(100.0), 3.0348542587702927);
  EXPECT_DOUBLE_EQ(hullsim::normalizer_b(1e6), 5.256521769756932);
  EXPECT_NEAR(hullsim::normalizer_b(125000.0) / hullsim::normalizer_b(1e6), 0.921675106622,
              1e-10);
}

TEST(NormalizerTest, RejectsArgumentsAtOrBelowOne) {
  EXPECT_THROW(hullsim::normalizer_b(1.0), std::domain_error);
  EXPECT_THROW(hullsim::normalizer_b(0.5), std::domain_error);
  EXPECT_THROW(hullsim::normalizer_b(-3.0), std::domain_error);
}

TEST(PartitionTest, GreedyDeficitHandSequence) {
  // Densities (0.5, 0.3, 0.2); the largest-deficit rule with ties to the
  // lowest class produces this assignment for the first ten indices.
  PartitionScheme scheme({0.5, 0.3, 0.2});
  const std::vector<int> expected = {0, 1, 2, 0, 0, 1, 0, 2, 1, 0};
  for (int want : expected) EXPECT_EQ(scheme.assign_next(), want);
  const auto& counts = scheme.counts();
  EXPECT_EQ(counts[0], 5);
  EXPECT_EQ(counts[1], 3);
  EXPECT_EQ(counts[2], 2);
}

TEST(PartitionTest, DiscrepancyStaysBelowOneOverAMillionSteps) {
  const std::vector<std::vector<double>> densities_list = {
      std::vector<double>(8, 0.125), {0.5, 0.3, 0.2}};
  for (const auto& densities : densities_list) {
    PartitionScheme scheme(densities);
    double worst = 0.0;
    for (long long n = 1; n <= 1000000; ++n) {
      scheme.assign_next();
      worst = std::max(worst, scheme.max_discrepancy());
    }
    EXPECT_LE(worst, 1.0 + 1e-9);
  }
}

TEST(PartitionTest, SingleClassHasZeroDiscrepancy) {
  PartitionScheme scheme({1.0});
  for (int n = 0; n < 1000; ++n) {
    EXPECT_EQ(scheme.assign_next(), 0);
    EXPECT_DOUBLE_EQ(scheme.max_discrepancy(), 0.0);
  }
}

TEST(PartitionTest, CountsSumToTotal) {
  PartitionScheme scheme({0.25, 0.25, 0.5});
  for (int n = 0; n < 777; ++n) scheme.assign_next();
  long long sum = 0;
  for (long long c : scheme.counts()) sum += c;
  EXPECT_EQ(sum, scheme.total());
  EXPECT_EQ(scheme.total(), 777);
}

TEST(PartitionTest, RejectsInvalidDensities) {
  EXPECT_THROW(PartitionScheme({}), std::invalid_argument);
  EXPECT_THROW(PartitionScheme({0.5, 0.49}), std::invalid_argument);
  EXPECT_THROW(PartitionScheme({1.5, -0.5}), std::invalid_argument);
  EXPECT_THROW(PartitionScheme({0.5, 0.0, 0.5}), std::invalid_argument);
}

TEST(PartitionTest, AssignLabelsMatchesSchemeReplay) {
  const std::vector<double> densities = {0.5, 0.3, 0.2};
  const auto labels = hullsim::assign_labels(densities, 5000);
  ASSERT_EQ(labels.size(), 5000u);
  PartitionScheme scheme(densities);
  for (int32_t label : labels) EXPECT_EQ(label, scheme.assign_next());
}

TEST(DirectionTest, UniformAnglesCoverTheHalfCircle) {
  const auto dirs = hullsim::direction_sequence(2, 4, DirectionMode::UniformAngles2d);
  ASSERT_EQ(dirs.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    const double angle = M_PI * k / 4.0;
    EXPECT_NEAR(dirs[static_cast<size_t>(k)](0), std::cos(angle), 1e-15);
    EXPECT_NEAR(dirs[static_cast<size_t>(k)](1), std::sin(angle), 1e-15);
  }
  EXPECT_THROW(hullsim::direction_sequence(3, 4, DirectionMode::UniformAngles2d),
               std::invalid_argument);
}

TEST(DirectionTest, ExplicitListValidated) {
  const std::vector<Vector> good = {vec2(1.0, 0.0), vec2(0.0, 1.0)};
  const auto dirs = hullsim::direction_sequence(2, 2, DirectionMode::ExplicitList, good);
  EXPECT_EQ(dirs.size(), 2u);
  EXPECT_THROW(hullsim::direction_sequence(2, 3, DirectionMode::ExplicitList, good),
               std::invalid_argument);
  EXPECT_THROW(
      hullsim::direction_sequence(2, 1, DirectionMode::ExplicitList, {vec2(1.0, 1.0)}),
      std::invalid_argument);
}

TEST(DirectionTest, QuasiUniformIsSeededAndUnit) {
  const auto a = hullsim::direction_sequence(3, 16, DirectionMode::SeededQuasiUniform, {}, 7);
  const auto b = hullsim::direction_sequence(3, 16, DirectionMode::SeededQuasiUniform, {}, 7);
  const auto c = hullsim::direction_sequence(3, 16, DirectionMode::SeededQuasiUniform, {}, 8);
  ASSERT_EQ(a.size(), 16u);
  bool any_differs = false;
  for (size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(a[k].norm(), 1.0, 1e-12);
    EXPECT_EQ(a[k], b[k]);
    if (a[k] != c[k]) any_differs = true;
  }
  EXPECT_TRUE(any_differs);
}

TEST(BuildSpecTest, GaugeRadiiComeFromTheTargetBoundary) {
  const SymmetricConvexBody square =
      SymmetricConvexBody::polytope(2, {vec2(1.0, 1.0), vec2(1.0, -1.0)});
  const std::vector<Vector> dirs = {vec2(1.0, 0.0),
                                    vec2(std::sqrt(0.5), std::sqrt(0.5))};
  const ConstructionSpec spec = hullsim::build_spec(square, dirs, {0.5, 0.5}, 3);
  ASSERT_EQ(spec.classes(), 2);
  EXPECT_NEAR(spec.gauge_radii[0], 1.0, 1e-9);
  EXPECT_NEAR(spec.gauge_radii[1], std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(spec.class_variances[0], 1.0, 2e-9);
  EXPECT_NEAR(spec.class_variances[1], 2.0, 4e-9);
  EXPECT_EQ(spec.seed, 3u);
  EXPECT_EQ(spec.dimension, 2);
}

TEST(BuildSpecTest, RejectsMismatchedInputs) {
  const SymmetricConvexBody ball = SymmetricConvexBody::ball(2, 1.0);
  EXPECT_THROW(hullsim::build_spec(ball, {vec2(1.0, 0.0)}, {0.5, 0.5}, 1),
               std::invalid_argument);
  EXPECT_THROW(hullsim::build_spec(ball, {}, {}, 1), std::invalid_argument);
}

TEST(SampleTest, XiIsDeterministicWithUnitMoments) {
  const SymmetricConvexBody ball = SymmetricConvexBody::ball(2, 1.0);
  const auto dirs = hullsim::direction_sequence(2, 4, DirectionMode::UniformAngles2d);
  const ConstructionSpec spec =
      hullsim::build_spec(ball, dirs, std::vector<double>(4, 0.25), 11);
  EXPECT_EQ(hullsim::sample_xi(spec, 5), hullsim::sample_xi(spec, 5));
  const long long count = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (long long n = 1; n <= count; ++n) {
    const double xi = hullsim::sample_xi(spec, n);
    sum += xi;
    sum2 += xi * xi;
  }
  const double inv = 1.0 / static_cast<double>(count);
  const double mean = sum * inv;
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(inv));
  EXPECT_NEAR(sum2 * inv - mean * mean, 1.0, 6.0 * std::sqrt(2.0 * inv));
}

TEST(SampleTest, DrawSampleLiesOnTheClassRay) {
  const SymmetricConvexBody square =
      SymmetricConvexBody::polytope(2, {vec2(1.0, 1.0), vec2(1.0, -1.0)});
  const auto dirs = hullsim::direction_sequence(2, 8, DirectionMode::UniformAngles2d);
  const ConstructionSpec spec =
      hullsim::build_spec(square, dirs, std::vector<double>(8, 0.125), 5);
  PartitionScheme scheme(spec.densities);
  PartitionScheme predictor(spec.densities);
  for (long long n = 1; n <= 200; ++n) {
    const int k = hullsim::assign_class(predictor);
    const Vector x = hullsim::draw_sample(spec, n, scheme);
    const Vector& s = spec.directions[static_cast<size_t>(k)];
    const double along = x.dot(s);
    EXPECT_NEAR((x - along * s).norm(), 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(along, spec.gauge_radii[static_cast<size_t>(k)] *
                                hullsim::sample_xi(spec, n));
  }
}

TEST(SampleTest, DrawSampleValidatesStreamPosition) {
  const SymmetricConvexBody ball = SymmetricConvexBody::ball(2, 1.0);
  const auto dirs = hullsim::direction_sequence(2, 2, DirectionMode::UniformAngles2d);
  const ConstructionSpec spec =
      hullsim::build_spec(ball, dirs, std::vector<double>(2, 0.5), 1);
  PartitionScheme scheme(spec.densities);
  EXPECT_THROW(hullsim::draw_sample(spec, 5, scheme), std::invalid_argument);
}

TEST(TruncatedTargetTest, InscribedInTheSourceBody) {
  const SymmetricConvexBody ball = SymmetricConvexBody::ball(2, 1.5);
  const auto dirs = hullsim::direction_sequence(2, 8, DirectionMode::UniformAngles2d);
  const ConstructionSpec spec =
      hullsim::build_spec(ball, dirs, std::vector<double>(8, 0.125), 1);
  const SymmetricConvexBody vm = hullsim::truncated_target(spec).body;
  for (int j = 0; j < 128; ++j) {
    const double angle = 2.0 * M_PI * j / 128.0;
    Vector u = vec2(std::cos(angle), std::sin(angle));
    EXPECT_LE(vm.support(u), ball.support(u) + 1e-12);
  }
  // Every construction ray touches the boundary of both bodies.
  for (const Vector& s : spec.directions)
    EXPECT_NEAR(vm.support(s), 1.5, 2e-9);
}

TEST(TruncatedTargetTest, EqualsSquareForFullCircleCornerAndEdgeDirections) {
  const SymmetricConvexBody square =
      SymmetricConvexBody::polytope(2, {vec2(1.0, 1.0), vec2(1.0, -1.0)});
  std::vector<Vector> dirs;
  for (int k = 0; k < 8; ++k) {
    const double angle = M_PI * k / 4.0;
    dirs.push_back(vec2(std::cos(angle), std::sin(angle)));
  }
  const ConstructionSpec spec =
      hullsim::build_spec(square, dirs, std::vector<double>(8, 0.125), 1);
  const SymmetricConvexBody vm = hullsim::truncated_target(spec).body;
  for (int j = 0; j < 360; ++j) {
    const double angle = 2.0 * M_PI * j / 360.0;
    const Vector u = vec2(std::cos(angle), std::sin(angle));
    EXPECT_NEAR(vm.support(u), square.support(u), 1e-8);
  }
}

}  // namespace
