#include "hullsim/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace {

using hullsim::ProbeSet;
using hullsim::SymmetricConvexBody;
using hullsim::UnsupportedRepresentation;
using hullsim::Vector;

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Vector unit2(double angle) { return vec2(std::cos(angle), std::sin(angle)); }

// Square [-1,1]^2 as the symmetric hull of its corners.
SymmetricConvexBody unit_square() {
  return SymmetricConvexBody::polytope(2, {vec2(1.0, 1.0), vec2(1.0, -1.0)});
}

// Cross-polytope conv{+-e1, +-e2}.
SymmetricConvexBody diamond() {
  return SymmetricConvexBody::polytope(2, {vec2(1.0, 0.0), vec2(0.0, 1.0)});
}

TEST(BallTest, SupportAndGaugeAreTheRadius) {
  const SymmetricConvexBody ball = SymmetricConvexBody::ball(2, 2.5);
  EXPECT_DOUBLE_EQ(ball.support(vec2(1.0, 0.0)), 2.5);
  EXPECT_DOUBLE_EQ(ball.support(vec2(0.0, -1.0)), 2.5);
  EXPECT_DOUBLE_EQ(ball.support(vec2(3.0, 4.0)), 2.5 * 5.0);
  for (double angle : {0.1, 1.0, 2.2, 4.0})
    EXPECT_DOUBLE_EQ(ball.radial_gauge(unit2(angle)), 2.5);
  EXPECT_DOUBLE_EQ(ball.circumradius(), 2.5);
}

TEST(BallTest, RejectsBadRadiusAndDimension) {
  EXPECT_THROW(SymmetricConvexBody::ball(2, 0.0), std::invalid_argument);
  EXPECT_THROW(SymmetricConvexBody::ball(2, -1.0), std::invalid_argument);
  EXPECT_THROW(SymmetricConvexBody::ball(0, 1.0), std::invalid_argument);
}

TEST(EllipsoidTest, SupportMatchesQuadraticForm) {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 4.0, 0.0, 0.0, 1.0;
  const SymmetricConvexBody e = SymmetricConvexBody::ellipsoid(sigma);
  EXPECT_DOUBLE_EQ(e.support(vec2(1.0, 0.0)), 2.0);
  EXPECT_DOUBLE_EQ(e.support(vec2(0.0, 1.0)), 1.0);
  const Vector diag = unit2(std::atan2(1.0, 1.0));
  EXPECT_NEAR(e.support(diag), std::sqrt(2.5), 1e-14);
  EXPECT_DOUBLE_EQ(e.circumradius(), 2.0);
}

TEST(EllipsoidTest, GaugeMatchesBoundaryRadius) {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 4.0, 0.0, 0.0, 1.0;
  const SymmetricConvexBody e = SymmetricConvexBody::ellipsoid(sigma);
  EXPECT_NEAR(e.radial_gauge(vec2(1.0, 0.0)), 2.0, 1e-12);
  EXPECT_NEAR(e.radial_gauge(vec2(0.0, 1.0)), 1.0, 1e-12);
  // Boundary radius along s solves t^2 (s' Sigma^{-1} s) = 1.
  for (double angle : {0.3, 0.9, 1.7, 2.8, 5.1}) {
    const Vector s = unit2(angle);
    const double expected = 1.0 / std::sqrt(s(0) * s(0) / 4.0 + s(1) * s(1));
    EXPECT_NEAR(e.radial_gauge(s), expected, 1e-10);
  }
}

TEST(EllipsoidTest, DegenerateAxisHasZeroGauge) {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.0, 0.0, 0.0;
  const SymmetricConvexBody e = SymmetricConvexBody::ellipsoid(sigma);
  EXPECT_DOUBLE_EQ(e.support(vec2(0.0, 1.0)), 0.0);
  EXPECT_DOUBLE_EQ(e.radial_gauge(vec2(0.0, 1.0)), 0.0);
  EXPECT_NEAR(e.radial_gauge(vec2(1.0, 0.0)), 1.0, 1e-12);
}

TEST(EllipsoidTest, RejectsAsymmetricAndIndefinite) {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.5, 0.2, 1.0;
  EXPECT_THROW(SymmetricConvexBody::ellipsoid(bad), std::invalid_argument);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 0.0, 0.0, -0.5;
  EXPECT_THROW(SymmetricConvexBody::ellipsoid(indef), std::invalid_argument);
}

TEST(PolytopeTest, SquareSupportIsL1NormOfDirection) {
  const SymmetricConvexBody sq = unit_square();
  for (double angle : {0.0, 0.4, 1.1, 2.0, 3.3, 5.9}) {
    const Vector u = unit2(angle);
    EXPECT_NEAR(sq.support(u), std::abs(u(0)) + std::abs(u(1)), 1e-14);
  }
  EXPECT_DOUBLE_EQ(sq.circumradius(), std::sqrt(2.0));
}

TEST(PolytopeTest, DiamondSupportIsMaxNormOfDirection) {
  const SymmetricConvexBody di = diamond();
  for (double angle : {0.0, 0.4, 1.1, 2.0, 3.3, 5.9}) {
    const Vector u = unit2(angle);
    EXPECT_NEAR(di.support(u), std::max(std::abs(u(0)), std::abs(u(1))), 1e-14);
  }
  EXPECT_DOUBLE_EQ(di.circumradius(), 1.0);
}

TEST(PolytopeTest, SupportMatchesPointEnumerationOracle) {
  const std::vector<Vector> gens = {vec2(1.3, 0.2), vec2(-0.4, 0.9), vec2(0.5, -1.1)};
  const SymmetricConvexBody body = SymmetricConvexBody::polytope(2, gens);
  for (int j = 0; j < 64; ++j) {
    const Vector u = unit2(2.0 * M_PI * j / 64.0 + 0.013);
    double oracle = 0.0;
    for (const Vector& g : gens) oracle = std::max(oracle, std::abs(g.dot(u)));
    EXPECT_DOUBLE_EQ(body.support(u), oracle);
  }
}

TEST(PolytopeTest, GaugeMatchesClosedFormsOnSquareAndDiamond) {
  const SymmetricConvexBody sq = unit_square();
  const SymmetricConvexBody di = diamond();
  for (double angle : {0.0, 0.3, 0.785398163397448279, 1.2, 2.4, 3.9, 5.5}) {
    const Vector s = unit2(angle);
    const double sq_expected = 1.0 / std::max(std::abs(s(0)), std::abs(s(1)));
    const double di_expected = 1.0 / (std::abs(s(0)) + std::abs(s(1)));
    EXPECT_NEAR(sq.radial_gauge(s), sq_expected, 1e-9);
    EXPECT_NEAR(di.radial_gauge(s), di_expected, 1e-9);
  }
}

TEST(PolytopeTest, GaugeOfSegmentIsZeroOffAxis) {
  const SymmetricConvexBody seg = SymmetricConvexBody::polytope(2, {vec2(1.0, 0.0)});
  EXPECT_DOUBLE_EQ(seg.radial_gauge(vec2(0.0, 1.0)), 0.0);
  EXPECT_NEAR(seg.radial_gauge(vec2(1.0, 0.0)), 1.0, 1e-9);
  EXPECT_NEAR(seg.radial_gauge(vec2(-1.0, 0.0)), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(seg.support(vec2(0.0, 1.0)), 0.0);
}

TEST(PolytopeTest, GaugeInOneDimensionIsTheEndpoint) {
  Vector g(1);
  g << 1.75;
  const SymmetricConvexBody seg = SymmetricConvexBody::polytope(1, {g});
  Vector plus(1), minus(1);
  plus << 1.0;
  minus << -1.0;
  EXPECT_DOUBLE_EQ(seg.radial_gauge(plus), 1.75);
  EXPECT_DOUBLE_EQ(seg.radial_gauge(minus), 1.75);
}

TEST(PolytopeTest, GaugeAboveTwoDimensionsIsUnsupported) {
  Vector g(3);
  g << 1.0, 0.0, 0.0;
  const SymmetricConvexBody body = SymmetricConvexBody::polytope(3, {g});
  Vector s(3);
  s << 0.0, 1.0, 0.0;
  EXPECT_THROW(body.radial_gauge(s), UnsupportedRepresentation);
  EXPECT_DOUBLE_EQ(body.support(s), 0.0);
}

TEST(PolytopeTest, GaugeRequiresUnitDirection) {
  EXPECT_THROW(unit_square().radial_gauge(vec2(1.0, 1.0)), std::invalid_argument);
  EXPECT_THROW(unit_square().radial_gauge(vec2(0.0, 0.0)), std::invalid_argument);
}

TEST(PolytopeTest, RejectsEmptyAndMismatchedGenerators) {
  EXPECT_THROW(SymmetricConvexBody::polytope(2, {}), std::invalid_argument);
  Vector g3(3);
  g3 << 1.0, 0.0, 0.0;
  EXPECT_THROW(SymmetricConvexBody::polytope(2, {g3}), std::invalid_argument);
}

TEST(SupportSampledTest, ExactDirectionLookupAndNegation) {
  const std::vector<Vector> dirs = {vec2(1.0, 0.0), unit2(1.1)};
  const SymmetricConvexBody body = SymmetricConvexBody::support_sampled(dirs, {2.0, 3.0});
  EXPECT_DOUBLE_EQ(body.support(vec2(1.0, 0.0)), 2.0);
  EXPECT_DOUBLE_EQ(body.support(vec2(-1.0, 0.0)), 2.0);
  EXPECT_DOUBLE_EQ(body.support(unit2(1.1)), 3.0);
  EXPECT_THROW(body.support(vec2(0.0, 1.0)), UnsupportedRepresentation);
  EXPECT_THROW(body.radial_gauge(vec2(1.0, 0.0)), UnsupportedRepresentation);
}

TEST(ProbeTest, UniformProbesPairUpAsExactNegations) {
  const ProbeSet probes = hullsim::uniform_probes_2d(16);
  ASSERT_EQ(probes.directions.size(), 16u);
  for (int j = 0; j < 8; ++j) {
    EXPECT_EQ(probes.directions[j](0), -probes.directions[j + 8](0));
    EXPECT_EQ(probes.directions[j](1), -probes.directions[j + 8](1));
  }
  EXPECT_DOUBLE_EQ(probes.directions[0](0), 1.0);
  EXPECT_DOUBLE_EQ(probes.directions[0](1), 0.0);
}

TEST(ProbeTest, ValidatesUnitLengthAndCount) {
  EXPECT_THROW(hullsim::uniform_probes_2d(3), std::invalid_argument);
  EXPECT_THROW(ProbeSet({vec2(1.0, 1.0)}), std::invalid_argument);
  const ProbeSet one_d = hullsim::probes_1d();
  ASSERT_EQ(one_d.directions.size(), 2u);
  EXPECT_DOUBLE_EQ(one_d.directions[0](0), 1.0);
  EXPECT_DOUBLE_EQ(one_d.directions[1](0), -1.0);
}

TEST(HausdorffEstimateTest, SquareVsDiamondPeaksAtDiagonal) {
  // Support gap between the L1 and Linf support functions is min(|ux|,|uy|),
  // maximized at 45 degrees where it equals sqrt(2)/2.
  const ProbeSet probes = hullsim::uniform_probes_2d(720);
  const double est = hullsim::hausdorff_estimate(unit_square(), diamond(), probes);
  EXPECT_NEAR(est, std::sqrt(2.0) / 2.0, 1e-12);
}

TEST(HausdorffEstimateTest, IdenticalBodiesGiveZero) {
  const ProbeSet probes = hullsim::uniform_probes_2d(64);
  EXPECT_DOUBLE_EQ(hullsim::hausdorff_estimate(unit_square(), unit_square(), probes), 0.0);
}

TEST(HausdorffEstimateTest, BallVsScaledBallGapIsRadiusGap) {
  const ProbeSet probes = hullsim::uniform_probes_2d(64);
  const SymmetricConvexBody a = SymmetricConvexBody::ball(2, 1.0);
  const SymmetricConvexBody b = SymmetricConvexBody::ball(2, 1.25);
  EXPECT_NEAR(hullsim::hausdorff_estimate(a, b, probes), 0.25, 1e-15);
}

TEST(HausdorffEstimateTest, EstimateGrowsWithProbeDensity) {
  const SymmetricConvexBody sq = unit_square();
  const SymmetricConvexBody di = diamond();
  double prev = 0.0;
  for (int d : {4, 8, 16, 32, 256}) {
    const double est = hullsim::hausdorff_estimate(sq, di, hullsim::uniform_probes_2d(d));
    EXPECT_GE(est, prev - 1e-15);
    EXPECT_LE(est, std::sqrt(2.0) / 2.0 + 1e-12);
    prev = est;
  }
}

TEST(HausdorffEstimateTest, RejectsDimensionMismatch) {
  Vector g(1);
  g << 1.0;
  const SymmetricConvexBody seg = SymmetricConvexBody::polytope(1, {g});
  EXPECT_THROW(hullsim::hausdorff_estimate(seg, unit_square(), hullsim::uniform_probes_2d(8)),
               std::invalid_argument);
}

TEST(MergeSupportTest, PointwiseMaxAndLengthCheck) {
  const std::vector<double> a = {1.0, 5.0, -2.0};
  const std::vector<double> b = {2.0, 4.0, -3.0};
  const std::vector<double> merged = hullsim::merge_support(a, b);
  ASSERT_EQ(merged.size(), 3u);
  EXPECT_DOUBLE_EQ(merged[0], 2.0);
  EXPECT_DOUBLE_EQ(merged[1], 5.0);
  EXPECT_DOUBLE_EQ(merged[2], -2.0);
  EXPECT_THROW(hullsim::merge_support(a, {1.0}), std::invalid_argument);
}

TEST(ExcessAlongRayTest, MatchesHandComputedValues) {
  const SymmetricConvexBody ball = SymmetricConvexBody::ball(2, 1.0);
  EXPECT_DOUBLE_EQ(hullsim::excess_along_ray(vec2(2.0, 0.0), 1.0, ball), 1.0);
  EXPECT_DOUBLE_EQ(hullsim::excess_along_ray(vec2(0.5, 0.0), 1.0, ball), 0.0);
  EXPECT_DOUBLE_EQ(hullsim::excess_along_ray(vec2(0.0, 0.0), 1.0, ball), 0.0);
  EXPECT_DOUBLE_EQ(hullsim::excess_along_ray(vec2(2.0, 0.0), 2.0, ball), 0.0);
  EXPECT_NEAR(hullsim::excess_along_ray(vec2(3.0, 4.0), 2.0, ball), 3.0, 1e-12);
  EXPECT_THROW(hullsim::excess_along_ray(vec2(1.0, 0.0), 0.0, ball), std::invalid_argument);
}

TEST(ExcessAlongRayTest, UsesGaugeOfTheRayDirection) {
  const SymmetricConvexBody sq = unit_square();
  // Along the diagonal the square's boundary radius is sqrt(2).
  const double r = 3.0;
  const Vector x = vec2(r / std::sqrt(2.0), r / std::sqrt(2.0));
  EXPECT_NEAR(hullsim::excess_along_ray(x, 1.0, sq), r - std::sqrt(2.0), 1e-9);
}

TEST(FreeFunctionTest, SupportAndGaugeForwardToBody) {
  const SymmetricConvexBody ball = SymmetricConvexBody::ball(2, 2.0);
  EXPECT_DOUBLE_EQ(hullsim::support(ball, vec2(0.0, 1.0)), 2.0);
  EXPECT_DOUBLE_EQ(hullsim::radial_gauge(ball, vec2(0.0, 1.0)), 2.0);
}

}  // namespace
