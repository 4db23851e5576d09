#include "common.hpp"

#include <covbody/cli.hpp>

#include <gtest/gtest.h>

using namespace covbody;
using fx::v2;

namespace {

StarBodyFn ball(int d, double r) {
  return {d, [r](const Vector&) { return r; }};
}

std::function<double(double)> power_h(double q) {
  return [q](double t) { return std::pow(t, q); };
}

}  // namespace

TEST(DualVolume, VolumeKernelMatchesStarVolume) {
  const auto q = sphere::trapezoid(512);
  const StarBodyFn l = diffbody(fx::pentagon(), 1);
  EXPECT_NEAR(dual_volume(KernelG::power(2, 1.0, 2.0), l, q).value, star_volume(l, q).value, 1e-9);
  const auto q3 = sphere::fibonacci(2000);
  const StarBodyFn l3 = ProjectionBody(fx::cross3(), WeightedMeasure::lebesgue(3), 1).polar();
  EXPECT_NEAR(dual_volume(KernelG::power(3, 2.0, 3.0), l3, q3).value, star_volume(l3, q3).value, 1e-9);
}

TEST(DualVolume, BallClosedForm) {
  // Kernel r^alpha on a disc of radius R: (1/2) 2 pi R^{alpha+1} / (alpha + 1).
  for (double alpha : {-0.5, 0.0, 1.0, 3.0}) {
    const double r = 1.7;
    const double expect = pi * std::pow(r, alpha + 1.0) / (alpha + 1.0);
    EXPECT_NEAR(dual_volume(KernelG::power(2, alpha), ball(2, r), sphere::trapezoid(64)).value, expect, 1e-12 * expect);
  }
}

TEST(DualVolume, DimensionMismatch) {
  EXPECT_THROW(dual_volume(KernelG::power(3, 1.0), ball(2, 1.0), sphere::trapezoid(8)), InputError);
  EXPECT_THROW(KernelG::power(2, -1.0), DomainError);
}

TEST(Kernel, SidesAndSpotChecks) {
  const KernelG up = KernelG::power_density(1.0, Density::linear_power(v2(1, 1), 0.0, 2.0));
  EXPECT_EQ(up.side, KernelG::Side::upper);
  EXPECT_EQ(spot_check_kernel(up, 2.0), "");
  const KernelG low = KernelG::power_density(1.0, Density::gaussian(2, 1.0));
  EXPECT_EQ(low.side, KernelG::Side::lower);
  EXPECT_EQ(spot_check_kernel(low, 2.0), "");
  KernelG wrong = low;
  wrong.side = KernelG::Side::upper;
  EXPECT_NE(spot_check_kernel(wrong, 2.0), "");
  EXPECT_THROW(KernelG::power_density(1.0, Density::linear_power(v2(1, 1), 1.0, 2.0)), InputError);
}

TEST(Chord, AffineFixtureIsEqualityOnBothBranches) {
  const auto q = sphere::trapezoid(256);
  for (double alpha : {0.0, 1.0, 2.5}) {
    for (double hq : {1.0, 2.0, 0.5}) {
      const ConcaveRayFn f = cli::fixtures::affine(ball(2, 1.3), 0.8);
      const KernelG g = KernelG::power(2, alpha);
      const VerifyReport lo = chord_lower_check(f, power_h(hq), g, q);
      const VerifyReport up = chord_upper_check(f, power_h(hq), g, q);
      EXPECT_NEAR(lo.ratio, 1.0, 1e-6) << alpha << " " << hq;
      EXPECT_NEAR(up.ratio, 1.0, 1e-6) << alpha << " " << hq;
      EXPECT_NEAR(lo.get("beta_alpha"), up.get("beta_b"), 1e-9);
      EXPECT_EQ(up.get("omega_count"), 0.0);
    }
  }
}

TEST(Chord, AffineFixtureOnPolytopeSupport) {
  const Polytope k = fx::pentagon();
  const StarBodyFn l{2, [k](const Vector& u) { return radial(k, Vector::Zero(2), u); }};
  const auto q = sphere::trapezoid(300);
  const ConcaveRayFn f = cli::fixtures::affine(l, 1.0);
  EXPECT_NEAR(chord_lower_check(f, power_h(2.0), KernelG::power(2, 1.0), q).ratio, 1.0, 1e-6);
  EXPECT_NEAR(chord_upper_check(f, power_h(2.0), KernelG::power(2, 1.0), q).ratio, 1.0, 1e-6);
}

TEST(Chord, StrictlyConcavePerturbationIsStrict) {
  const auto q = sphere::trapezoid(128);
  const ConcaveRayFn f = cli::fixtures::concave(ball(2, 1.0), 1.0, 0.5);
  const KernelG g = KernelG::power(2, 1.0);
  const VerifyReport lo = chord_lower_check(f, power_h(1.0), g, q);
  const VerifyReport up = chord_upper_check(f, power_h(1.0), g, q);
  EXPECT_TRUE(lo.pass);
  EXPECT_TRUE(up.pass);
  EXPECT_GT(lo.ratio, 1.01);
  EXPECT_LT(up.ratio, 0.99);
}

TEST(Chord, PlateauActivatesOmega) {
  const auto q = sphere::trapezoid(200);
  const ConcaveRayFn f = cli::fixtures::plateau(ball(2, 1.0), 1.0);
  const VerifyReport up = chord_upper_check(f, power_h(1.0), KernelG::power(2, 1.0), q);
  EXPECT_TRUE(up.pass);
  EXPECT_GT(up.get("omega_count"), 0.0);
  EXPECT_GT(up.get("omega_term"), 0.0);
}

TEST(Chord, NonHomogeneousKernels) {
  const auto q = sphere::trapezoid(128);
  const ConcaveRayFn f = cli::fixtures::affine(ball(2, 1.0), 1.0);
  const KernelG low = KernelG::power_density(1.0, Density::gaussian(2, 0.7));
  const VerifyReport lo = chord_lower_check(f, power_h(1.0), low, q);
  EXPECT_TRUE(lo.pass) << lo.ratio;
  const KernelG up = KernelG::power_density(1.0, Density::linear_power(v2(0.4, 0.3), 0.0, 1.0));
  const VerifyReport u = chord_upper_check(f, power_h(1.0), up, q);
  EXPECT_TRUE(u.pass) << u.ratio;
  EXPECT_THROW(chord_lower_check(f, power_h(1.0), up, q), InputError);
  EXPECT_THROW(chord_upper_check(f, power_h(1.0), low, q), InputError);
}

TEST(Chord, CovariogramFixtureReproducesZhang) {
  // f = g^{1/2}, h = t^2, G = r on the triangle: LHS = vol(K)^2 and L-tilde = 2 vol(K) Pi polar K.
  const auto mu = WeightedMeasure::lebesgue(2);
  const Polytope k = fx::triangle();
  const ConcaveRayFn f = cli::fixtures::covariogram_power(k, mu, 1, 0.5);
  const auto q = sphere::trapezoid(128);
  const VerifyReport up = chord_upper_check(f, power_h(2.0), KernelG::power(2, 1.0), q);
  EXPECT_NEAR(up.lhs, 0.25, 1e-3);
  EXPECT_NEAR(up.ratio, 1.0, 1e-2);
  const ProjectionBody pb(k, mu, 1);
  for (std::size_t i = 0; i < q.size(); i += 16) {
    const Vector& u = q.nodes[i];
    const double tilde = -f.value_at_zero(u) / f.ray_derivative_at_zero(u);
    const double expect = 2.0 * 0.5 * pb.polar_radial(MDirection::from_flat(u, 2));
    EXPECT_NEAR(tilde, expect, 1e-2 * expect);
  }
  // beta_b = 2 int_0^1 vol(K) tau^2 (1 - tau) d tau.
  EXPECT_NEAR(up.get("beta_b"), 1.0 / 12.0, 1e-12);
}

TEST(Chord, CovariogramFixtureOnSquareIsStrict) {
  const auto mu = WeightedMeasure::lebesgue(2);
  const ConcaveRayFn f = cli::fixtures::covariogram_power(fx::square(), mu, 1, 0.5);
  const VerifyReport up = chord_upper_check(f, power_h(2.0), KernelG::power(2, 1.0), sphere::trapezoid(96));
  EXPECT_TRUE(up.pass);
  EXPECT_LT(up.ratio, 0.9);
}
