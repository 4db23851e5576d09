#include "common.hpp"

#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

using namespace covbody;
using fx::v2;

namespace {

const MDirection e1 = MDirection::unit(v2(1, 0), 2);

// Along e1 the chord through x toward -e1 has length x_1 on both fixtures.
double square_e1(double p) { return std::pow(1.0 / (p + 1.0), 1.0 / p); }
double triangle_e1(double p) { return std::pow(2.0 / ((p + 1.0) * (p + 2.0)), 1.0 / p); }

}  // namespace

TEST(RadialMean, ClosedFormsAlongE1) {
  const auto mu = WeightedMeasure::lebesgue(2);
  for (double p : {-0.5, 0.5, 1.0, 2.0, 7.0}) {
    EXPECT_NEAR(rmb_radial_direct(fx::square(), mu, p, e1), square_e1(p), 1e-10) << p;
    EXPECT_NEAR(rmb_radial_direct(fx::triangle(), mu, p, e1), triangle_e1(p), 1e-10) << p;
  }
}

TEST(RadialMean, GeometricMeanAtZero) {
  const auto mu = WeightedMeasure::lebesgue(2);
  EXPECT_NEAR(rmb_radial_p0(fx::square(), mu, e1), std::exp(-1.0), 1e-12);
  // Triangle: 2 * integral of log(x)(1 - x) over [0,1] is -3/2.
  EXPECT_NEAR(rmb_radial_p0(fx::triangle(), mu, e1), std::exp(-1.5), 1e-12);
  EXPECT_NEAR(rmb_radial_direct(fx::square(), mu, 1e-4, e1), std::exp(-1.0), 1e-4);
}

TEST(RadialMean, GaussianSquareAgainstTanhSinh) {
  const WeightedMeasure mu(Density::gaussian(2, 1.0));
  boost::math::quadrature::tanh_sinh<double> ts;
  auto w = [](double x) { return std::exp(-0.5 * x * x); };
  const double mass = ts.integrate(w, 0.0, 1.0);
  for (double p : {-0.5, 0.5, 2.0}) {
    const double num = ts.integrate([&](double x) { return std::pow(x, p) * w(x); }, 0.0, 1.0);
    EXPECT_NEAR(rmb_radial_direct(fx::square(), mu, p, e1), std::pow(num / mass, 1.0 / p), 1e-10) << p;
  }
}

TEST(RadialMean, SecondOrderSquareClosedForm) {
  // theta = (e1, e2)/sqrt 2: min chord is sqrt 2 min(x1, x2).
  Vector v(4);
  v << 1, 0, 0, 1;
  const MDirection th = MDirection::unit(v, 2);
  const auto mu = WeightedMeasure::lebesgue(2);
  for (double p : {-0.5, 1.0, 3.0}) {
    const double expect = std::sqrt(2.0) * std::pow(2.0 / ((p + 1.0) * (p + 2.0)), 1.0 / p);
    EXPECT_NEAR(rmb_radial_direct(fx::square(), mu, p, th), expect, 1e-10) << p;
    EXPECT_NEAR(rmb_radial_mellin(fx::square(), mu, p, th), expect, 1e-7) << p;
  }
}

TEST(RadialMean, DirectAndMellinAgree) {
  std::mt19937_64 rng(1);
  for (const Density& d : {Density::constant(2), Density::gaussian(2, 1.0)}) {
    const WeightedMeasure mu(d);
    for (const Polytope& k : {fx::triangle(), fx::square(), fx::pentagon()}) {
      for (int i = 0; i < 3; ++i) {
        const MDirection th = MDirection::from_flat(fx::random_unit(rng, 2), 2);
        for (double p : {-0.5, 0.5, 1.0, 2.0}) {
          const double a = rmb_radial_direct(k, mu, p, th), b = rmb_radial_mellin(k, mu, p, th);
          EXPECT_NEAR(a, b, 1e-7 * a) << p;
        }
      }
    }
  }
}

TEST(RadialMean, DirectAndMellinAgreeIn3D) {
  std::mt19937_64 rng(2);
  const auto mu = WeightedMeasure::lebesgue(3);
  const MDirection th = MDirection::from_flat(fx::random_unit(rng, 3), 3);
  for (double p : {-0.5, 1.0}) {
    const double a = rmb_radial_direct(fx::cross3(), mu, p, th), b = rmb_radial_mellin(fx::cross3(), mu, p, th);
    EXPECT_NEAR(a, b, 1e-6 * a) << p;
  }
}

TEST(RadialMean, MonotoneInP) {
  std::mt19937_64 rng(3);
  const WeightedMeasure mu(Density::gaussian(2, 1.0));
  for (int i = 0; i < 5; ++i) {
    const MDirection th = MDirection::from_flat(fx::random_unit(rng, 4), 2);
    double last = 0.0;
    for (double p : {-0.9, -0.5, 0.0, 0.5, 1.0, 4.0, 20.0}) {
      const double r = rmb_radial_direct(fx::pentagon(), mu, p, th);
      EXPECT_GT(r, last);
      last = r;
    }
    EXPECT_LT(last, diffbody_radial(fx::pentagon(), th));
  }
}

TEST(RadialMean, LargePIsStillBelowDifferenceBody) {
  // R_200 along e1 is (1/201)^{1/200} = 0.9738 for the square and 0.9516 for the triangle.
  const auto mu = WeightedMeasure::lebesgue(2);
  EXPECT_NEAR(rmb_radial_direct(fx::square(), mu, 200.0, e1), square_e1(200.0), 1e-9);
  EXPECT_NEAR(rmb_radial_direct(fx::triangle(), mu, 200.0, e1), triangle_e1(200.0), 1e-9);
  EXPECT_NEAR(rmb_radial_mellin(fx::square(), mu, 200.0, e1), square_e1(200.0), 1e-6);
  EXPECT_EQ(rmb_radial_direct(fx::square(), mu, std::numeric_limits<double>::infinity(), e1), 1.0);
}

TEST(RadialMean, LimitAtMinusOne) {
  std::mt19937_64 rng(4);
  for (const Density& d : {Density::constant(2), Density::gaussian(2, 1.0)}) {
    const WeightedMeasure mu(d);
    for (const Polytope& k : {fx::triangle(), fx::square()}) {
      for (int m = 1; m <= 2; ++m) {
        const MDirection th = MDirection::from_flat(fx::random_unit(rng, 2 * m), 2);
        const VerifyReport r = rmb_limit_neg1(k, mu, th);
        EXPECT_TRUE(r.pass) << r.get("relative_gap");
        // Gaps shrink along the sequence.
        EXPECT_LT(r.rows.back()[2], r.rows.front()[2]);
      }
    }
  }
}

TEST(RadialMean, DomainErrors) {
  const auto mu = WeightedMeasure::lebesgue(2);
  EXPECT_THROW(rmb_radial_direct(fx::square(), mu, -1.0, e1), DomainError);
  EXPECT_THROW(rmb_radial_mellin(fx::square(), mu, -1.5, e1), DomainError);
  EXPECT_THROW(rmb_radial_mellin(fx::square(), mu, 0.0, e1), DomainError);
  EXPECT_THROW(rmb_limit_neg1(fx::square(), mu, e1, {-1.2}), DomainError);
}

TEST(RadialMean, MonteCarloIntegrationAgrees) {
  const WeightedMeasure mc(Density::gaussian(2, 1.0), Integration::montecarlo(200000, 5));
  const WeightedMeasure grid(Density::gaussian(2, 1.0));
  const double a = rmb_radial_direct(fx::pentagon(), grid, 1.0, e1);
  const double b = rmb_radial_direct(fx::pentagon(), mc, 1.0, e1);
  EXPECT_NEAR(a, b, 1e-2 * a);
}

TEST(RadialMean, StarBodyInterface) {
  const RadialMeanBody body{fx::square(), WeightedMeasure::lebesgue(2), 1, 1.0, RadialMeanBody::Method::mellin};
  EXPECT_NEAR(body.star().radial(v2(1, 0)), 0.5, 1e-9);
  const Estimate v = star_volume(body.star(), sphere::trapezoid(64));
  EXPECT_GT(v.value, 0.0);
  EXPECT_LT(v.value, 4.0);
}

TEST(RadialMean, BreakpointsOfTheSquare) {
  EXPECT_TRUE(covariogram_breakpoints(fx::square(), e1, 1.0).empty());
  const MDirection th = MDirection::unit(v2(1, -1), 2);
  const auto cuts = covariogram_breakpoints(fx::triangle(), th, std::sqrt(2.0));
  for (double r : cuts) {
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, std::sqrt(2.0));
  }
}
