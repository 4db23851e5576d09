#include "common.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/digamma.hpp>

using namespace covbody;
using fx::v2;

TEST(Constants, GeneralizedBinomialOnIntegers) {
  // gen_binom(a, k) = binom(a + k, k).
  EXPECT_NEAR(gen_binom(2, 2), 6.0, 1e-12);
  EXPECT_NEAR(gen_binom(4, 2), 15.0, 1e-12);
  EXPECT_NEAR(gen_binom(7, 3), 120.0, 1e-10);
  EXPECT_NEAR(gen_binom(2, 0), 1.0, 1e-15);
  // binom(1/2, 1/2) = Gamma(2) / Gamma(3/2)^2 = 4 / pi.
  EXPECT_NEAR(gen_binom(0.5, 0.5), 4.0 / pi, 1e-14);
  EXPECT_THROW(gen_binom(-1.5, 1.0), DomainError);
}

TEST(Constants, PowerFunctionMatchesBinomialForm) {
  for (double s : {0.5, 1.0 / 3.0, 0.25}) {
    for (double muk : {0.5, 1.0, 2.7}) {
      for (double p : {-0.5, 0.5, 1.0, 2.0, 3.0}) {
        const double a = berwald_const_s(s, p);
        const double b = berwald_const_F(ConcavityF::power(s), p, muk);
        EXPECT_NEAR(a, b, 1e-9 * a) << s << " " << muk << " " << p;
        EXPECT_NEAR(a, std::pow(gen_binom(1.0 / s, p), 1.0 / p), 1e-12 * a);
      }
    }
  }
  EXPECT_NEAR(berwald_const_F(ConcavityF::power(0.5), 1.0, 0.5), 3.0, 1e-12);
  EXPECT_NEAR(berwald_const_s(0.5, -0.5), 64.0 / 9.0, 1e-12);
}

TEST(Constants, PowerLimitAtZero) {
  const double s = 0.5;
  const double lim = std::exp(boost::math::digamma(1.0 / s + 1.0) - boost::math::digamma(1.0));
  EXPECT_NEAR(berwald_const_s(s, 0.0), lim, 1e-12);
  EXPECT_NEAR(berwald_const_s(s, 1e-6), lim, 1e-5);
}

TEST(Constants, LogFunctionIsGamma) {
  for (double p : {0.5, 1.0, 2.0, 3.0, -0.5}) {
    const double expect = std::pow(std::tgamma(1.0 + p), -1.0 / p);
    EXPECT_NEAR(berwald_const_Q(ConcavityF::log(), p, 0.7), expect, 1e-9 * expect);
    EXPECT_NEAR(berwald_const_Q(ConcavityF::log(), p, 0.7, true), expect, 1e-9 * expect) << p;
  }
  EXPECT_NEAR(berwald_const_Q(ConcavityF::log(), 0.0, 1.0), std::exp(-boost::math::digamma(1.0)), 1e-12);
}

TEST(Chain, TriangleIsEquality) {
  ChainSpec spec;
  spec.s = 0.5;
  spec.p_list = {-0.5, 0.0, 1.0, 2.0};
  spec.directions = sample_directions(2, 1, 60, 42);
  const VerifyReport r = chain_check(fx::triangle(), WeightedMeasure::lebesgue(2), spec);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.get("max_relative_deviation"), 1e-6);
}

TEST(Chain, SquareIsStrictAlongE1) {
  ChainSpec spec;
  spec.s = 0.5;
  spec.p_list = {-0.5, 1.0, 2.0};
  spec.directions = {MDirection::unit(v2(1, 0), 2)};
  const VerifyReport r = chain_check(fx::square(), WeightedMeasure::lebesgue(2), spec);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.get("min_relative_step"), 1e-3);
}

TEST(Chain, SecondOrderTriangleIsEquality) {
  ChainSpec spec;
  spec.s = 0.5;
  spec.p_list = {-0.5, 1.0};
  spec.directions = sample_directions(2, 2, 20, 7);
  const VerifyReport r = chain_check(fx::triangle(), WeightedMeasure::lebesgue(2), spec);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.get("max_relative_deviation"), 1e-6);
}

TEST(Chain, GaussianLogBranch) {
  ChainSpec spec;
  spec.branch = ChainSpec::Branch::Q;
  spec.f = ConcavityF::log();
  spec.p_list = {-0.5, 0.5, 1.0, 2.0};
  spec.directions = sample_directions(2, 1, 20, 3);
  const VerifyReport r = chain_check(fx::pentagon(), WeightedMeasure(Density::gaussian(2, 1.0)), spec);
  EXPECT_TRUE(r.pass) << r.get("min_relative_step");
  EXPECT_EQ(r.columns.front(), "direction");
  EXPECT_NE(r.columns[1], "rho_D");
}

TEST(Chain, LinearPowerDensityFBranch) {
  ChainSpec spec;
  spec.branch = ChainSpec::Branch::F;
  spec.f = ConcavityF::power(1.0 / 3.0);
  spec.p_list = {-0.5, 1.0, 2.0};
  spec.directions = sample_directions(2, 1, 16, 5);
  const WeightedMeasure mu(Density::linear_power(v2(1.0, 0.5), 0.2, 1.0));
  const VerifyReport r = chain_check(fx::triangle(), mu, spec);
  EXPECT_TRUE(r.pass) << r.get("min_relative_step");
}

TEST(Chain, RejectsInconsistentTags) {
  ChainSpec spec;
  spec.s = 0.5;
  spec.p_list = {1.0};
  spec.directions = sample_directions(2, 1, 4, 1);
  EXPECT_THROW(chain_check(fx::square(), WeightedMeasure(Density::gaussian(2)), spec), InputError);
  Density lying = Density::gaussian(2);
  lying.concavity = Concavity::power(0.5);
  try {
    chain_check(fx::square(), WeightedMeasure(lying), spec);
    FAIL() << "expected an input error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("spot-check"), std::string::npos);
  }
  spec.p_list = {2.0, 1.0};
  EXPECT_THROW(chain_check(fx::square(), WeightedMeasure::lebesgue(2), spec), InputError);
  spec.p_list = {-1.0, 1.0};
  EXPECT_THROW(chain_check(fx::square(), WeightedMeasure::lebesgue(2), spec), DomainError);
}

TEST(RogersShephard, FirstOrderExact) {
  const VerifyReport t = rogers_shephard_check(fx::triangle(), 1);
  EXPECT_NEAR(t.ratio, 6.0, 1e-9);
  EXPECT_TRUE(t.pass);
  const VerifyReport s = rogers_shephard_check(fx::square(), 1);
  EXPECT_NEAR(s.ratio, 4.0, 1e-9);
  EXPECT_TRUE(s.pass);
  const VerifyReport c = rogers_shephard_check(fx::cross3(), 1);
  EXPECT_NEAR(c.ratio, 8.0, 1e-9);
  EXPECT_NEAR(rogers_shephard_check(named::simplex(3), 1).ratio, 20.0, 1e-9);
}

TEST(RogersShephard, SecondOrderSegmentIsExactIn2D) {
  // n = 1, m = 2: D^2 K for K = [0,1] is a hexagon of area 3 = binom(3, 1).
  DirectionOptions opt;
  opt.count_low = 4096;
  const VerifyReport r = rogers_shephard_check(fx::segment(), 2, opt);
  EXPECT_NEAR(r.ratio, 3.0, 1e-4);
}

TEST(RogersShephard, SecondOrderTriangleCoarse) {
  DirectionOptions opt;
  opt.count_high = 20000;
  const VerifyReport r = rogers_shephard_check(fx::triangle(), 2, opt);
  EXPECT_NEAR(r.ratio, 15.0, 0.05 * 15.0);
}

TEST(Zhang, FirstOrderFixtures) {
  const VerifyReport t = zhang_check(fx::triangle(), WeightedMeasure::lebesgue(2), 0.5, {Density::constant(2)});
  EXPECT_NEAR(t.lhs, 1.5, 1e-6);
  EXPECT_NEAR(t.ratio, 6.0, 6e-6);
  EXPECT_TRUE(t.pass);
  const VerifyReport s = zhang_check(fx::square(), WeightedMeasure::lebesgue(2), 0.5, {Density::constant(2)});
  // vol(K) vol(Pi polar K) = 2 for the square; the report scales Pi polar by mu(K)/s = 2.
  EXPECT_NEAR(s.get("nu_mass") / 4.0, 2.0, 1e-6);
  EXPECT_NEAR(s.ratio, 8.0, 1e-5);
}

TEST(Zhang, NonConstantNu) {
  const Density nu = Density::linear_power(v2(1.0, 1.0), 0.0, 1.0);
  const VerifyReport r = zhang_check(fx::triangle(), WeightedMeasure::lebesgue(2), 0.5, {nu});
  EXPECT_TRUE(r.pass) << r.ratio;
}

TEST(Zhang, GeneralFormForGaussian) {
  const WeightedMeasure mu(Density::gaussian(2, 1.0));
  const VerifyReport r = general_zhang_check(fx::pentagon(), mu, ConcavityF::log(), {Density::constant(2)});
  EXPECT_TRUE(r.pass) << r.ratio;
  EXPECT_EQ(r.get("simplified_pass"), 1.0);
}

TEST(Zhang, GeneralFormReducesToSForm) {
  const auto mu = WeightedMeasure::lebesgue(2);
  const VerifyReport g = general_zhang_check(fx::triangle(), mu, ConcavityF::power(0.5), {Density::constant(2)});
  EXPECT_NEAR(g.ratio, 1.0, 1e-6);
}

TEST(Zhang, RejectsDecreasingNu) {
  EXPECT_THROW(zhang_check(fx::triangle(), WeightedMeasure::lebesgue(2), 0.5, {Density::gaussian(2)}), InputError);
  EXPECT_THROW(zhang_check(fx::triangle(), WeightedMeasure::lebesgue(2), 0.5, {}), InputError);
}

TEST(Directions, SampleDirectionsAreUnit) {
  for (const auto& th : sample_directions(3, 2, 50, 9)) EXPECT_TRUE(th.is_unit());
  EXPECT_EQ(sample_directions(1, 1, 10, 1).size(), 2u);
}
