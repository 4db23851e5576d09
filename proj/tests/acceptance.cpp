// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any line fails.

#include "common.hpp"

#include <covbody/cli.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace covbody;
using fx::v2;

namespace {

struct Line {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Line()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Line line{false, ""};
  try {
    line = body();
  } catch (const std::exception& e) {
    line = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string timing = std::to_string(secs).substr(0, std::to_string(secs).find('.') + 3) + " s";
  if (budget_s > 0.0) {
    timing += " of " + std::to_string(static_cast<int>(budget_s)) + " s";
    if (secs > budget_s) {
      line.pass = false;
      line.detail += "; over time budget";
    }
  }
  if (!line.pass) ++failures;
  std::printf("%s %2d %s: %s [%s]\n", line.pass ? "PASS" : "FAIL", id, title, line.detail.c_str(), timing.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<MDirection> random_dirs(std::mt19937_64& rng, int n, int m, int count) {
  std::vector<MDirection> out;
  for (int i = 0; i < count; ++i) out.push_back(MDirection::from_flat(fx::random_unit(rng, n * m), n));
  return out;
}

}  // namespace

int main() {
  const auto leb2 = WeightedMeasure::lebesgue(2);
  const WeightedMeasure gauss2(Density::gaussian(2, 1.0));

  criterion(1, "Rogers-Shephard m=1", 1.0, [&] {
    const double t = rogers_shephard_check(fx::triangle(), 1).ratio;
    const double s = rogers_shephard_check(fx::square(), 1).ratio;
    return Line{std::abs(t - 6.0) <= 1e-9 && std::abs(s - 4.0) <= 1e-9,
                fmt("triangle %.12f (6 +- 1e-9)", t) + fmt(", square %.12f (4 +- 1e-9)", s)};
  });

  criterion(2, "Rogers-Shephard m=2", 60.0, [&] {
    DirectionOptions opt;
    opt.count_high = 200000;
    const double r = rogers_shephard_check(fx::triangle(), 2, opt).ratio;
    return Line{std::abs(r - 15.0) <= 0.02 * 15.0, fmt("triangle vol4(D2K)/vol(K)^2 = %.5f (15 +- 2%%)", r)};
  });

  criterion(3, "Zhang m=1", 1.0, [&] {
    auto product = [&](const Polytope& k) {
      const ProjectionBody pb(k, leb2, 1);
      return k.volume() * star_volume(pb.polar(), sphere::arcs(pb.kink_angles(), 40)).value;
    };
    const double t = product(fx::triangle()), s = product(fx::square());
    return Line{std::abs(t - 1.5) <= 1e-6 && s > 1.5 + 1e-6,
                fmt("triangle %.9f (1.5 +- 1e-6)", t) + fmt(", square %.9f (> 1.5)", s)};
  });

  criterion(4, "Zhang m=2", 60.0, [&] {
    const ProjectionBody pb(fx::triangle(), leb2, 2);
    const double v = star_volume(pb.polar(), sphere::monte_carlo(4, 200000, 42)).value;
    const double x = 0.25 * v;
    return Line{std::abs(x - 15.0 / 16.0) <= 0.02 * 15.0 / 16.0, fmt("vol(K)^2 vol4(Pi polar 2 K) = %.5f (0.9375 +- 2%%)", x)};
  });

  criterion(5, "variational formula", 30.0, [&] {
    std::mt19937_64 rng(5);
    const std::vector<Polytope> bodies = {fx::triangle(), fx::square(), fx::pentagon()};
    double worst = 0.0;
    int cases = 0;
    for (const WeightedMeasure& mu : {leb2, gauss2}) {
      for (int m = 1; m <= 2; ++m) {
        for (int i = 0; i < 25; ++i) {
          const Polytope& k = bodies[i % bodies.size()];
          const MDirection th = MDirection::from_flat(fx::random_unit(rng, 2 * m), 2);
          worst = std::max(worst, variational_check(k, mu, th).get("relative_error"));
          ++cases;
        }
      }
    }
    return Line{worst <= 1e-3, std::to_string(cases) + " cases" + fmt(", max relative error %.3g (<= 1e-3)", worst)};
  });

  criterion(6, "Mellin identity", 120.0, [&] {
    std::mt19937_64 rng(6);
    const auto dirs = random_dirs(rng, 2, 1, 50);
    double worst = 0.0;
    for (const WeightedMeasure& mu : {leb2, gauss2})
      for (const Polytope& k : {fx::square(), fx::triangle()})
        for (double p : {-0.5, 0.5, 1.0, 2.0}) {
          auto diffs = parallel_map<double>(dirs.size(), [&](std::size_t i) {
            const double a = rmb_radial_direct(k, mu, p, dirs[i]), b = rmb_radial_mellin(k, mu, p, dirs[i]);
            return std::abs(a - b) / a;
          });
          for (double d : diffs) worst = std::max(worst, d);
        }
    return Line{worst <= 5e-3, fmt("max relative difference %.3g (<= 0.5%%)", worst)};
  });

  criterion(7, "inclusion chains", 120.0, [&] {
    std::string detail;
    bool ok = true;
    ChainSpec spec;
    spec.s = 0.5;
    spec.p_list = {-0.5, 0.0, 0.5, 1.0, 2.0};
    spec.directions = sample_directions(2, 1, 200, 7);
    const VerifyReport tri = chain_check(fx::triangle(), leb2, spec);
    ok = ok && tri.pass && tri.get("max_relative_deviation") <= 1e-6;
    detail += fmt("triangle deviation %.2g (<= 1e-6)", tri.get("max_relative_deviation"));
    const VerifyReport sq = chain_check(fx::square(), leb2, spec);
    ok = ok && sq.pass;
    ChainSpec e1 = spec;
    e1.directions = {MDirection::unit(v2(1, 0), 2)};
    const VerifyReport sq1 = chain_check(fx::square(), leb2, e1);
    ok = ok && sq1.pass && sq1.get("min_relative_step") > 1e-3;
    detail += fmt(", square step at e1 %.4f (> 1e-3)", sq1.get("min_relative_step"));
    ChainSpec q = spec;
    q.branch = ChainSpec::Branch::Q;
    q.f = ConcavityF::log();
    q.p_list = {-0.5, 0.5, 1.0, 2.0};
    const VerifyReport gq = chain_check(fx::pentagon(), gauss2, q);
    ok = ok && gq.pass;
    ChainSpec f = spec;
    f.branch = ChainSpec::Branch::F;
    f.f = ConcavityF::power(1.0 / 3.0);
    f.p_list = {-0.5, 1.0, 2.0};
    const VerifyReport lf = chain_check(fx::triangle(), WeightedMeasure(Density::linear_power(v2(1.0, 0.5), 0.2, 1.0)), f);
    ok = ok && lf.pass;
    ChainSpec two = spec;
    two.p_list = {-0.5, 1.0, 2.0};
    two.directions = sample_directions(2, 2, 200, 8);
    const VerifyReport t2 = chain_check(fx::triangle(), leb2, two);
    ok = ok && t2.pass && t2.get("max_relative_deviation") <= 1e-6;
    detail += std::string(", square ") + (sq.pass ? "holds" : "fails") + ", gaussian log " + (gq.pass ? "holds" : "fails") +
              ", linear-power F " + (lf.pass ? "holds" : "fails") + fmt(", triangle m=2 deviation %.2g", t2.get("max_relative_deviation"));
    return Line{ok, detail};
  });

  criterion(8, "limit p -> -1", 30.0, [&] {
    std::mt19937_64 rng(8);
    double worst = 0.0;
    bool ok = true;
    for (const WeightedMeasure& mu : {leb2, gauss2})
      for (const Polytope& k : {fx::triangle(), fx::square(), fx::pentagon()})
        for (int m = 1; m <= 2; ++m)
          for (const auto& th : random_dirs(rng, 2, m, 3)) {
            const VerifyReport r = rmb_limit_neg1(k, mu, th, {-0.999}, 0.01);
            ok = ok && r.pass;
            worst = std::max(worst, r.get("relative_gap"));
          }
    return Line{ok, fmt("max relative gap at p = -0.999: %.3g (<= 1%%)", worst)};
  });

  criterion(9, "limit p -> infinity", 0.0, [&] {
    std::mt19937_64 rng(9);
    double worst = 1.0;
    for (const WeightedMeasure& mu : {leb2, gauss2})
      for (const Polytope& k : {fx::triangle(), fx::square(), fx::pentagon()})
        for (int m = 1; m <= 2; ++m) {
          auto dirs = random_dirs(rng, 2, m, 3);
          if (m == 1) dirs.push_back(MDirection::unit(v2(1, 0), 2));
          for (const auto& th : dirs) {
            const double r = rmb_radial_direct(k, mu, 200.0, th) / diffbody_radial(k, th);
            worst = std::min(worst, r);
          }
        }
    return Line{worst >= 0.99, fmt("min rho_R200 / rho_D = %.4f (>= 0.99)", worst)};
  });

  criterion(10, "linear covariance", 0.0, [&] {
    std::mt19937_64 rng(10);
    double worst_c = 0.0, worst_g = 0.0;
    for (int i = 0; i < 20; ++i) {
      const LinearMap t(fx::random_matrix(rng, 2));
      const auto dirs = random_dirs(rng, 2, 1 + i % 2, 50);
      worst_c = std::max(worst_c, linear_covariance_check(fx::pentagon(), leb2, t, dirs).get("max_relative_error"));
      worst_g = std::max(worst_g, linear_covariance_check(fx::pentagon(), gauss2, t, dirs).get("max_relative_error"));
    }
    return Line{worst_c <= 1e-6 && worst_g <= 1e-3,
                fmt("constant %.2g (<= 1e-6)", worst_c) + fmt(", gaussian %.2g (<= 1e-3)", worst_g)};
  });

  criterion(11, "simplex covariogram affinity", 0.0, [&] {
    std::mt19937_64 rng(11);
    const auto& rule = quad::gauss_legendre01(16);
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
      const Polytope k = named::simplex(n);
      const auto mu = WeightedMeasure::lebesgue(n);
      for (int m = 1; m <= 2; ++m) {
        if (n * m < 2) continue;
        for (const auto& th : random_dirs(rng, n, m, 5)) {
          const double rho = diffbody_radial(k, th);
          for (double t : rule.nodes) {
            const double g = covariogram(k, mu, th.scaled(t * rho)).value;
            worst = std::max(worst, std::abs(std::pow(g, 1.0 / n) - std::pow(k.volume(), 1.0 / n) * (1.0 - t)));
          }
        }
      }
    }
    return Line{worst <= 1e-9, fmt("max deviation from the roof %.2g (<= 1e-9)", worst)};
  });

  criterion(12, "constants", 0.0, [&] {
    double worst_f = 0.0, worst_q = 0.0;
    for (double s : {0.5, 1.0 / 3.0, 0.25})
      for (double p : {-0.5, 0.5, 1.0, 2.0, 3.0}) {
        const double a = std::pow(gen_binom(1.0 / s, p), 1.0 / p);
        worst_f = std::max(worst_f, std::abs(a - berwald_const_F(ConcavityF::power(s), p, 1.0)) / a);
      }
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
      const double e = std::pow(std::tgamma(1.0 + p), -1.0 / p);
      worst_q = std::max(worst_q, std::abs(berwald_const_Q(ConcavityF::log(), p, 1.0) - e));
    }
    return Line{worst_f <= 1e-9 && worst_q <= 1e-9, fmt("F vs binomial %.2g", worst_f) + fmt(", Q vs gamma %.2g (<= 1e-9)", worst_q)};
  });

  criterion(13, "chord integrals", 0.0, [&] {
    const StarBodyFn ball{2, [](const Vector&) { return 1.3; }};
    const auto q = sphere::trapezoid(256);
    const std::function<double(double)> h1 = [](double t) { return t; };
    const std::function<double(double)> h2 = [](double t) { return t * t; };
    const KernelG g = KernelG::power(2, 1.0);
    const ConcaveRayFn aff = cli::fixtures::affine(ball, 0.8);
    const double lo = chord_lower_check(aff, h2, g, q).ratio, up = chord_upper_check(aff, h2, g, q).ratio;
    const ConcaveRayFn cc = cli::fixtures::concave(ball, 0.8, 0.5);
    const double slo = chord_lower_check(cc, h1, g, q).ratio, sup = chord_upper_check(cc, h1, g, q).ratio;
    // f = g^{1/2}, h = t^2, G = r: the L-tilde term is the dual volume of (vol(K)/s) Pi polar K.
    const Polytope tri = fx::triangle();
    const VerifyReport cov = chord_upper_check(cli::fixtures::covariogram_power(tri, leb2, 1, 0.5), h2, g, sphere::trapezoid(256));
    const double s = 0.5, muk = tri.volume();
    const double zhang = muk * (s / muk) * (s / muk) * 2.0 * cov.get("dual_volume_tilde");
    const bool ok = std::abs(lo - 1.0) <= 1e-6 && std::abs(up - 1.0) <= 1e-6 && slo > 1.01 && sup < 0.99 &&
                    std::abs(cov.ratio - 1.0) <= 0.01 && std::abs(zhang - 1.5) <= 0.015;
    return Line{ok, fmt("affine lower %.9f", lo) + fmt(", upper %.9f (1 +- 1e-6)", up) + fmt("; concave lower %.4f", slo) +
                        fmt(", upper %.4f (1%% margin)", sup) + fmt("; covariogram ratio %.5f", cov.ratio) +
                        fmt(", vol(K) vol(Pi polar K) %.5f (1.5 +- 1%%)", zhang)};
  });

  criterion(14, "oracle agreement", 0.0, [&] {
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      std::mt19937_64 rng(1400 + i);
      const Polytope k = i % 5 == 4 ? fx::cross3() : Polytope::from_vertices(fx::random_polygon(rng, 5 + i % 4));
      const int n = k.dim();
      const WeightedMeasure mu = i % 2 ? WeightedMeasure(Density::gaussian(n, 0.8)) : WeightedMeasure::lebesgue(n);
      Vector x = Vector::Zero(n);
      double exact;
      if (i % 3 == 2) {
        x = 0.4 * fx::random_unit(rng, n);
        exact = covariogram(k, mu, {x}).value;
      } else {
        exact = i % 2 ? integrate_over_polytope(mu, k).value : k.volume();
      }
      auto [lo, hi] = k.bounding_box();
      const Estimate o = oracle::mc_measure([&](const Vector& y) { return mu(y); },
                                            [&](const Vector& y) { return k.contains(y, 0.0) && k.contains(y - x, 0.0); },
                                            lo, hi, 200000, 1400 + i);
      const double z = std::abs(o.value - exact) / o.stderr_;
      worst = std::max(worst, z);
      if (z > 3.0) ++bad;
    }
    return Line{bad == 0, std::to_string(bad) + " of 20 outside 3 sigma" + fmt(", max |z| %.2f", worst)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
