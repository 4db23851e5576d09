#ifndef COVBODY_VERIFY_HPP
#define COVBODY_VERIFY_HPP

#include "covariogram.hpp"
#include "measure.hpp"
#include "polytope.hpp"
#include "projection.hpp"
#include "quadrature.hpp"
#include "radialmean.hpp"
#include "report.hpp"
#include "sphere.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

namespace covbody {

/// Gamma(a+k+1) / (Gamma(a+1) Gamma(k+1)) for a, k > -1.
inline double gen_binom(double a, double k) {
  if (!(a > -1.0) || !(k > -1.0)) throw DomainError("gen_binom: arguments must exceed -1");
  if (a + k + 1.0 <= 0.0) throw DomainError("gen_binom: Gamma pole");
  using boost::math::lgamma;
  return std::exp(lgamma(a + k + 1.0) - lgamma(a + 1.0) - lgamma(k + 1.0));
}

/// binom(1/s + p, p)^{1/p}, continued to p = 0 by its limit.
inline double berwald_const_s(double s, double p) {
  if (!(s > 0.0)) throw DomainError("s-branch constant requires s > 0");
  if (!(p > -1.0)) throw DomainError("Berwald constant requires p > -1");
  if (std::abs(p) < 1e-12) return std::exp(boost::math::digamma(1.0 / s + 1.0) - boost::math::digamma(1.0));
  return std::pow(gen_binom(1.0 / s, p), 1.0 / p);
}

namespace detail {

template <class F>
double tanh_sinh01(F&& f) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double v = integrator.integrate(f, 0.0, 1.0, 1e-13, &err, &l1);
  if (!(std::isfinite(v)) || err > 1e-8 * std::max(1.0, l1)) throw NumericError("quadrature did not converge");
  return v;
}

template <class F>
double exp_sinh0inf(F&& f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double v = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13, &err, &l1);
  if (!(std::isfinite(v)) || err > 1e-8 * std::max(1.0, l1)) throw NumericError("quadrature did not converge");
  return v;
}

}  // namespace detail

/// C(p, mu, K) for an F-concave measure. For p in (-1,0) the integral is evaluated
/// after integration by parts, which removes the cancellation near t = 0.
inline double berwald_const_F(const ConcavityF& f, double p, double muk) {
  if (!(p > -1.0) || p == 0.0) throw DomainError("berwald_const_F requires p in (-1,0) or p > 0");
  if (!(muk > 0.0)) throw DomainError("berwald_const_F requires mu(K) > 0");
  const double fk = f.F(muk);
  if (p > 0.0) {
    const double v = detail::tanh_sinh01([&](double t) { return f.F_inv(fk * (1.0 - t)) * std::pow(t, p - 1.0); });
    return std::pow(p / muk * v, -1.0 / p);
  }
  const double v = detail::tanh_sinh01([&](double t) {
    const double x = f.F_inv(fk * (1.0 - t));
    const double d = f.F_prime(x);
    return std::isinf(d) ? 0.0 : std::pow(t, p) / d;
  });
  return std::pow(fk / muk * v, -1.0 / p);
}

/// C_Q(p, mu, K) for a Q-concave measure; Q = log has the closed form Gamma(1+p)^{-1/p}
/// unless `numeric` is set.
inline double berwald_const_Q(const ConcavityF& q, double p, double muk, bool numeric = false) {
  if (!(p > -1.0)) throw DomainError("berwald_const_Q requires p > -1");
  if (!(muk > 0.0)) throw DomainError("berwald_const_Q requires mu(K) > 0");
  if (q.is_log && !numeric) {
    if (std::abs(p) < 1e-12) return std::exp(-boost::math::digamma(1.0));
    return std::pow(boost::math::tgamma(1.0 + p), -1.0 / p);
  }
  if (p == 0.0) throw DomainError("berwald_const_Q requires p != 0 for a general Q");
  const double qk = q.F(muk);
  if (p > 0.0) {
    const double v = detail::exp_sinh0inf([&](double t) {
      const double x = q.F_inv(qk - t);
      return x <= 0.0 ? 0.0 : x * std::pow(t, p - 1.0);
    });
    return std::pow(p / muk * v, -1.0 / p);
  }
  const double v = detail::exp_sinh0inf([&](double t) {
    const double x = q.F_inv(qk - t);
    if (x <= 0.0) return 0.0;
    return std::pow(t, p) / q.F_prime(x);
  });
  return std::pow(v / muk, -1.0 / p);
}

/// Direction quadrature for S^{d-1}: Gauss arcs between known kinks for d = 2,
/// Fibonacci for d = 3 and seeded Monte Carlo for d >= 4.
struct DirectionOptions {
  int count_low = 1000;
  int count_high = 200000;
  int per_arc = 40;
  std::uint64_t seed = 42;
};

inline SphereQuadrature direction_rule(int d, const DirectionOptions& o, const std::vector<double>& kinks = {}) {
  if (d == 2) return kinks.empty() ? sphere::trapezoid(o.count_low) : sphere::arcs(kinks, o.per_arc);
  if (d == 3) return sphere::fibonacci(o.count_low);
  return sphere::monte_carlo(d, o.count_high, o.seed);
}

/// Sample directions on S^{nm-1} as MDirections.
inline std::vector<MDirection> sample_directions(int n, int m, int count, std::uint64_t seed) {
  SphereQuadrature q = n * m == 1 ? SphereQuadrature{} : sphere_quadrature(n * m, count, seed);
  std::vector<MDirection> out;
  if (n * m == 1) {
    out.push_back(MDirection::from_flat(Vector::Ones(1), 1));
    out.push_back(MDirection::from_flat(-Vector::Ones(1), 1));
    return out;
  }
  for (const auto& u : q.nodes) out.push_back(MDirection::from_flat(u, n));
  return out;
}

struct ChainSpec {
  enum class Branch { s, F, Q };
  Branch branch = Branch::s;
  double s = 0.5;
  std::optional<ConcavityF> f;
  std::vector<double> p_list;
  std::vector<MDirection> directions;
  /// Relative slack; negative selects 1e-6 for constant densities and 1e-2 otherwise.
  double tolerance = -1.0;
};

inline void check_chain_tag(const WeightedMeasure& mu, const ChainSpec& spec) {
  const auto& c = mu.density().concavity;
  using K = Concavity::Kind;
  bool ok = false;
  std::string want;
  switch (spec.branch) {
    case ChainSpec::Branch::s:
      want = "s-concavity with s >= " + std::to_string(spec.s);
      ok = c.kind == K::s_concave && c.s >= spec.s - 1e-12;
      break;
    case ChainSpec::Branch::Q:
      if (spec.f && spec.f->is_log) {
        want = "log-concavity";
        ok = c.kind == K::log_concave || (c.kind == K::s_concave && c.s >= 0.0);
      } else {
        want = "Q-concavity";
        ok = c.kind == K::f_concave && spec.f && c.tag == spec.f->name;
      }
      break;
    case ChainSpec::Branch::F:
      want = "F-concavity";
      if (spec.f && !spec.f->is_log && spec.f->name == "power")
        ok = c.kind == K::s_concave && c.s >= spec.f->s - 1e-12;
      else
        ok = c.kind == K::f_concave && spec.f && c.tag == spec.f->name;
      break;
  }
  if (!ok) throw InputError("chain: measure concavity tag does not provide " + want);
}

/// Inclusion chain D^m K <= C(q) R_q <= C(p) R_p <= endpoint * Pi polar, checked radially.
inline VerifyReport chain_check(const Polytope& k, const WeightedMeasure& mu, const ChainSpec& spec) {
  if (spec.p_list.empty()) throw InputError("chain: empty p list");
  for (std::size_t i = 0; i < spec.p_list.size(); ++i) {
    if (!(spec.p_list[i] > -1.0)) throw DomainError("chain: p must exceed -1");
    if (i > 0 && !(spec.p_list[i] > spec.p_list[i - 1])) throw InputError("chain: p list must be strictly increasing");
  }
  if (spec.branch == ChainSpec::Branch::s && !(spec.s > 0.0)) throw DomainError("chain: s must be positive");
  if (spec.branch != ChainSpec::Branch::s && !spec.f) throw InputError("chain: F or Q branch needs a function");
  if (spec.directions.empty()) throw InputError("chain: no directions");
  check_chain_tag(mu, spec);
  {
    auto [lo, hi] = k.bounding_box();
    const std::string why = spot_check_concavity(mu.density(), lo, hi);
    if (!why.empty()) throw InputError(why);
  }
  const int m = spec.directions.front().m();
  const double muk = integrate_over_polytope(mu, k, "chain-mass").value;
  const double tol = spec.tolerance >= 0.0 ? spec.tolerance : (mu.is_constant() ? 1e-6 : 1e-2);

  std::vector<double> ps(spec.p_list.rbegin(), spec.p_list.rend());
  std::vector<double> consts;
  for (double p : ps) {
    switch (spec.branch) {
      case ChainSpec::Branch::s:
        consts.push_back(berwald_const_s(spec.s, p));
        break;
      case ChainSpec::Branch::F:
        consts.push_back(spec.f->name == "power" && std::abs(p) < 1e-12 ? berwald_const_s(spec.f->s, 0.0)
                                                                         : berwald_const_F(*spec.f, p, muk));
        break;
      case ChainSpec::Branch::Q:
        consts.push_back(berwald_const_Q(*spec.f, p, muk));
        break;
    }
  }
  double endpoint;
  switch (spec.branch) {
    case ChainSpec::Branch::s:
      endpoint = muk / spec.s;
      break;
    case ChainSpec::Branch::F:
      endpoint = spec.f->F(muk) / spec.f->F_prime(muk);
      break;
    default:
      endpoint = 1.0 / spec.f->F_prime(muk);
      break;
  }
  const bool with_d = spec.branch != ChainSpec::Branch::Q;
  const ProjectionBody proj(k, mu, m);

  VerifyReport rep;
  rep.name = "chain";
  rep.columns.push_back("direction");
  if (with_d) rep.columns.push_back("rho_D");
  for (double p : ps) rep.columns.push_back("C*rho_R(p=" + std::to_string(p) + ")");
  rep.columns.push_back("endpoint");
  rep.columns.push_back("min_step");

  struct Row {
    std::vector<double> values;
  };
  auto rows = parallel_map<Row>(spec.directions.size(), [&](std::size_t i) {
    const MDirection& th = spec.directions[i];
    Row r;
    if (with_d) r.values.push_back(diffbody_radial(k, th));
    for (std::size_t j = 0; j < ps.size(); ++j) r.values.push_back(consts[j] * rmb_radial_direct(k, mu, ps[j], th));
    r.values.push_back(endpoint * proj.polar_radial(th));
    return r;
  });

  double worst = std::numeric_limits<double>::infinity();
  double widest = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = rows[i].values;
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
      const double rel = v[j + 1] / v[j] - 1.0;
      step = std::min(step, rel);
      widest = std::max(widest, std::abs(rel));
      if (rel < worst) {
        worst = rel;
        rep.lhs = v[j];
        rep.rhs = v[j + 1];
      }
    }
    std::vector<double> row{static_cast<double>(i)};
    row.insert(row.end(), v.begin(), v.end());
    row.push_back(step);
    rep.rows.push_back(std::move(row));
  }
  rep.ratio = rep.lhs != 0.0 ? rep.rhs / rep.lhs : 0.0;
  rep.bound = 1.0;
  rep.tolerance = tol;
  rep.margin = worst + tol;
  rep.pass = worst >= -tol;
  rep.samples = static_cast<long>(rows.size());
  rep.extra("min_relative_step", worst);
  rep.extra("max_relative_deviation", widest);
  rep.extra("mu_K", muk);
  rep.notes.push_back("radial mean radii from the direct form");
  return rep;
}

/// vol(D^m K) / vol(K)^m against binom(nm+n, n); for m = 1 also the lower bound 2^n.
inline VerifyReport rogers_shephard_check(const Polytope& k, int m, const DirectionOptions& opt = {}) {
  if (m < 1) throw InputError("rogers_shephard_check: m must be positive");
  const int n = k.dim();
  const double vk = k.volume();
  VerifyReport rep;
  rep.name = "rogers-shephard";
  rep.seed = opt.seed;
  double vd, se = 0.0;
  if (m == 1) {
    vd = difference_body(k).volume();
    rep.samples = 0;
    rep.notes.push_back("exact volume of K + (-K)");
  } else {
    const int d = n * m;
    const SphereQuadrature q = direction_rule(d, opt);
    const Estimate e = star_volume(diffbody(k, m), q);
    vd = e.value;
    se = e.stderr_;
    rep.samples = static_cast<long>(q.size());
    rep.notes.push_back(q.is_mc() ? "Monte Carlo sphere quadrature" : "deterministic sphere quadrature");
  }
  const double ratio = vd / std::pow(vk, m);
  const double upper = gen_binom(static_cast<double>(n * m), static_cast<double>(n));
  rep.lhs = vd;
  rep.rhs = std::pow(vk, m);
  rep.ratio = ratio;
  rep.bound = upper;
  rep.tolerance = m == 1 ? 1e-9 : 0.02;
  rep.margin = upper * (1.0 + rep.tolerance) - ratio;
  rep.pass = rep.margin >= 0.0;
  if (m == 1) {
    const double lower = std::pow(2.0, n);
    rep.extra("lower_bound", lower);
    rep.pass = rep.pass && ratio >= lower * (1.0 - rep.tolerance);
    rep.margin = std::min(rep.margin, ratio - lower * (1.0 - rep.tolerance));
  }
  rep.extra("stderr", se / std::pow(vk, m));
  return rep;
}

/// nu(L) for the product density on R^{nm}, by radial Gauss-Jacobi quadrature per direction.
inline Estimate nu_mass(const Density& nu, const std::function<double(const Vector&)>& radial, const SphereQuadrature& q,
                        int radial_nodes = 32) {
  const int d = q.dim;
  const auto& rule = quad::gauss_jacobi01(radial_nodes, 0.0, d - 1.0);
  return sphere_integral(q, [&](const Vector& u) {
    const double rho = radial(u);
    if (nu.kind() == Density::Kind::constant) return nu.c() * std::pow(rho, d) / d;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * nu(rho * rule.nodes[i] * u);
    return std::pow(rho, d) * acc;
  });
}

/// Integral over K of prod_i nu_i(y - K) d mu(y).
inline double translate_mass_integral(const Polytope& k, const WeightedMeasure& mu, const std::vector<Density>& nus) {
  bool all_constant = true;
  for (const auto& nu : nus) all_constant = all_constant && nu.kind() == Density::Kind::constant;
  const double muk = integrate_over_polytope(mu, k, "zhang-mass").value;
  if (all_constant) {
    double prod = 1.0;
    for (const auto& nu : nus) prod *= nu.c() * k.volume();
    return prod * muk;
  }
  const Polytope minus_k = reflect(k);
  WeightedMeasure grid_mu(mu.density(), mu.integration().kind == Integration::Kind::montecarlo
                                            ? mu.integration()
                                            : Integration::grid(8));
  return integrate_fn(grid_mu, MaybePolytope(k), [&](const Vector& y) {
           double prod = 1.0;
           for (const auto& nu : nus) {
             const WeightedMeasure wm(nu);
             prod *= integrate_over_polytope(wm, translate(minus_k, y), "zhang-translate").value;
           }
           return prod;
         }, "zhang-outer").value;
}

inline Density product_of(const std::vector<Density>& nus) {
  if (nus.size() == 1) return nus.front();
  bool all_constant = true;
  double c = 1.0;
  int d = 0;
  for (const auto& nu : nus) {
    all_constant = all_constant && nu.kind() == Density::Kind::constant;
    c *= nu.c();
    d += nu.dim();
  }
  if (all_constant) return Density::constant(d, c);
  return Density::product(nus);
}

inline void check_nus(const Polytope& k, const std::vector<Density>& nus) {
  if (nus.empty()) throw InputError("Zhang check: needs at least one measure nu_i");
  for (const auto& nu : nus) {
    if (nu.dim() != k.dim()) throw InputError("Zhang check: nu_i must live on R^n");
    if (!nu.radially_nondecreasing) throw InputError("Zhang check: nu_i must have a radially nondecreasing density");
  }
}

/// mu(K) nu((1/s) mu(K) Pi polar) / integral of prod nu_i(y-K) d mu against binom(nm + 1/s, nm).
inline VerifyReport zhang_check(const Polytope& k, const WeightedMeasure& mu, double s, const std::vector<Density>& nus,
                                const DirectionOptions& opt = {}, double tolerance = 0.02) {
  check_nus(k, nus);
  if (!(s > 0.0)) throw DomainError("Zhang check: s must be positive");
  const int n = k.dim(), m = static_cast<int>(nus.size()), d = n * m;
  const double muk = integrate_over_polytope(mu, k, "zhang-mass").value;
  const ProjectionBody proj(k, mu, m);
  const double scale = muk / s;
  const SphereQuadrature q = direction_rule(d, opt, m == 1 ? proj.kink_angles() : std::vector<double>{});
  const Density nu = product_of(nus);
  const Estimate mass =
      nu_mass(nu, [&](const Vector& u) { return scale * proj.polar_radial(MDirection::from_flat(u, n)); }, q);
  const double denom = translate_mass_integral(k, mu, nus);
  VerifyReport rep;
  rep.name = "zhang";
  rep.lhs = muk * mass.value;
  rep.rhs = denom;
  rep.ratio = rep.lhs / rep.rhs;
  rep.bound = gen_binom(1.0 / s, static_cast<double>(d));
  rep.tolerance = tolerance;
  rep.margin = rep.ratio - rep.bound * (1.0 - tolerance);
  rep.pass = rep.margin >= 0.0;
  rep.samples = static_cast<long>(q.size());
  rep.seed = opt.seed;
  rep.extra("nu_mass", mass.value);
  rep.extra("nu_mass_stderr", mass.stderr_);
  rep.extra("relative_excess", rep.ratio / rep.bound - 1.0);
  return rep;
}

/// nm * integral_0^1 F^{-1}[F(mu K) t] (1-t)^{nm-1} dt.
inline double zhang_denominator_integral(const ConcavityF& f, double muk, int nm) {
  const double fk = f.F(muk);
  return nm * detail::tanh_sinh01([&](double t) { return f.F_inv(fk * t) * std::pow(1.0 - t, nm - 1.0); });
}

/// nu((F/F')(mu K) Pi polar) >= integral prod nu_i(y-K) d mu / (nm int F^{-1}[F(mu K)t](1-t)^{nm-1} dt).
inline VerifyReport general_zhang_check(const Polytope& k, const WeightedMeasure& mu, const ConcavityF& f,
                                        const std::vector<Density>& nus, const DirectionOptions& opt = {},
                                        double tolerance = 0.02) {
  check_nus(k, nus);
  const int n = k.dim(), m = static_cast<int>(nus.size()), d = n * m;
  const double muk = integrate_over_polytope(mu, k, "zhang-mass").value;
  const ProjectionBody proj(k, mu, m);
  const double scale = f.F(muk) / f.F_prime(muk);
  const SphereQuadrature q = direction_rule(d, opt, m == 1 ? proj.kink_angles() : std::vector<double>{});
  const Estimate mass = nu_mass(product_of(nus), [&](const Vector& u) {
    return scale * proj.polar_radial(MDirection::from_flat(u, n));
  }, q);
  const double integral = translate_mass_integral(k, mu, nus);
  const double beta = zhang_denominator_integral(f, muk, d);
  VerifyReport rep;
  rep.name = "general-zhang";
  rep.lhs = mass.value;
  rep.rhs = integral / beta;
  rep.ratio = rep.lhs / rep.rhs;
  rep.bound = 1.0;
  rep.tolerance = tolerance;
  rep.margin = rep.ratio - (1.0 - tolerance);
  rep.pass = rep.margin >= 0.0;
  rep.samples = static_cast<long>(q.size());
  rep.seed = opt.seed;
  const double simplified = integral / muk;
  rep.extra("denominator_integral", beta);
  rep.extra("translate_integral", integral);
  rep.extra("simplified_rhs", simplified);
  rep.extra("simplified_pass", mass.value >= simplified * (1.0 - tolerance) ? 1.0 : 0.0);
  rep.extra("nu_mass_stderr", mass.stderr_);
  return rep;
}

}  // namespace covbody

#endif  // COVBODY_VERIFY_HPP
