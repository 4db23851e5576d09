#ifndef COVBODY_GENVOL_HPP
#define COVBODY_GENVOL_HPP

#include "measure.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "report.hpp"
#include "sphere.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

namespace covbody {

/// Kernel G(r, theta) > 0 with its homogeneity side relative to u^alpha, u in [0,1].
struct KernelG {
  enum class Side { lower, upper, both };
  int dim = 0;
  double alpha = 0.0;
  Side side = Side::both;
  std::function<double(double, const Vector&)> eval;

  /// G = c r^alpha, homogeneous of degree alpha.
  static KernelG power(int d, double alpha, double c = 1.0) {
    if (!(alpha > -1.0)) throw DomainError("kernel exponent must exceed -1");
    return {d, alpha, Side::both, [alpha, c](double r, const Vector&) { return c * std::pow(r, alpha); }};
  }

  /// G = r^alpha phi(r theta). A radially nondecreasing phi gives G(ur) <= u^alpha G(r)
  /// (upper side); a gaussian is radially nonincreasing and gives the lower side.
  static KernelG power_density(double alpha, const Density& phi) {
    if (!(alpha > -1.0)) throw DomainError("kernel exponent must exceed -1");
    Side side;
    if (phi.kind() == Density::Kind::constant) side = Side::both;
    else if (phi.radially_nondecreasing) side = Side::upper;
    else if (phi.kind() == Density::Kind::gaussian) side = Side::lower;
    else throw InputError("power-density kernel: density is neither radially nondecreasing nor nonincreasing");
    return {phi.dim(), alpha, side, [alpha, phi](double r, const Vector& u) { return std::pow(r, alpha) * phi(r * u); }};
  }

  double operator()(double r, const Vector& u) const { return eval(r, u); }
};

/// Spot-checks the declared side of G at random (u, r, theta); returns a diagnostic or "".
inline std::string spot_check_kernel(const KernelG& g, double r_max, std::uint64_t seed = 42, int count = 100) {
  if (g.side == KernelG::Side::both) return {};
  Rng rng(derive_seed(seed, "kernel"));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    const double u = uni(rng), r = r_max * (0.01 + 0.99 * uni(rng));
    Vector th(g.dim);
    for (int k = 0; k < g.dim; ++k) th(k) = gauss(rng);
    th /= th.norm();
    const double lhs = g(u * r, th), rhs = std::pow(u, g.alpha) * g(r, th);
    const double slack = 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
    if (g.side == KernelG::Side::lower && lhs < rhs - slack) return "kernel violates the lower homogeneity side";
    if (g.side == KernelG::Side::upper && lhs > rhs + slack) return "kernel violates the upper homogeneity side";
  }
  return {};
}

namespace detail {

// Integral of G(r, u) over [0, rho] with the r^alpha factor absorbed in a Gauss-Jacobi rule.
inline double kernel_ray_integral(const KernelG& g, double rho, const Vector& u, int nodes = 32) {
  const auto& rule = quad::gauss_jacobi01(nodes, 0.0, g.alpha);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rho * rule.nodes[i];
    acc += rule.weights[i] * g(r, u) / std::pow(r, g.alpha);
  }
  return std::pow(rho, g.alpha + 1.0) * acc;
}

}  // namespace detail

/// (1/d) sum_i w_i integral_0^{rho_L(u_i)} G(r, u_i) dr.
inline Estimate dual_volume(const KernelG& g, const StarBodyFn& l, const SphereQuadrature& q, int nodes = 32) {
  if (g.dim != l.dim || l.dim != q.dim) throw InputError("dual_volume: dimension mismatch");
  Estimate e = sphere_integral(q, [&](const Vector& u) {
    const double v = detail::kernel_ray_integral(g, l.radial(u), u, nodes);
    if (!std::isfinite(v)) throw NumericError("dual_volume: divergent ray integral");
    return v;
  });
  return {e.value / g.dim, e.stderr_ / g.dim};
}

/// Nonnegative f(r, theta) supported on L and concave along rays.
struct ConcaveRayFn {
  StarBodyFn support;
  std::function<double(double, const Vector&)> eval;
  std::function<double(const Vector&)> value_at_zero;
  std::function<double(const Vector&)> ray_derivative_at_zero;
  /// Optional radii in (0, rho_L) where f is not smooth, per direction.
  std::function<std::vector<double>(const Vector&)> breakpoints;

  double operator()(double r, const Vector& u) const { return eval(r, u); }
};

struct ChordOptions {
  int ray_nodes = 32;
  double tolerance = 1e-3;
  /// Threshold on |df/dr at 0| for membership in Omega_f.
  double omega_threshold = 1e-8;
};

namespace detail {

// integral_0^{rho_L} h(f(r,u)) G(r,u) dr, split at the breakpoints of f.
inline double chord_ray_integral(const ConcaveRayFn& f, const std::function<double(double)>& h, const KernelG& g,
                                 const Vector& u, int nodes) {
  const double rho = f.support.radial(u);
  std::vector<double> cuts{0.0};
  if (f.breakpoints)
    for (double r : f.breakpoints(u))
      if (r > 0.0 && r < rho) cuts.push_back(r);
  cuts.push_back(rho);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (b - a <= 0.0) continue;
    if (k == 0) {
      const auto& rule = quad::gauss_jacobi01(nodes, 0.0, g.alpha);
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = b * rule.nodes[i];
        acc += rule.weights[i] * h(f(r, u)) * g(r, u) / std::pow(r, g.alpha);
      }
      total += std::pow(b, g.alpha + 1.0) * acc;
    } else {
      total += quad::integrate([&](double r) { return h(f(r, u)) * g(r, u); }, a, b, nodes);
    }
  }
  return total;
}

// (alpha + 1) integral_0^1 h(c tau) (1 - tau)^alpha d tau.
inline double beta_integral(const std::function<double(double)>& h, double c, double alpha, int nodes) {
  const auto& rule = quad::gauss_jacobi01(nodes, alpha, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * h(c * rule.nodes[i]);
  return (alpha + 1.0) * acc;
}

}  // namespace detail

/// Lower chord inequality: LHS >= beta_alpha * sum_i w_i integral_0^{rho_L} G.
inline VerifyReport chord_lower_check(const ConcaveRayFn& f, const std::function<double(double)>& h, const KernelG& g,
                                      const SphereQuadrature& q, const ChordOptions& opt = {}) {
  if (g.side == KernelG::Side::upper) throw InputError("chord_lower_check: kernel has the upper homogeneity side");
  if (g.dim != q.dim || f.support.dim != q.dim) throw InputError("chord_lower_check: dimension mismatch");
  struct Item {
    double lhs, beta, vol;
  };
  auto items = parallel_map<Item>(q.size(), [&](std::size_t i) {
    const Vector& u = q.nodes[i];
    const double rho = f.support.radial(u);
    return Item{detail::chord_ray_integral(f, h, g, u, opt.ray_nodes),
                detail::beta_integral(h, f.value_at_zero(u), g.alpha, opt.ray_nodes),
                detail::kernel_ray_integral(g, rho, u, opt.ray_nodes)};
  });
  double lhs = 0.0, vol = 0.0, beta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < items.size(); ++i) {
    lhs += q.weights[i] * items[i].lhs;
    vol += q.weights[i] * items[i].vol;
    beta = std::min(beta, items[i].beta);
  }
  VerifyReport rep;
  rep.name = "chord-lower";
  rep.lhs = lhs;
  rep.rhs = beta * vol;
  rep.ratio = lhs / rep.rhs;
  rep.bound = 1.0;
  rep.tolerance = opt.tolerance;
  rep.margin = rep.ratio - (1.0 - opt.tolerance);
  rep.pass = rep.margin >= 0.0;
  rep.samples = static_cast<long>(q.size());
  rep.extra("beta_alpha", beta);
  rep.extra("dual_volume", vol / g.dim);
  return rep;
}

/// Upper chord inequality with the split into Omega_f and its complement.
inline VerifyReport chord_upper_check(const ConcaveRayFn& f, const std::function<double(double)>& h, const KernelG& g,
                                      const SphereQuadrature& q, const ChordOptions& opt = {}) {
  if (g.side == KernelG::Side::lower) throw InputError("chord_upper_check: kernel has the lower homogeneity side");
  if (g.dim != q.dim || f.support.dim != q.dim) throw InputError("chord_upper_check: dimension mismatch");
  struct Item {
    double lhs = 0.0, f0 = 0.0, df0 = 0.0, beta = 0.0, rho_tilde = 0.0, tilde_vol = 0.0, omega_term = 0.0;
    bool omega = false;
    bool max_at_zero = true;
  };
  auto items = parallel_map<Item>(q.size(), [&](std::size_t i) {
    const Vector& u = q.nodes[i];
    Item it;
    const double rho = f.support.radial(u);
    it.lhs = detail::chord_ray_integral(f, h, g, u, opt.ray_nodes);
    it.f0 = f.value_at_zero(u);
    it.df0 = f.ray_derivative_at_zero(u);
    for (int k = 1; k <= 8; ++k)
      if (f(rho * k / 9.0, u) > it.f0 * (1.0 + 1e-9) + 1e-12) it.max_at_zero = false;
    it.omega = std::abs(it.df0) < opt.omega_threshold;
    if (it.omega) {
      it.omega_term = h(it.f0) * detail::kernel_ray_integral(g, rho, u, opt.ray_nodes);
    } else {
      it.beta = detail::beta_integral(h, it.f0, g.alpha, opt.ray_nodes);
      it.rho_tilde = -it.f0 / it.df0;
      it.tilde_vol = detail::kernel_ray_integral(g, it.rho_tilde, u, opt.ray_nodes);
    }
    return it;
  });
  double lhs = 0.0, tilde = 0.0, omega_part = 0.0, beta = 0.0;
  long omega_count = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (!it.max_at_zero) throw InputError("chord_upper_check: f does not attain its ray maximum at the origin");
    lhs += q.weights[i] * it.lhs;
    if (it.omega) {
      omega_part += q.weights[i] * it.omega_term;
      ++omega_count;
    } else {
      if (!(it.rho_tilde > 0.0)) throw InputError("chord_upper_check: ray derivative at 0 must be negative");
      tilde += q.weights[i] * it.tilde_vol;
      beta = std::max(beta, it.beta);
    }
  }
  VerifyReport rep;
  rep.name = "chord-upper";
  rep.lhs = lhs;
  rep.rhs = beta * tilde + omega_part;
  rep.ratio = lhs / rep.rhs;
  rep.bound = 1.0;
  rep.tolerance = opt.tolerance;
  rep.margin = (1.0 + opt.tolerance) - rep.ratio;
  rep.pass = rep.margin >= 0.0;
  rep.samples = static_cast<long>(q.size());
  rep.extra("beta_b", beta);
  rep.extra("omega_count", static_cast<double>(omega_count));
  rep.extra("tilde_term", beta * tilde);
  rep.extra("omega_term", omega_part);
  if (omega_count == 0) {
    rep.extra("dual_volume_tilde", tilde / g.dim);
    rep.notes.push_back("Omega_f empty: bound is n beta_b times the dual volume of L-tilde");
  }
  return rep;
}

}  // namespace covbody

#endif  // COVBODY_GENVOL_HPP
