#ifndef COVBODY_SPHERE_HPP
#define COVBODY_SPHERE_HPP

#include "parallel.hpp"
#include "quadrature.hpp"
#include "types.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace covbody {

/// Star body in R^d given by its radial function on unit vectors.
struct StarBodyFn {
  int dim = 0;
  std::function<double(const Vector&)> radial;
};

/// Nodes and weights on S^{d-1}; weights sum to |S^{d-1}|.
struct SphereQuadrature {
  enum class Kind { fibonacci, mc, angular };
  int dim = 0;
  Kind kind = Kind::angular;
  std::uint64_t seed = 0;
  std::vector<Vector> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  bool is_mc() const { return kind == Kind::mc; }
};

namespace sphere {

/// Equispaced angles on S^1 (trapezoid rule), exact for trigonometric polynomials of degree < count.
inline SphereQuadrature trapezoid(int count) {
  SphereQuadrature q;
  q.dim = 2;
  q.kind = SphereQuadrature::Kind::angular;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * pi * (i + 0.5) / count;
    Vector u(2);
    u << std::cos(t), std::sin(t);
    q.nodes.push_back(u);
    q.weights.push_back(2.0 * pi / count);
  }
  return q;
}

/// Composite Gauss-Legendre on S^1 with panels split at the given angles, for
/// integrands that are smooth between known kinks.
inline SphereQuadrature arcs(std::vector<double> breaks, int per_arc) {
  for (double& b : breaks) {
    b = std::fmod(b, 2.0 * pi);
    if (b < 0.0) b += 2.0 * pi;
  }
  breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts;
  for (double b : breaks)
    if (cuts.empty() || b - cuts.back() > 1e-13) cuts.push_back(b);
  cuts.push_back(2.0 * pi);
  SphereQuadrature q;
  q.dim = 2;
  q.kind = SphereQuadrature::Kind::angular;
  const auto& rule = quad::gauss_legendre01(per_arc);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], len = cuts[k + 1] - cuts[k];
    if (len <= 1e-13) continue;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = a + len * rule.nodes[i];
      Vector u(2);
      u << std::cos(t), std::sin(t);
      q.nodes.push_back(u);
      q.weights.push_back(len * rule.weights[i]);
    }
  }
  return q;
}

/// Spherical Fibonacci points on S^2 with equal weights.
inline SphereQuadrature fibonacci(int count) {
  SphereQuadrature q;
  q.dim = 3;
  q.kind = SphereQuadrature::Kind::fibonacci;
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * pi * std::fmod(i / golden, 1.0);
    Vector u(3);
    u << r * std::cos(phi), r * std::sin(phi), z;
    q.nodes.push_back(u);
    q.weights.push_back(4.0 * pi / count);
  }
  return q;
}

/// Uniform random directions (normalized gaussians) with equal weights.
inline SphereQuadrature monte_carlo(int d, int count, std::uint64_t seed) {
  SphereQuadrature q;
  q.dim = d;
  q.kind = SphereQuadrature::Kind::mc;
  q.seed = seed;
  Rng rng(derive_seed(seed, "sphere", static_cast<std::uint64_t>(d)));
  std::normal_distribution<double> g(0.0, 1.0);
  const double w = sphere_area(d) / count;
  for (int i = 0; i < count; ++i) {
    Vector u(d);
    double len;
    do {
      for (int k = 0; k < d; ++k) u(k) = g(rng);
      len = u.norm();
    } while (len < 1e-12);
    q.nodes.push_back(u / len);
    q.weights.push_back(w);
  }
  return q;
}

}  // namespace sphere

/// Default rule per dimension: trapezoid for d = 2, Fibonacci for d = 3, Monte Carlo beyond.
inline SphereQuadrature sphere_quadrature(int d, int count, std::uint64_t seed = 42) {
  if (d < 2) throw InputError("sphere_quadrature: dimension must be at least 2");
  if (count < 1) throw InputError("sphere_quadrature: count must be positive");
  if (d == 2) return sphere::trapezoid(count);
  if (d == 3) return sphere::fibonacci(count);
  return sphere::monte_carlo(d, count, seed);
}

/// Integral of f over the sphere, with a standard error for Monte Carlo rules.
template <class F>
Estimate sphere_integral(const SphereQuadrature& q, F&& f) {
  std::vector<double> vals = parallel_map<double>(q.size(), [&](std::size_t i) { return f(q.nodes[i]); });
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    sum += q.weights[i] * vals[i];
    sq += vals[i] * vals[i];
  }
  Estimate e{sum, 0.0};
  if (q.is_mc() && q.size() > 1) {
    const double nn = static_cast<double>(q.size());
    const double mean = sum / sphere_area(q.dim);
    const double var = std::max(sq / nn - mean * mean, 0.0) * nn / (nn - 1.0);
    e.stderr_ = sphere_area(q.dim) * std::sqrt(var / nn);
  }
  return e;
}

/// vol_d(S) = (1/d) * integral of rho^d over the sphere.
inline Estimate star_volume(const StarBodyFn& s, const SphereQuadrature& q) {
  if (s.dim != q.dim) throw InputError("star_volume: dimension mismatch");
  const int d = s.dim;
  Estimate e = sphere_integral(q, [&](const Vector& u) {
    const double r = s.radial(u);
    if (!(r > 0.0)) throw InputError("star_volume: nonpositive radial value");
    return std::pow(r, d);
  });
  return {e.value / d, e.stderr_ / d};
}

}  // namespace covbody

#endif  // COVBODY_SPHERE_HPP
