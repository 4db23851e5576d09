#ifndef COVBODY_QUADRATURE_HPP
#define COVBODY_QUADRATURE_HPP

// Gaussian rules via Golub-Welsch, and collapsed (Duffy) product rules on simplices.

#include "types.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace covbody::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Nodes and weights from the three-term recurrence: diagonal a, off-diagonal sqrt(b).
inline Rule golub_welsch(const std::vector<double>& a, const std::vector<double>& b, double mu0) {
  const int n = static_cast<int>(a.size());
  Matrix J = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = a[i];
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = std::sqrt(b[i + 1]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  if (es.info() != Eigen::Success) throw NumericError("Golub-Welsch eigen solve failed");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v * v;
  }
  return r;
}

inline Rule make_jacobi01(int n, double alpha, double beta) {
  // Jacobi weight (1-t)^alpha (1+t)^beta on [-1,1], mapped to [0,1].
  std::vector<double> a(n), b(n, 0.0);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0) a[k] = (beta - alpha) / (ab + 2.0);
    else a[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (k == 1) {
      b[k] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else if (k > 1) {
      b[k] = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
  }
  const double mu01 = std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  Rule r = golub_welsch(a, b, 1.0);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = 0.5 * (1.0 + r.nodes[i]);
    r.weights[i] *= mu01;
  }
  return r;
}

inline Rule make_laguerre(int n, double alpha) {
  std::vector<double> a(n), b(n, 0.0);
  for (int k = 0; k < n; ++k) {
    a[k] = 2.0 * k + alpha + 1.0;
    if (k > 0) b[k] = k * (k + alpha);
  }
  return golub_welsch(a, b, std::tgamma(alpha + 1.0));
}

template <class Key, class Make>
const Rule& cached(std::map<Key, std::unique_ptr<Rule>>& cache, const Key& key, Make make) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Rule>(make())).first;
  return *it->second;
}

}  // namespace detail

/// Gauss rule on [0,1] for the weight (1-x)^alpha x^beta, alpha, beta > -1.
inline const Rule& gauss_jacobi01(int n, double alpha, double beta) {
  if (n < 1 || alpha <= -1.0 || beta <= -1.0) throw DomainError("gauss_jacobi01: invalid parameters");
  static std::map<std::tuple<int, double, double>, std::unique_ptr<Rule>> cache;
  return detail::cached(cache, std::make_tuple(n, alpha, beta),
                        [&] { return detail::make_jacobi01(n, alpha, beta); });
}

/// Gauss-Legendre on [0,1].
inline const Rule& gauss_legendre01(int n) { return gauss_jacobi01(n, 0.0, 0.0); }

/// Generalized Gauss-Laguerre on [0,inf) for the weight x^alpha e^{-x}.
inline const Rule& gauss_laguerre(int n, double alpha) {
  if (n < 1 || alpha <= -1.0) throw DomainError("gauss_laguerre: invalid parameters");
  static std::map<std::tuple<int, double>, std::unique_ptr<Rule>> cache;
  return detail::cached(cache, std::make_tuple(n, alpha), [&] { return detail::make_laguerre(n, alpha); });
}

/// Integrates f over [a,b] with an n-point Gauss-Legendre rule.
template <class F>
double integrate(F&& f, double a, double b, int n) {
  const Rule& r = gauss_legendre01(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * f(a + (b - a) * r.nodes[i]);
  return sum * (b - a);
}

/// Collapsed Gauss rule on the k-simplex, normalized to a probability measure.
/// Each node is a barycentric coordinate vector of length k+1.
struct SimplexRule {
  std::vector<Vector> bary;
  std::vector<double> weights;
};

inline const SimplexRule& simplex_rule(int k, int order) {
  static std::map<std::pair<int, int>, std::unique_ptr<SimplexRule>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(k, order);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto rule = std::make_unique<SimplexRule>();
  if (k == 0) {
    rule->bary.push_back(Vector::Ones(1));
    rule->weights.push_back(1.0);
  } else {
    std::vector<Rule> axes;
    for (int i = 0; i < k; ++i) axes.push_back(detail::make_jacobi01(order, k - 1 - i, 0.0));
    std::vector<int> idx(k, 0);
    const double norm = factorial(k);
    while (true) {
      Vector lam = Vector::Zero(k + 1);
      double rest = 1.0;
      double w = norm;
      for (int i = 0; i < k; ++i) {
        const double u = axes[i].nodes[idx[i]];
        lam(i + 1) = rest * u;
        rest *= 1.0 - u;
        w *= axes[i].weights[idx[i]];
      }
      lam(0) = rest;
      rule->bary.push_back(lam);
      rule->weights.push_back(w);
      int d = 0;
      while (d < k && ++idx[d] == order) idx[d++] = 0;
      if (d == k) break;
    }
  }
  return *cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace covbody::quad

#endif  // COVBODY_QUADRATURE_HPP
