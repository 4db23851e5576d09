#ifndef COVBODY_COVARIOGRAM_HPP
#define COVBODY_COVARIOGRAM_HPP

#include "linprog.hpp"
#include "measure.hpp"
#include "polytope.hpp"
#include "quadrature.hpp"
#include "sphere.hpp"

#include <vector>

namespace covbody {

/// Point (theta_1, ..., theta_m) of R^{nm}, stored as m blocks of length n.
class MDirection {
 public:
  MDirection(std::vector<Vector> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw InputError("MDirection: needs at least one block");
    n_ = static_cast<int>(blocks_[0].size());
    for (const auto& b : blocks_)
      if (b.size() != n_) throw InputError("MDirection: blocks must share a dimension");
  }

  /// Splits a vector of length n*m into m blocks.
  static MDirection from_flat(const Vector& v, int n) {
    if (n < 1 || v.size() % n != 0) throw InputError("MDirection: length is not a multiple of n");
    std::vector<Vector> blocks;
    for (int i = 0; i < v.size() / n; ++i) blocks.push_back(v.segment(i * n, n));
    return MDirection(std::move(blocks));
  }

  /// Same as from_flat, after normalizing to the unit sphere.
  static MDirection unit(const Vector& v, int n) {
    const double len = v.norm();
    if (!(len > 0.0)) throw InputError("MDirection: zero vector");
    return from_flat(v / len, n);
  }

  Vector flat() const {
    Vector v(n_ * m());
    for (int i = 0; i < m(); ++i) v.segment(i * n_, n_) = blocks_[i];
    return v;
  }

  MDirection scaled(double r) const {
    std::vector<Vector> b = blocks_;
    for (auto& x : b) x *= r;
    return MDirection(std::move(b));
  }

  double norm() const { return flat().norm(); }
  bool is_unit() const { return std::abs(flat().squaredNorm() - 1.0) <= tol::unit; }
  int m() const { return static_cast<int>(blocks_.size()); }
  int n() const { return n_; }
  const Vector& operator[](int i) const { return blocks_[i]; }
  const std::vector<Vector>& blocks() const { return blocks_; }

 private:
  std::vector<Vector> blocks_;
  int n_ = 0;
};

/// g_{mu,m}(K, xbar) = mu(K intersected with the translates x_i + K).
inline Estimate covariogram(const Polytope& k, const WeightedMeasure& mu, const std::vector<Vector>& xbar) {
  return integrate_over_polytope(mu, intersect_translates(k, xbar), "covariogram");
}

inline Estimate covariogram(const Polytope& k, const WeightedMeasure& mu, const MDirection& xbar) {
  return covariogram(k, mu, xbar.blocks());
}

/// rho of D^m(K) at theta: max r such that y and y - r theta_i lie in K for some y.
inline double diffbody_radial(const Polytope& k, const MDirection& theta) {
  if (theta.n() != k.dim()) throw InputError("diffbody_radial: dimension mismatch");
  const int n = k.dim();
  const int f = static_cast<int>(k.halfspaces().size());
  const int m = theta.m();
  Matrix A = Matrix::Zero(f * (m + 1), n + 1);
  Vector b(f * (m + 1));
  for (int j = 0; j < f; ++j) {
    const auto& h = k.halfspaces()[j];
    A.row(j).head(n) = h.normal.transpose();
    b(j) = h.offset;
    for (int i = 0; i < m; ++i) {
      const int r = (i + 1) * f + j;
      A.row(r).head(n) = h.normal.transpose();
      A(r, n) = -h.normal.dot(theta[i]);
      b(r) = h.offset;
    }
  }
  Vector c = Vector::Zero(n + 1);
  c(n) = 1.0;
  auto res = lp::maximize(A, b, c);
  if (res.status != lp::Status::optimal) throw NumericError("diffbody_radial: linear program failed");
  return res.value;
}

/// D^m(K) as a functional star body in R^{nm}.
inline StarBodyFn diffbody(const Polytope& k, int m) {
  return {k.dim() * m, [k, m](const Vector& u) { return diffbody_radial(k, MDirection::from_flat(u, k.dim())); }};
}

/// Roof function 1 - r / rho_L(theta) at x = r theta, 0 outside L; o interior to L.
inline double roof(const StarBodyFn& l, const Vector& x) {
  const double r = x.norm();
  if (r == 0.0) return 1.0;
  return std::max(0.0, 1.0 - r / l.radial(x / r));
}

inline double roof(const Polytope& l, const Vector& x) {
  const double r = x.norm();
  if (r == 0.0) {
    if (!l.contains(x, -tol::geom)) throw InputError("roof: origin is not interior");
    return 1.0;
  }
  return std::max(0.0, 1.0 - r / radial(l, Vector::Zero(l.dim()), x / r));
}

/// r -> g(K, r theta) tabulated on Gauss-Legendre nodes of [0, rho_D] plus both endpoints.
struct CovariogramSlice {
  MDirection direction;
  double rho_D = 0.0;
  std::vector<double> r;
  std::vector<double> values;
  std::function<double(double)> eval;
};

inline CovariogramSlice covariogram_slice(const Polytope& k, const WeightedMeasure& mu, const MDirection& theta,
                                          int grid) {
  if (grid < 1) throw InputError("covariogram_slice: grid must be positive");
  CovariogramSlice s{theta, diffbody_radial(k, theta), {}, {}, {}};
  s.eval = [k, mu, theta](double r) { return covariogram(k, mu, theta.scaled(r)).value; };
  const auto& rule = quad::gauss_legendre01(grid);
  s.r.push_back(0.0);
  for (double t : rule.nodes) s.r.push_back(t * s.rho_D);
  s.r.push_back(s.rho_D);
  for (double r : s.r) s.values.push_back(s.eval(r));
  return s;
}

}  // namespace covbody

#endif  // COVBODY_COVARIOGRAM_HPP
