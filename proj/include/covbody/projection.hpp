#ifndef COVBODY_PROJECTION_HPP
#define COVBODY_PROJECTION_HPP

#include "covariogram.hpp"
#include "measure.hpp"
#include "polytope.hpp"
#include "report.hpp"
#include "sphere.hpp"

#include <algorithm>
#include <vector>

namespace covbody {

/// h of Pi^m_mu K from a facet measure: sum_F w_F max_i <x_i, u_F>_-.
inline double projection_support(const FacetMeasure& s, const std::vector<Vector>& xbar) {
  double h = 0.0;
  for (const auto& atom : s.atoms) {
    double worst = 0.0;
    for (const auto& x : xbar) worst = std::max(worst, -atom.normal.dot(x));
    h += atom.weight * worst;
  }
  return h;
}

/// Weighted m-th order projection body, evaluated functionally.
class ProjectionBody {
 public:
  ProjectionBody(const Polytope& k, const WeightedMeasure& mu, int m)
      : n_(k.dim()), m_(m), surface_(weighted_surface_measure(k, mu)) {
    if (m < 1) throw InputError("ProjectionBody: m must be positive");
  }

  double support(const std::vector<Vector>& xbar) const {
    if (static_cast<int>(xbar.size()) != m_) throw InputError("ProjectionBody: wrong number of blocks");
    return projection_support(surface_, xbar);
  }
  double support(const MDirection& x) const { return support(x.blocks()); }

  /// rho of the polar body, 1/h.
  double polar_radial(const MDirection& theta) const {
    const double h = support(theta);
    if (!(h > 0.0)) throw InputError("polar projection body: support vanishes (degenerate measure)");
    return 1.0 / h;
  }

  StarBodyFn polar() const {
    ProjectionBody self = *this;
    return {n_ * m_, [self](const Vector& u) { return self.polar_radial(MDirection::from_flat(u, self.n_)); }};
  }

  /// Angles where the support restricted to S^1 has kinks (n = 2, m = 1).
  std::vector<double> kink_angles() const {
    std::vector<double> out;
    for (const auto& a : surface_.atoms) {
      if (a.normal.size() != 2) continue;
      const double t = std::atan2(a.normal(1), a.normal(0));
      out.push_back(t + 0.5 * pi);
      out.push_back(t - 0.5 * pi);
    }
    return out;
  }

  const FacetMeasure& surface() const { return surface_; }
  int n() const { return n_; }
  int m() const { return m_; }

 private:
  int n_;
  int m_;
  FacetMeasure surface_;
};

inline double projection_support(const Polytope& k, const WeightedMeasure& mu, const std::vector<Vector>& xbar) {
  return projection_support(weighted_surface_measure(k, mu), xbar);
}

inline double polar_projection_radial(const Polytope& k, const WeightedMeasure& mu, const MDirection& theta) {
  return ProjectionBody(k, mu, theta.m()).polar_radial(theta);
}

/// Compares the one-sided derivative of r -> g(K, r theta) at 0 with -h_Pi(theta).
inline VerifyReport variational_check(const Polytope& k, const WeightedMeasure& mu, const MDirection& theta,
                                      std::vector<double> steps = {1e-2, 5e-3, 2.5e-3}, double tolerance = 1e-3) {
  if (steps.empty()) throw InputError("variational_check: no steps");
  std::sort(steps.begin(), steps.end(), std::greater<>());
  const double g0 = covariogram(k, mu, theta.scaled(0.0)).value;
  std::vector<double> d;
  for (double h : steps) {
    if (!(h > 0.0)) throw InputError("variational_check: steps must be positive");
    d.push_back((covariogram(k, mu, theta.scaled(h)).value - g0) / h);
  }
  // Richardson elimination of the O(h^j) error terms.
  std::vector<double> col = d;
  for (std::size_t level = 1; level < col.size(); ++level) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < col.size(); ++i) {
      const double f = std::pow(steps[i] / steps[i + 1], static_cast<double>(level));
      next.push_back((f * col[i + 1] - col[i]) / (f - 1.0));
    }
    col = next;
  }
  const double derivative = col.front();
  const double h = projection_support(k, mu, theta.blocks());

  VerifyReport rep;
  rep.name = "variational";
  rep.lhs = derivative;
  rep.rhs = -h;
  rep.ratio = h != 0.0 ? -derivative / h : 0.0;
  rep.bound = 1.0;
  const double err = std::abs(derivative + h) / std::max(std::abs(h), 1e-300);
  rep.tolerance = tolerance;
  rep.margin = tolerance - err;
  rep.pass = err <= tolerance;
  rep.samples = 1;
  rep.extra("relative_error", err);
  rep.extra("raw_difference", d.back());
  rep.notes.push_back("forward differences with Richardson extrapolation");
  return rep;
}

/// Checks h_{Pi(TK)}(theta) = |det T| h_{Pi_{mu^T} K}(T^{-1} theta) blockwise.
inline VerifyReport linear_covariance_check(const Polytope& k, const WeightedMeasure& mu, const LinearMap& t,
                                            const std::vector<MDirection>& dirs, double tolerance = -1.0) {
  if (tolerance < 0.0) tolerance = mu.is_constant() && mu.integration().kind != Integration::Kind::montecarlo ? 1e-6 : 1e-3;
  const Polytope tk = apply_linear(t, k);
  const FacetMeasure left = weighted_surface_measure(tk, mu);
  const FacetMeasure right = weighted_surface_measure(k, transform_measure(mu, t));
  VerifyReport rep;
  rep.name = "linear-covariance";
  rep.columns = {"direction", "lhs", "rhs", "relative_error"};
  double worst = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    std::vector<Vector> pulled;
    for (const auto& b : dirs[i].blocks()) pulled.push_back(t.inverse() * b);
    const double l = projection_support(left, dirs[i].blocks());
    const double r = t.det_abs() * projection_support(right, pulled);
    const double err = std::abs(l - r) / std::max(std::abs(l), 1e-300);
    worst = std::max(worst, err);
    rep.rows.push_back({static_cast<double>(i), l, r, err});
    if (i == 0) {
      rep.lhs = l;
      rep.rhs = r;
    }
  }
  rep.ratio = rep.rhs != 0.0 ? rep.lhs / rep.rhs : 0.0;
  rep.bound = 1.0;
  rep.tolerance = tolerance;
  rep.margin = tolerance - worst;
  rep.pass = worst <= tolerance;
  rep.samples = static_cast<long>(dirs.size());
  rep.extra("max_relative_error", worst);
  return rep;
}

}  // namespace covbody

#endif  // COVBODY_PROJECTION_HPP
