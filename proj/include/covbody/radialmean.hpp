#ifndef COVBODY_RADIALMEAN_HPP
#define COVBODY_RADIALMEAN_HPP

#include "covariogram.hpp"
#include "measure.hpp"
#include "polytope.hpp"
#include "projection.hpp"
#include "quadrature.hpp"
#include "report.hpp"
#include "sphere.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace covbody {

namespace detail {

// One candidate for min_i rho_{K-x}(-theta_i): (b - <a,x>) / c, with c = -<a, theta_i> > 0.
struct ChordPiece {
  Vector a;
  double b;
  double c;
  double eval(const Vector& x) const { return (b - a.dot(x)) / c; }
};

inline std::vector<ChordPiece> chord_pieces(const Polytope& k, const MDirection& theta) {
  std::vector<ChordPiece> out;
  for (const auto& t : theta.blocks()) {
    for (const auto& h : k.halfspaces()) {
      const double c = -h.normal.dot(t);
      if (c > 1e-14) out.push_back({h.normal, h.offset, c});
    }
  }
  if (out.empty()) throw InputError("radial mean: direction has no nonzero block");
  return out;
}

inline double min_chord(const std::vector<ChordPiece>& pieces, const Vector& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pc : pieces) best = std::min(best, pc.eval(x));
  return std::max(best, 0.0);
}

using Psi = std::function<double(const Vector&)>;

inline Vector bary_point(const std::vector<Vector>& v, const Vector& lam) {
  Vector x = Vector::Zero(v[0].size());
  for (std::size_t j = 0; j < v.size(); ++j) x += lam(static_cast<int>(j)) * v[j];
  return x;
}

// Plain collapsed Gauss expectation of f over a simplex (normalized measure).
template <class F>
double simplex_mean(const std::vector<Vector>& v, F&& f, int order) {
  const auto& rule = quad::simplex_rule(static_cast<int>(v.size()) - 1, order);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q) acc += rule.weights[q] * f(bary_point(v, rule.bary[q]), rule.bary[q]);
  return acc;
}

// Mean over the simplex v of psi(x) * L(l(x)), where l is affine with vertex values lv,
// L(t) = t^p, or log t when log_mode. Zero vertices of l are peeled off as cone apexes so
// the radial factor s^p (or log s) is integrated by a matching Gauss rule.
inline double singular_mean(const std::vector<Vector>& v, const std::vector<double>& lv, const Psi& psi, double p,
                            bool log_mode, int order) {
  const int k = static_cast<int>(v.size()) - 1;
  // t^p away from zero has polynomial degree about p; raise the order to match.
  if (!log_mode && p > 0.0) order = std::min(128, std::max(order, static_cast<int>(std::ceil(0.5 * p)) + 8));
  const double lmax = *std::max_element(lv.begin(), lv.end());
  int zero = -1;
  for (int j = 0; j <= k; ++j)
    if (lv[j] <= 1e-12 * lmax) {
      zero = j;
      break;
    }
  auto L = [&](double t) { return log_mode ? std::log(t) : std::pow(t, p); };
  if (zero < 0 || k == 0) {
    return simplex_mean(
        v,
        [&](const Vector& x, const Vector& lam) {
          double l = 0.0;
          for (int j = 0; j <= k; ++j) l += lam(j) * lv[j];
          return psi(x) * L(l);
        },
        order);
  }
  const Vector apex = v[zero];
  std::vector<Vector> base;
  std::vector<double> lbase;
  for (int j = 0; j <= k; ++j) {
    if (j == zero) continue;
    base.push_back(v[j]);
    lbase.push_back(std::max(lv[j], 0.0));
  }
  if (!log_mode) {
    const auto& rule = quad::gauss_jacobi01(order, 0.0, k - 1 + p);
    Psi next = [&](const Vector& y) {
      double acc = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        acc += rule.weights[q] * psi(apex + rule.nodes[q] * (y - apex));
      return k * acc;
    };
    return singular_mean(base, lbase, next, p, false, order);
  }
  // log(s l(y)) = log s + log l(y).
  const auto& lag = quad::gauss_laguerre(order, 1.0);
  const double kk = static_cast<double>(k);
  const double log_part = simplex_mean(
      base,
      [&](const Vector& y, const Vector&) {
        double acc = 0.0;
        for (std::size_t q = 0; q < lag.nodes.size(); ++q) {
          const double s = std::exp(-lag.nodes[q] / kk);
          acc += lag.weights[q] * psi(apex + s * (y - apex));
        }
        return -acc / kk;
      },
      order);
  const auto& rule = quad::gauss_jacobi01(order, 0.0, k - 1.0);
  Psi next = [&](const Vector& y) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      acc += rule.weights[q] * psi(apex + rule.nodes[q] * (y - apex));
    return k * acc;
  };
  return log_part + singular_mean(base, lbase, next, 0.0, true, order);
}

// Integral over K of phi(x) L(min chord(x)), split into the cells where one chord piece is minimal.
inline Estimate chord_integral(const Polytope& k, const WeightedMeasure& mu, const MDirection& theta, double p,
                               bool log_mode, int order) {
  const auto pieces = chord_pieces(k, theta);
  auto L = [&](double t) { return log_mode ? std::log(t) : std::pow(t, p); };
  if (mu.integration().kind == Integration::Kind::montecarlo) {
    return integrate_fn(mu, MaybePolytope(k), [&](const Vector& x) { return L(min_chord(pieces, x)); }, "radial-mean");
  }
  const Psi psi = [&](const Vector& x) { return mu(x); };
  double total = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::vector<Halfspace> hs = k.halfspaces();
    bool duplicate = false;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (j == i) continue;
      const Vector a = pieces[j].a / pieces[j].c - pieces[i].a / pieces[i].c;
      const double b = pieces[j].b / pieces[j].c - pieces[i].b / pieces[i].c;
      if (a.norm() < 1e-13 && std::abs(b) < 1e-13) {
        if (j < i) duplicate = true;
        continue;
      }
      hs.push_back({a, b});
    }
    if (duplicate) continue;
    const MaybePolytope cell = Polytope::intersection(hs, k.dim());
    if (!cell) continue;
    for (const auto& s : cell->simplices()) {
      std::vector<double> lv;
      for (const auto& v : s.vertices) lv.push_back(std::max(pieces[i].eval(v), 0.0));
      total += s.volume * singular_mean(s.vertices, lv, psi, p, log_mode, order);
    }
  }
  return {total, 0.0};
}

}  // namespace detail

inline constexpr int default_rmb_order = 16;

/// exp of the mu-average over K of log min_i rho_{K-x}(-theta_i).
inline double rmb_radial_p0(const Polytope& k, const WeightedMeasure& mu, const MDirection& theta,
                            int order = default_rmb_order) {
  const double muk = integrate_over_polytope(mu, k, "radial-mean-mass").value;
  return std::exp(detail::chord_integral(k, mu, theta, 0.0, true, order).value / muk);
}

/// Radial function of R^m_{p,mu}K from its defining average over K.
inline double rmb_radial_direct(const Polytope& k, const WeightedMeasure& mu, double p, const MDirection& theta,
                                int order = default_rmb_order) {
  if (!(p > -1.0)) throw DomainError("radial mean body requires p > -1");
  if (std::isinf(p)) return diffbody_radial(k, theta);
  if (std::abs(p) < 1e-3) return rmb_radial_p0(k, mu, theta, order);
  const double muk = integrate_over_polytope(mu, k, "radial-mean-mass").value;
  const double avg = detail::chord_integral(k, mu, theta, p, false, order).value / muk;
  return std::pow(avg, 1.0 / p);
}

/// Radii in (0, rho_D) at which K intersected with its translates by r theta_i changes
/// combinatorial type; the covariogram is smooth between consecutive values.
inline std::vector<double> covariogram_breakpoints(const Polytope& k, const MDirection& theta, double rho_d) {
  const int n = k.dim();
  struct Row {
    Vector a;
    double b, d;
  };
  std::vector<Row> rows;
  for (const auto& h : k.halfspaces()) rows.push_back({h.normal, h.offset, 0.0});
  for (const auto& t : theta.blocks())
    for (const auto& h : k.halfspaces()) rows.push_back({h.normal, h.offset, h.normal.dot(t)});
  const int m = static_cast<int>(rows.size());
  const double tol = 1e-9 * (1.0 + rho_d);
  std::vector<double> out;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  while (m >= n) {
    Matrix A(n, n);
    Vector b(n), d(n);
    for (int i = 0; i < n; ++i) {
      A.row(i) = rows[idx[i]].a.transpose();
      b(i) = rows[idx[i]].b;
      d(i) = rows[idx[i]].d;
    }
    if (std::abs(A.determinant()) > 1e-10) {
      Eigen::PartialPivLU<Matrix> lu(A);
      const Vector v0 = lu.solve(b), v1 = lu.solve(d);
      for (int j = 0; j < m; ++j) {
        if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
        const double den = rows[j].a.dot(v1) - rows[j].d;
        if (std::abs(den) < 1e-12) continue;
        const double r = (rows[j].b - rows[j].a.dot(v0)) / den;
        if (!(r > 1e-9 * rho_d && r < rho_d * (1.0 - 1e-9))) continue;
        const Vector v = v0 + r * v1;
        bool feasible = true;
        for (const auto& row : rows)
          if (row.a.dot(v) > row.b + r * row.d + tol) {
            feasible = false;
            break;
          }
        if (feasible) out.push_back(r);
      }
    }
    int dd = n - 1;
    while (dd >= 0 && idx[dd] == m - n + dd) --dd;
    if (dd < 0) break;
    ++idx[dd];
    for (int i = dd + 1; i < n; ++i) idx[i] = idx[i - 1] + 1;
  }
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double r : out)
    if (uniq.empty() || r - uniq.back() > 1e-10 * rho_d) uniq.push_back(r);
  return uniq;
}

namespace detail {

// p * integral over [0, rho_D] of g r^{p-1} (p > 0) or of (g - muK) r^{p-1} (p < 0),
// piecewise Gauss with a Gauss-Jacobi first panel.
inline double mellin_integral(const std::function<double(double)>& g, double muk, double p,
                              const std::vector<double>& cuts, int order) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1], len = b - a;
    if (k == 0) {
      if (p > 0.0) {
        const auto& rule = quad::gauss_jacobi01(order, 0.0, p - 1.0);
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) acc += rule.weights[q] * g(len * rule.nodes[q]);
        total += std::pow(len, p) * acc;
      } else {
        const auto& rule = quad::gauss_jacobi01(order, 0.0, p);
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double r = len * rule.nodes[q];
          acc += rule.weights[q] * (g(r) - muk) / r;
        }
        total += std::pow(len, p + 1.0) * acc;
      }
    } else {
      const auto& rule = quad::gauss_legendre01(order);
      double acc = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double r = a + len * rule.nodes[q];
        acc += rule.weights[q] * (p > 0.0 ? g(r) : g(r) - muk) * std::pow(r, p - 1.0);
      }
      total += len * acc;
    }
  }
  return total;
}

}  // namespace detail

/// Radial function of R^m_{p,mu}K from the Mellin transform of the covariogram along the ray.
inline double rmb_radial_mellin(const Polytope& k, const WeightedMeasure& mu, double p, const MDirection& theta,
                                int order = default_rmb_order) {
  if (!(p > -1.0)) throw DomainError("radial mean body requires p > -1");
  if (std::isinf(p)) return diffbody_radial(k, theta);
  if (p == 0.0) throw DomainError("Mellin form is defined for p != 0");
  const double rho = diffbody_radial(k, theta);
  const double muk = integrate_over_polytope(mu, k, "radial-mean-mass").value;
  std::vector<double> cuts{0.0};
  for (double r : covariogram_breakpoints(k, theta, rho)) cuts.push_back(r);
  cuts.push_back(rho);
  auto g = [&](double r) { return covariogram(k, mu, theta.scaled(r)).value; };
  // Order doubling until two successive rules agree; large p needs many nodes near rho_D.
  double coarse = detail::mellin_integral(g, muk, p, cuts, order);
  double fine = coarse;
  for (int o = 2 * order;; o *= 2) {
    fine = detail::mellin_integral(g, muk, p, cuts, o);
    if (std::abs(fine - coarse) <= 1e-6 * std::abs(fine)) break;
    if (o >= 512) throw NumericError("Mellin quadrature did not converge under refinement");
    coarse = fine;
  }
  double rp = p / muk * fine;
  if (p < 0.0) rp += std::pow(rho, p);
  if (!(rp > 0.0)) throw NumericError("Mellin quadrature produced a nonpositive p-th power");
  return std::pow(rp, 1.0 / p);
}

struct RadialMeanBody {
  enum class Method { direct, mellin };
  Polytope k;
  WeightedMeasure mu;
  int m = 1;
  double p = 1.0;
  Method method = Method::direct;

  double radial(const MDirection& theta) const {
    if (std::isinf(p)) return diffbody_radial(k, theta);
    if (method == Method::mellin && p != 0.0) return rmb_radial_mellin(k, mu, p, theta);
    return rmb_radial_direct(k, mu, p, theta);
  }

  StarBodyFn star() const {
    RadialMeanBody self = *this;
    return {k.dim() * m, [self](const Vector& u) { return self.radial(MDirection::from_flat(u, self.k.dim())); }};
  }
};

/// Tracks (p+1)^{1/p} rho_{R_p}(theta) toward mu(K) rho_{Pi polar}(theta) as p -> -1.
inline VerifyReport rmb_limit_neg1(const Polytope& k, const WeightedMeasure& mu, const MDirection& theta,
                                   std::vector<double> p_seq = {-0.9, -0.99, -0.999}, double tolerance = 0.01) {
  if (p_seq.empty()) throw InputError("rmb_limit_neg1: empty p sequence");
  const double muk = integrate_over_polytope(mu, k, "radial-mean-mass").value;
  const double target = muk * polar_projection_radial(k, mu, theta);
  VerifyReport rep;
  rep.name = "limit-neg1";
  rep.columns = {"p", "scaled_radial", "relative_gap"};
  double last_gap = 0.0, last_value = 0.0;
  double closest = std::numeric_limits<double>::infinity();
  for (double p : p_seq) {
    if (!(p > -1.0 && p < 0.0)) throw DomainError("rmb_limit_neg1: p must lie in (-1, 0)");
    const double v = std::pow(p + 1.0, 1.0 / p) * rmb_radial_mellin(k, mu, p, theta);
    const double gap = std::abs(v - target) / target;
    rep.rows.push_back({p, v, gap});
    if (p + 1.0 < closest) {
      closest = p + 1.0;
      last_gap = gap;
      last_value = v;
    }
  }
  rep.lhs = last_value;
  rep.rhs = target;
  rep.ratio = last_value / target;
  rep.bound = 1.0;
  rep.tolerance = tolerance;
  rep.margin = tolerance - last_gap;
  rep.pass = last_gap <= tolerance;
  rep.samples = 1;
  rep.extra("relative_gap", last_gap);
  return rep;
}

}  // namespace covbody

#endif  // COVBODY_RADIALMEAN_HPP
