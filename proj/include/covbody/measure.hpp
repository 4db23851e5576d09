#ifndef COVBODY_MEASURE_HPP
#define COVBODY_MEASURE_HPP

#include "parallel.hpp"
#include "polytope.hpp"
#include "quadrature.hpp"
#include "types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace covbody {

struct Concavity {
  enum class Kind { s_concave, log_concave, f_concave, none };
  Kind kind = Kind::none;
  double s = 0.0;
  std::string tag;

  static Concavity power(double s) { return {Kind::s_concave, s, {}}; }
  static Concavity log() { return {Kind::log_concave, 0.0, {}}; }
  static Concavity f(std::string tag) { return {Kind::f_concave, 0.0, std::move(tag)}; }
  static Concavity none() { return {}; }
};

/// Density of a measure with respect to Lebesgue measure on R^n.
class Density {
 public:
  enum class Kind { constant, gaussian, linear_power, product, pullback };

  static Density constant(int n, double c = 1.0) {
    if (!(c > 0.0)) throw InputError("constant density must be positive");
    Density d(Kind::constant, n);
    d.c_ = c;
    d.concavity = Concavity::power(1.0 / n);
    d.radially_nondecreasing = true;
    return d;
  }

  /// exp(-|x|^2 / (2 sigma^2)).
  static Density gaussian(int n, double sigma = 1.0) {
    if (!(sigma > 0.0)) throw InputError("gaussian sigma must be positive");
    Density d(Kind::gaussian, n);
    d.sigma_ = sigma;
    d.concavity = Concavity::log();
    d.radially_nondecreasing = false;
    return d;
  }

  /// (<a,x> + b)_+^k.
  static Density linear_power(Vector a, double b, double k) {
    if (!(k >= 0.0)) throw InputError("linear-power exponent must be nonnegative");
    const int n = static_cast<int>(a.size());
    Density d(Kind::linear_power, n);
    d.a_ = std::move(a);
    d.b_ = b;
    d.k_ = k;
    d.concavity = Concavity::power(1.0 / (k + n));
    d.radially_nondecreasing = b <= 0.0;
    return d;
  }

  /// phi(x_1, ..., x_j) = prod phi_i(x_i), block dimensions taken from the factors.
  static Density product(std::vector<Density> factors) {
    if (factors.empty()) throw InputError("product density needs factors");
    int n = 0;
    bool mono = true;
    for (const auto& f : factors) {
      n += f.dim();
      mono = mono && f.radially_nondecreasing;
    }
    Density d(Kind::product, n);
    d.factors_ = std::make_shared<std::vector<Density>>(std::move(factors));
    d.concavity = Concavity::none();
    d.radially_nondecreasing = mono;
    return d;
  }

  /// x -> base(T x).
  static Density pullback(const Density& base, const Matrix& t) {
    Density d(Kind::pullback, base.dim());
    d.factors_ = std::make_shared<std::vector<Density>>(std::vector<Density>{base});
    d.t_ = t;
    d.concavity = base.concavity;
    d.radially_nondecreasing = base.radially_nondecreasing;
    return d;
  }

  double operator()(const Vector& x) const {
    switch (kind_) {
      case Kind::constant:
        return c_;
      case Kind::gaussian:
        return std::exp(-x.squaredNorm() / (2.0 * sigma_ * sigma_));
      case Kind::linear_power: {
        const double v = a_.dot(x) + b_;
        if (v <= 0.0) return 0.0;
        return k_ == 0.0 ? 1.0 : std::pow(v, k_);
      }
      case Kind::product: {
        double prod = 1.0;
        int off = 0;
        for (const auto& f : *factors_) {
          prod *= f(x.segment(off, f.dim()));
          off += f.dim();
        }
        return prod;
      }
      case Kind::pullback:
        return (*factors_)[0](t_ * x);
    }
    return 0.0;
  }

  int dim() const { return n_; }
  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double sigma() const { return sigma_; }
  const Vector& a() const { return a_; }
  double b() const { return b_; }
  double k() const { return k_; }
  const std::vector<Density>& factors() const { return *factors_; }
  const Matrix& pullback_matrix() const { return t_; }

  Concavity concavity;
  bool radially_nondecreasing = false;

 private:
  Density(Kind k, int n) : kind_(k), n_(n) {
    if (n < 1) throw InputError("density dimension must be positive");
  }

  Kind kind_;
  int n_;
  double c_ = 1.0;
  double sigma_ = 1.0;
  Vector a_;
  double b_ = 0.0;
  double k_ = 0.0;
  std::shared_ptr<std::vector<Density>> factors_;
  Matrix t_;
};

struct Integration {
  enum class Kind { exact_constant, grid, montecarlo };
  Kind kind = Kind::grid;
  /// Nodes per axis of the collapsed Gauss rule on each simplex.
  int levels = 16;
  long samples = 100000;
  std::uint64_t seed = 42;

  static Integration exact() { return {Kind::exact_constant}; }
  static Integration grid(int levels = 16) { return {Kind::grid, levels}; }
  static Integration montecarlo(long samples = 100000, std::uint64_t seed = 42) {
    return {Kind::montecarlo, 16, samples, seed};
  }
};

class WeightedMeasure {
 public:
  WeightedMeasure(Density d, Integration integ) : density_(std::move(d)), integration_(integ) {
    if (integration_.kind == Integration::Kind::exact_constant && density_.kind() != Density::Kind::constant)
      throw InputError("exact integration requires a constant density");
    if (integration_.levels < 1 || integration_.samples < 2) throw InputError("invalid integration parameters");
  }
  /// Constant densities integrate exactly, others on the Gauss grid.
  explicit WeightedMeasure(Density d)
      : WeightedMeasure(d, d.kind() == Density::Kind::constant ? Integration::exact() : Integration::grid()) {}

  static WeightedMeasure lebesgue(int n) { return WeightedMeasure(Density::constant(n, 1.0)); }

  const Density& density() const { return density_; }
  const Integration& integration() const { return integration_; }
  int dim() const { return density_.dim(); }
  bool is_constant() const { return density_.kind() == Density::Kind::constant; }
  double operator()(const Vector& x) const { return density_(x); }

 private:
  Density density_;
  Integration integration_;
};

/// Uniform point in the simplex with the given vertices.
inline Vector sample_simplex(const std::vector<Vector>& v, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  const int k = static_cast<int>(v.size());
  std::vector<double> e(k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += (e[i] = ex(rng));
  Vector x = Vector::Zero(v[0].size());
  for (int i = 0; i < k; ++i) x += (e[i] / sum) * v[i];
  return x;
}

/// Integral of f over a list of simplices with the collapsed Gauss rule.
template <class F>
double integrate_simplices(const std::vector<Simplex>& simplices, F&& f, int order) {
  double total = 0.0;
  for (const auto& s : simplices) {
    const int k = static_cast<int>(s.vertices.size()) - 1;
    const auto& rule = quad::simplex_rule(k, order);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      Vector x = Vector::Zero(s.vertices[0].size());
      for (int j = 0; j <= k; ++j) x += rule.bary[q](j) * s.vertices[j];
      acc += rule.weights[q] * f(x);
    }
    total += s.volume * acc;
  }
  return total;
}

/// Monte Carlo integral of f over simplices (volume-weighted uniform sampling).
template <class F>
Estimate mc_simplices(const std::vector<Simplex>& simplices, F&& f, long samples, std::uint64_t seed) {
  double vol = 0.0;
  std::vector<double> cum;
  for (const auto& s : simplices) cum.push_back(vol += s.volume);
  if (vol <= 0.0) return {};
  Rng rng(seed);
  std::uniform_real_distribution<double> uni(0.0, vol);
  double sum = 0.0, sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double t = uni(rng);
    std::size_t j = std::lower_bound(cum.begin(), cum.end(), t) - cum.begin();
    if (j >= simplices.size()) j = simplices.size() - 1;
    const double y = f(sample_simplex(simplices[j].vertices, rng));
    sum += y;
    sq += y * y;
  }
  const double mean = sum / samples;
  const double var = std::max(sq / samples - mean * mean, 0.0) * samples / (samples - 1.0);
  return {vol * mean, vol * std::sqrt(var / samples)};
}

/// Integral of f dmu over P with the measure's integration strategy.
template <class F>
Estimate integrate_fn(const WeightedMeasure& mu, const MaybePolytope& p, F&& f, std::string_view tag = "integrate") {
  if (!p) return {};
  const auto& in = mu.integration();
  auto g = [&](const Vector& x) { return mu(x) * f(x); };
  if (in.kind == Integration::Kind::montecarlo)
    return mc_simplices(p->simplices(), g, in.samples, derive_seed(in.seed, tag));
  return {integrate_simplices(p->simplices(), g, in.levels), 0.0};
}

/// mu(P), with a standard error for Monte Carlo integration.
inline Estimate integrate_over_polytope(const WeightedMeasure& mu, const MaybePolytope& p,
                                        std::string_view tag = "integrate") {
  if (!p) return {};
  if (p->dim() != mu.dim()) throw InputError("integrate_over_polytope: dimension mismatch");
  if (mu.is_constant() && mu.integration().kind != Integration::Kind::montecarlo)
    return {mu.density().c() * p->volume(), 0.0};
  return integrate_fn(mu, p, [](const Vector&) { return 1.0; }, tag);
}

/// Weighted surface area measure: one atom (u_F, integral of phi over F) per facet.
struct FacetMeasure {
  struct Atom {
    Vector normal;
    double weight = 0.0;
  };
  std::vector<Atom> atoms;

  double total() const {
    double t = 0.0;
    for (const auto& a : atoms) t += a.weight;
    return t;
  }
};

inline FacetMeasure weighted_surface_measure(const Polytope& k, const WeightedMeasure& mu) {
  if (k.dim() != mu.dim()) throw InputError("weighted_surface_measure: dimension mismatch");
  FacetMeasure fm;
  const auto& in = mu.integration();
  int index = 0;
  for (const auto& f : k.facets()) {
    double w;
    if (mu.is_constant() && in.kind != Integration::Kind::montecarlo) {
      w = mu.density().c() * f.area;
    } else if (k.dim() == 1) {
      w = mu(f.vertices[0]);
    } else if (in.kind == Integration::Kind::montecarlo) {
      w = mc_simplices(f.simplices, [&](const Vector& x) { return mu(x); }, in.samples,
                       derive_seed(in.seed, "facet", index))
              .value;
    } else {
      w = integrate_simplices(f.simplices, [&](const Vector& x) { return mu(x); }, in.levels);
    }
    fm.atoms.push_back({f.normal, w});
    ++index;
  }
  return fm;
}

struct BoundaryMeasure {
  /// Sum of the facet weights.
  double total = 0.0;
  /// (mu(K_eps) - mu(K)) / eps with K_eps the outer parallel polytope.
  double epsilon_estimate = 0.0;
  double epsilon = 1e-3;
};

inline BoundaryMeasure boundary_measure_total(const Polytope& k, const WeightedMeasure& mu, double eps = 1e-3) {
  BoundaryMeasure bm;
  bm.total = weighted_surface_measure(k, mu).total();
  bm.epsilon = eps;
  std::vector<Halfspace> hs;
  for (const auto& h : k.halfspaces()) hs.push_back({h.normal, h.offset + eps});
  const MaybePolytope outer = Polytope::from_halfspaces(hs, k.dim());
  bm.epsilon_estimate =
      (integrate_over_polytope(mu, outer, "boundary").value - integrate_over_polytope(mu, k, "boundary").value) / eps;
  return bm;
}

/// The measure with density x -> phi(T x).
inline WeightedMeasure transform_measure(const WeightedMeasure& mu, const LinearMap& t) {
  if (t.dim() != mu.dim()) throw InputError("transform_measure: dimension mismatch");
  const Density& d = mu.density();
  const Matrix& m = t.matrix();
  std::optional<Density> out;
  switch (d.kind()) {
    case Density::Kind::constant:
      out = d;
      break;
    case Density::Kind::gaussian: {
      const Matrix g = m.transpose() * m;
      const double c2 = g.trace() / g.rows();
      if ((g - c2 * Matrix::Identity(g.rows(), g.cols())).norm() <= 1e-12 * c2)
        out = Density::gaussian(d.dim(), d.sigma() / std::sqrt(c2));
      break;
    }
    case Density::Kind::linear_power:
      out = Density::linear_power(m.transpose() * d.a(), d.b(), d.k());
      break;
    default:
      break;
  }
  if (!out) out = Density::pullback(d, m);
  out->concavity = d.concavity;
  out->radially_nondecreasing = d.radially_nondecreasing;
  Integration in = mu.integration();
  return WeightedMeasure(*out, in);
}

/// Monotone function F with inverse and derivative, used for F-concavity.
struct ConcavityF {
  std::string name;
  std::function<double(double)> F;
  std::function<double(double)> F_inv;
  std::function<double(double)> F_prime;
  /// Exponent for the power family t^s, 0 for log.
  double s = 0.0;
  bool is_log = false;

  static ConcavityF power(double s) {
    if (!(s > 0.0)) throw DomainError("power concavity requires s > 0");
    return {"power", [s](double t) { return std::pow(t, s); }, [s](double y) { return std::pow(y, 1.0 / s); },
            [s](double t) { return s * std::pow(t, s - 1.0); }, s, false};
  }
  static ConcavityF log() {
    return {"log", [](double t) { return std::log(t); }, [](double y) { return std::exp(y); },
            [](double t) { return 1.0 / t; }, 0.0, true};
  }
};

/// Checks F(F_inv(y)) = y and F' against central differences at sample points of (0, hi].
inline bool check_concavity_f(const ConcavityF& f, double hi, std::string* why = nullptr) {
  for (int i = 1; i <= 20; ++i) {
    const double t = hi * i / 20.0;
    const double y = f.F(t);
    if (std::abs(f.F(f.F_inv(y)) - y) > 1e-9 * std::max(1.0, std::abs(y))) {
      if (why) *why = "F(F_inv(y)) != y";
      return false;
    }
    const double h = 1e-5 * t;
    const double fd = (f.F(t + h) - f.F(t - h)) / (2.0 * h);
    if (std::abs(fd - f.F_prime(t)) > 1e-6 * std::max(1.0, std::abs(fd))) {
      if (why) *why = "F' disagrees with finite differences";
      return false;
    }
  }
  return true;
}

/// Midpoint spot-check of the declared concavity of phi at random pairs in [lo, hi].
/// Returns an empty string on success, otherwise a diagnostic.
inline std::string spot_check_concavity(const Density& d, const Vector& lo, const Vector& hi,
                                        std::uint64_t seed = 42, int pairs = 200) {
  const int n = d.dim();
  const auto& c = d.concavity;
  if (c.kind == Concavity::Kind::none || c.kind == Concavity::Kind::f_concave) return {};
  double gamma = 0.0;
  bool constant_required = false;
  if (c.kind == Concavity::Kind::s_concave) {
    if (c.s > 1.0 / n + 1e-12) return "s-concavity with s > 1/n is impossible for a measure with density";
    if (std::abs(c.s - 1.0 / n) <= 1e-12) constant_required = true;
    else gamma = c.s / (1.0 - n * c.s);
  }
  Rng rng(derive_seed(seed, "concavity"));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto draw = [&] {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * uni(rng);
    return x;
  };
  for (int i = 0; i < pairs; ++i) {
    const Vector x = draw(), y = draw();
    const double fx = d(x), fy = d(y), fm = d(0.5 * (x + y));
    if (fx <= 0.0 || fy <= 0.0) continue;
    bool ok;
    if (constant_required) {
      ok = std::abs(fx - fy) <= 1e-9 * std::max(fx, fy) && std::abs(fm - fx) <= 1e-9 * fx;
    } else if (c.kind == Concavity::Kind::log_concave || gamma == 0.0) {
      ok = std::log(fm) >= 0.5 * (std::log(fx) + std::log(fy)) - 1e-9;
    } else if (gamma > 0.0) {
      ok = std::pow(fm, gamma) >= 0.5 * (std::pow(fx, gamma) + std::pow(fy, gamma)) - 1e-9;
    } else {
      ok = fm > 0.0 && std::pow(fm, gamma) <= 0.5 * (std::pow(fx, gamma) + std::pow(fy, gamma)) + 1e-9;
    }
    if (!ok) {
      std::string tag = c.kind == Concavity::Kind::log_concave ? "log-concavity" : "s-concavity (s=" + std::to_string(c.s) + ")";
      return "concavity spot-check failed: declared " + tag + " violated at a midpoint pair";
    }
  }
  return {};
}

}  // namespace covbody

#endif  // COVBODY_MEASURE_HPP
