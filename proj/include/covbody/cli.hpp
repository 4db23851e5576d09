#ifndef COVBODY_CLI_HPP
#define COVBODY_CLI_HPP

// Job dispatch for the covbody command line tool.

#include "covariogram.hpp"
#include "genvol.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "projection.hpp"
#include "radialmean.hpp"
#include "verify.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace covbody::cli {

using io::json;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> output;
  std::optional<std::string> outfile;
  std::optional<double> tolerance;
};

struct Outcome {
  int exit_code = 0;
  std::string report;
  std::string format = "json";
  std::string outfile;
  std::string diagnostic;
};

/// Operation name -> command that reaches it.
inline const std::vector<std::pair<std::string, std::string>>& coverage() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"intersect_translates", "covariogram"},
      {"volume", "covariogram"},
      {"support", "diffbody"},
      {"radial", "diffbody"},
      {"apply_linear", "verify-linear"},
      {"star_volume", "diffbody"},
      {"integrate_over_polytope", "projbody"},
      {"weighted_surface_measure", "projbody"},
      {"boundary_measure_total", "projbody"},
      {"transform_measure", "verify-linear"},
      {"covariogram", "covariogram"},
      {"diffbody_radial", "diffbody"},
      {"roof", "diffbody"},
      {"covariogram_slice", "covariogram"},
      {"projection_support", "projbody"},
      {"polar_projection_radial", "projbody"},
      {"variational_check", "verify-variational"},
      {"linear_covariance_check", "verify-linear"},
      {"rmb_radial_direct", "rmb"},
      {"rmb_radial_mellin", "rmb"},
      {"rmb_radial_p0", "rmb"},
      {"rmb_limit_neg1", "rmb"},
      {"gen_binom", "verify-rs"},
      {"berwald_const_F", "verify-chain"},
      {"berwald_const_Q", "verify-chain"},
      {"chain_check", "verify-chain"},
      {"rogers_shephard_check", "verify-rs"},
      {"zhang_check", "verify-zhang"},
      {"general_zhang_check", "verify-zhang"},
      {"dual_volume", "dualvol"},
      {"chord_lower_check", "verify-chord"},
      {"chord_upper_check", "verify-chord"},
      {"mc_measure", "covariogram"},
      {"sphere_quadrature", "dualvol"},
      {"run", "all"},
  };
  return table;
}

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"covariogram", "diffbody", "projbody", "rmb",
                                                 "verify-chain", "verify-zhang", "verify-rs", "verify-variational",
                                                 "verify-linear", "verify-chord", "dualvol"};
  return names;
}

namespace detail {

struct Job {
  std::string command;
  Polytope k;
  WeightedMeasure mu;
  json params;
  std::uint64_t seed = 42;
  std::optional<double> tolerance;
};

inline int param_int(const json& p, const char* key, int fallback) {
  return p.contains(key) ? io::integer(p.at(key), key) : fallback;
}

inline double param_num(const json& p, const char* key, double fallback) {
  return p.contains(key) ? io::number(p.at(key), key) : fallback;
}

inline bool param_bool(const json& p, const char* key) {
  if (!p.contains(key)) return false;
  if (!p.at(key).is_boolean()) throw InputError(std::string(key) + ": expected true or false");
  return p.at(key).get<bool>();
}

inline std::vector<double> param_list(const json& p, const char* key, std::vector<double> fallback) {
  if (!p.contains(key)) return fallback;
  const Vector v = io::vector(p.at(key), key);
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline double tolerance(const Job& job, double fallback) {
  if (job.tolerance) return *job.tolerance;
  return param_num(job.params, "tolerance", fallback);
}

/// "directions": an integer count or an explicit list of vectors of length n*m.
inline std::vector<MDirection> directions(const Job& job, int m, int fallback) {
  const int n = job.k.dim();
  const json& p = job.params;
  if (p.contains("directions") && p.at("directions").is_array()) {
    std::vector<MDirection> out;
    for (const auto& v : io::vectors(p.at("directions"), "directions")) {
      if (v.size() != n * m) throw InputError("directions: each entry needs n*m coordinates");
      out.push_back(MDirection::unit(v, n));
    }
    if (out.empty()) throw InputError("directions: empty list");
    return out;
  }
  const int count = param_int(p, "directions", fallback);
  if (count < 1) throw InputError("directions: count must be positive");
  return sample_directions(n, m, count, job.seed);
}

/// Sphere rule sizes from an integer count under `key`.
inline DirectionOptions direction_options(const Job& job, const char* key = "directions") {
  DirectionOptions o;
  o.seed = job.seed;
  if (job.params.contains(key)) {
    const int c = io::integer(job.params.at(key), key);
    if (c < 1) throw InputError(std::string(key) + ": count must be positive");
    o.count_low = o.count_high = c;
  }
  o.per_arc = param_int(job.params, "per_arc", o.per_arc);
  return o;
}

inline int param_m(const Job& job) {
  const int m = param_int(job.params, "m", 1);
  if (m < 1) throw InputError("m must be positive");
  return m;
}

inline std::vector<std::string> direction_columns(int d) {
  std::vector<std::string> c{"direction"};
  for (int i = 0; i < d; ++i) c.push_back("u" + std::to_string(i));
  return c;
}

inline std::vector<double> direction_row(std::size_t i, const Vector& u) {
  std::vector<double> row{static_cast<double>(i)};
  for (int j = 0; j < u.size(); ++j) row.push_back(u(j));
  return row;
}

inline VerifyReport computed(std::string name) {
  VerifyReport r;
  r.name = std::move(name);
  r.pass = true;
  r.bound = 0.0;
  return r;
}

inline std::vector<Vector> point_blocks(const json& x, int n) {
  if (!x.is_array() || x.empty()) throw InputError("x: expected a vector or a list of vectors");
  if (x.front().is_array()) {
    auto blocks = io::vectors(x, "x");
    for (const auto& b : blocks)
      if (b.size() != n) throw InputError("x: block dimension does not match the body");
    return blocks;
  }
  return MDirection::from_flat(io::vector(x, "x"), n).blocks();
}

inline VerifyReport cmd_covariogram(const Job& job) {
  io::expect_keys(job.params, {"x", "direction", "grid", "oracle_samples", "seed"}, "params");
  const int n = job.k.dim();
  VerifyReport r = computed("covariogram");
  r.seed = job.seed;
  const double muk = integrate_over_polytope(job.mu, job.k, "cli-mass").value;
  r.extra("mu_K", muk);
  r.extra("volume_K", job.k.volume());
  if (job.params.contains("direction")) {
    const MDirection th = MDirection::unit(io::vector(job.params.at("direction"), "direction"), n);
    const auto slice = covariogram_slice(job.k, job.mu, th, param_int(job.params, "grid", 16));
    r.columns = {"r", "g"};
    for (std::size_t i = 0; i < slice.r.size(); ++i) r.rows.push_back({slice.r[i], slice.values[i]});
    r.extra("rho_D", slice.rho_D);
    r.lhs = slice.values.front();
    r.samples = static_cast<long>(slice.r.size());
    return r;
  }
  if (!job.params.contains("x")) throw InputError("covariogram: needs params.x or params.direction");
  const auto xs = point_blocks(job.params.at("x"), n);
  const Estimate g = covariogram(job.k, job.mu, xs);
  r.lhs = g.value;
  r.extra("value", g.value);
  r.extra("stderr", g.stderr_);
  r.extra("intersection_volume", volume(intersect_translates(job.k, xs)));
  if (job.params.contains("oracle_samples")) {
    const long ns = job.params.at("oracle_samples").get<long>();
    auto [lo, hi] = job.k.bounding_box();
    const Polytope& k = job.k;
    const Estimate o = oracle::mc_measure(
        [&](const Vector& x) { return job.mu(x); },
        [&](const Vector& x) {
          if (!k.contains(x, 0.0)) return false;
          for (const auto& s : xs)
            if (!k.contains(x - s, 0.0)) return false;
          return true;
        },
        lo, hi, ns, job.seed);
    r.extra("oracle_value", o.value);
    r.extra("oracle_stderr", o.stderr_);
    r.samples = ns;
  }
  return r;
}

inline VerifyReport cmd_diffbody(const Job& job) {
  io::expect_keys(job.params, {"m", "directions", "quadrature", "volume", "roof", "support", "radial", "per_arc", "seed"}, "params");
  const int n = job.k.dim(), m = param_m(job);
  VerifyReport r = computed("diffbody");
  r.seed = job.seed;
  const auto dirs = directions(job, m, 16);
  r.columns = direction_columns(n * m);
  r.columns.push_back("rho_D");
  auto rho = parallel_map<double>(dirs.size(), [&](std::size_t i) { return diffbody_radial(job.k, dirs[i]); });
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    auto row = direction_row(i, dirs[i].flat());
    row.push_back(rho[i]);
    r.rows.push_back(std::move(row));
  }
  r.lhs = rho.front();
  r.samples = static_cast<long>(dirs.size());
  if (param_bool(job.params, "volume")) {
    const Estimate v = star_volume(diffbody(job.k, m), direction_rule(n * m, direction_options(job, "quadrature")));
    r.extra("volume", v.value);
    r.extra("volume_stderr", v.stderr_);
    if (m == 1) r.extra("volume_exact", difference_body(job.k).volume());
  }
  if (job.params.contains("roof")) {
    const Vector x = io::vector(job.params.at("roof"), "roof");
    if (x.size() != n * m) throw InputError("roof: point needs n*m coordinates");
    r.extra("roof", roof(diffbody(job.k, m), x));
  }
  if (job.params.contains("support")) {
    int i = 0;
    for (const auto& u : io::vectors(job.params.at("support"), "support")) {
      if (u.size() != n) throw InputError("support: vector dimension does not match the body");
      r.extra("support_" + std::to_string(i++), support(job.k, u));
    }
  }
  if (job.params.contains("radial")) {
    const json& q = job.params.at("radial");
    io::expect_keys(q, {"base", "u"}, "radial");
    const Vector base = io::vector(io::require(q, "base", "radial"), "radial.base");
    Vector u = io::vector(io::require(q, "u", "radial"), "radial.u");
    if (base.size() != n || u.size() != n) throw InputError("radial: dimension mismatch");
    u /= u.norm();
    r.extra("radial", radial(job.k, base, u));
  }
  return r;
}

inline VerifyReport cmd_projbody(const Job& job) {
  io::expect_keys(job.params, {"m", "directions", "quadrature", "volume", "surface", "epsilon", "per_arc", "seed"}, "params");
  const int n = job.k.dim(), m = param_m(job);
  VerifyReport r = computed("projbody");
  r.seed = job.seed;
  const ProjectionBody proj(job.k, job.mu, m);
  const double muk = integrate_over_polytope(job.mu, job.k, "cli-mass").value;
  r.extra("mu_K", muk);
  if (param_bool(job.params, "volume")) {
    const auto kinks = m == 1 ? proj.kink_angles() : std::vector<double>{};
    const Estimate v = star_volume(proj.polar(), direction_rule(n * m, direction_options(job, "quadrature"), kinks));
    r.extra("polar_volume", v.value);
    r.extra("polar_volume_stderr", v.stderr_);
    r.extra("mu_K_times_polar_volume", std::pow(muk, n * m) * v.value);
  }
  if (param_bool(job.params, "surface")) {
    const FacetMeasure s = weighted_surface_measure(job.k, job.mu);
    r.extra("surface_total", s.total());
    const BoundaryMeasure b = boundary_measure_total(job.k, job.mu, param_num(job.params, "epsilon", 1e-3));
    r.extra("boundary_total", b.total);
    r.extra("boundary_epsilon_estimate", b.epsilon_estimate);
    for (std::size_t i = 0; i < s.atoms.size(); ++i) r.extra("atom_" + std::to_string(i), s.atoms[i].weight);
  }
  const auto dirs = directions(job, m, 16);
  r.columns = direction_columns(n * m);
  r.columns.push_back("h_Pi");
  r.columns.push_back("rho_Pi_polar");
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    auto row = direction_row(i, dirs[i].flat());
    const double h = projection_support(job.k, job.mu, dirs[i].blocks());
    row.push_back(h);
    row.push_back(polar_projection_radial(job.k, job.mu, dirs[i]));
    r.rows.push_back(std::move(row));
  }
  r.lhs = r.rows.front()[n * m + 1];
  r.samples = static_cast<long>(dirs.size());
  return r;
}

inline double parse_p(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw InputError("p: expected a number or \"inf\"");
  }
  return io::number(j, "p");
}

inline VerifyReport cmd_rmb(const Job& job) {
  io::expect_keys(job.params, {"m", "p", "method", "directions", "limit", "p_seq", "tolerance", "seed"}, "params");
  const int n = job.k.dim(), m = param_m(job);
  const auto dirs = directions(job, m, 8);
  if (param_bool(job.params, "limit")) {
    VerifyReport worst;
    bool first = true;
    for (const auto& th : dirs) {
      VerifyReport rep = rmb_limit_neg1(job.k, job.mu, th, param_list(job.params, "p_seq", {-0.9, -0.99, -0.999}),
                                        tolerance(job, 0.01));
      if (first || rep.margin < worst.margin) worst = rep;
      first = false;
    }
    worst.samples = static_cast<long>(dirs.size());
    worst.seed = job.seed;
    return worst;
  }
  const double p = job.params.contains("p") ? parse_p(job.params.at("p")) : 1.0;
  const std::string method = job.params.value("method", "direct");
  if (method != "direct" && method != "mellin" && method != "both")
    throw InputError("method: expected direct, mellin or both");
  VerifyReport r = computed("rmb");
  r.seed = job.seed;
  r.columns = direction_columns(n * m);
  r.columns.push_back("rho_D");
  if (method != "mellin") r.columns.push_back("rho_direct");
  if (method != "direct") r.columns.push_back("rho_mellin");
  if (method == "both") r.columns.push_back("relative_difference");
  struct Row {
    double d, direct = 0.0, mellin = 0.0;
  };
  auto vals = parallel_map<Row>(dirs.size(), [&](std::size_t i) {
    Row row{diffbody_radial(job.k, dirs[i])};
    if (method != "mellin") row.direct = rmb_radial_direct(job.k, job.mu, p, dirs[i]);
    if (method != "direct")
      row.mellin = p == 0.0 ? rmb_radial_p0(job.k, job.mu, dirs[i]) : rmb_radial_mellin(job.k, job.mu, p, dirs[i]);
    return row;
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    auto row = direction_row(i, dirs[i].flat());
    row.push_back(vals[i].d);
    if (method != "mellin") row.push_back(vals[i].direct);
    if (method != "direct") row.push_back(vals[i].mellin);
    if (method == "both") {
      const double diff = std::abs(vals[i].direct - vals[i].mellin) / vals[i].direct;
      worst = std::max(worst, diff);
      row.push_back(diff);
    }
    r.rows.push_back(std::move(row));
  }
  r.lhs = method == "mellin" ? vals.front().mellin : vals.front().direct;
  r.rhs = vals.front().d;
  r.ratio = r.lhs / r.rhs;
  r.samples = static_cast<long>(dirs.size());
  if (method == "both") {
    r.tolerance = tolerance(job, 5e-3);
    r.margin = r.tolerance - worst;
    r.pass = worst <= r.tolerance;
    r.extra("max_relative_difference", worst);
  }
  return r;
}

inline VerifyReport cmd_chain(const Job& job) {
  io::expect_keys(job.params, {"m", "branch", "s", "function", "p_list", "directions", "tolerance", "seed"}, "params");
  const int m = param_m(job);
  ChainSpec spec;
  const std::string branch = job.params.value("branch", "s");
  if (branch == "s") {
    spec.branch = ChainSpec::Branch::s;
    const auto& c = job.mu.density().concavity;
    spec.s = param_num(job.params, "s", c.kind == Concavity::Kind::s_concave ? c.s : 1.0 / job.k.dim());
  } else if (branch == "F" || branch == "Q") {
    spec.branch = branch == "F" ? ChainSpec::Branch::F : ChainSpec::Branch::Q;
    spec.f = io::parse_function(io::require(job.params, "function", "params"));
  } else {
    throw InputError("branch: expected s, F or Q");
  }
  spec.p_list = param_list(job.params, "p_list", {-0.5, 0.5, 1.0, 2.0});
  spec.directions = directions(job, m, 200);
  if (job.tolerance || job.params.contains("tolerance")) spec.tolerance = tolerance(job, -1.0);
  if (spec.f && spec.branch == ChainSpec::Branch::F) {
    std::string why;
    const double muk = integrate_over_polytope(job.mu, job.k, "cli-mass").value;
    if (!check_concavity_f(*spec.f, muk, &why)) throw InputError(why);
  }
  VerifyReport r = chain_check(job.k, job.mu, spec);
  r.seed = job.seed;
  const double muk = r.get("mu_K");
  const std::vector<double> ps(spec.p_list.rbegin(), spec.p_list.rend());
  for (double p : ps) {
    double c;
    if (spec.branch == ChainSpec::Branch::s) c = berwald_const_s(spec.s, p);
    else if (spec.branch == ChainSpec::Branch::Q) c = berwald_const_Q(*spec.f, p, muk);
    else c = spec.f->name == "power" && p == 0.0 ? berwald_const_s(spec.f->s, 0.0) : berwald_const_F(*spec.f, p, muk);
    r.extra("C(p=" + io::format_double(p) + ")", c);
  }
  return r;
}

inline std::vector<Density> parse_nus(const Job& job, int m) {
  std::vector<Density> nus;
  if (job.params.contains("nu")) {
    const json& arr = job.params.at("nu");
    if (!arr.is_array() || arr.empty()) throw InputError("nu: expected a nonempty array of densities");
    for (const auto& d : arr) nus.push_back(io::parse_density(d, job.k.dim()));
  } else {
    for (int i = 0; i < m; ++i) nus.push_back(Density::constant(job.k.dim()));
  }
  return nus;
}

inline VerifyReport cmd_zhang(const Job& job) {
  io::expect_keys(job.params, {"m", "s", "function", "nu", "directions", "per_arc", "tolerance", "seed"}, "params");
  int m = param_m(job);
  const auto nus = parse_nus(job, m);
  if (job.params.contains("nu") && job.params.contains("m") && static_cast<int>(nus.size()) != m)
    throw InputError("verify-zhang: m does not match the number of nu densities");
  m = static_cast<int>(nus.size());
  const DirectionOptions opt = direction_options(job);
  const double tol = tolerance(job, 0.02);
  if (job.params.contains("function")) {
    const ConcavityF f = io::parse_function(job.params.at("function"));
    const auto& c = job.mu.density().concavity;
    const bool ok = (c.kind == Concavity::Kind::f_concave && c.tag == f.name) ||
                    (f.is_log && (c.kind == Concavity::Kind::log_concave || c.kind == Concavity::Kind::s_concave)) ||
                    (!f.is_log && c.kind == Concavity::Kind::s_concave && c.s >= f.s - 1e-12);
    if (!ok) throw InputError("verify-zhang: measure concavity tag does not provide the requested F-concavity");
    return general_zhang_check(job.k, job.mu, f, nus, opt, tol);
  }
  const auto& c = job.mu.density().concavity;
  if (c.kind != Concavity::Kind::s_concave || !(c.s > 0.0))
    throw InputError("verify-zhang: the s form needs an s-concave measure with s > 0");
  const double s = param_num(job.params, "s", c.s);
  if (s > c.s + 1e-12) throw InputError("verify-zhang: s exceeds the declared concavity of the measure");
  {
    auto [lo, hi] = job.k.bounding_box();
    const std::string why = spot_check_concavity(job.mu.density(), lo, hi, job.seed);
    if (!why.empty()) throw InputError(why);
  }
  return zhang_check(job.k, job.mu, s, nus, opt, tol);
}

inline VerifyReport cmd_rs(const Job& job) {
  io::expect_keys(job.params, {"m", "directions", "seed"}, "params");
  VerifyReport r = rogers_shephard_check(job.k, param_m(job), direction_options(job));
  r.extra("binomial", gen_binom(static_cast<double>(job.k.dim() * param_m(job)), job.k.dim()));
  return r;
}

inline VerifyReport cmd_variational(const Job& job) {
  io::expect_keys(job.params, {"m", "directions", "steps", "tolerance", "seed"}, "params");
  const int m = param_m(job);
  const auto dirs = directions(job, m, 10);
  const auto steps = param_list(job.params, "steps", {1e-2, 5e-3, 2.5e-3});
  const double tol = tolerance(job, 1e-3);
  auto reps = parallel_map<VerifyReport>(dirs.size(), [&](std::size_t i) {
    return variational_check(job.k, job.mu, dirs[i], steps, tol);
  });
  VerifyReport r;
  r.name = "variational";
  r.columns = {"direction", "derivative", "minus_h", "relative_error"};
  double worst = -1.0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const double err = reps[i].get("relative_error");
    r.rows.push_back({static_cast<double>(i), reps[i].lhs, reps[i].rhs, err});
    if (err > worst) {
      worst = err;
      r.lhs = reps[i].lhs;
      r.rhs = reps[i].rhs;
      r.ratio = reps[i].ratio;
    }
  }
  r.bound = 1.0;
  r.tolerance = tol;
  r.margin = tol - worst;
  r.pass = worst <= tol;
  r.samples = static_cast<long>(dirs.size());
  r.seed = job.seed;
  r.extra("max_relative_error", worst);
  return r;
}

inline VerifyReport cmd_linear(const Job& job) {
  io::expect_keys(job.params, {"m", "T", "directions", "tolerance", "seed"}, "params");
  const int m = param_m(job);
  const Matrix t = io::matrix(io::require(job.params, "T", "params"), "T");
  if (t.rows() != job.k.dim() || t.cols() != job.k.dim()) throw InputError("T: must be n x n");
  const auto dirs = directions(job, m, 50);
  const double tol = job.tolerance || job.params.contains("tolerance") ? tolerance(job, -1.0) : -1.0;
  VerifyReport r = linear_covariance_check(job.k, job.mu, LinearMap(t), dirs, tol);
  r.seed = job.seed;
  return r;
}

/// Star body named in a "star" or "support" object.
inline StarBodyFn parse_star(const Job& job, const json& j) {
  io::expect_keys(j, {"type", "radius", "m", "p"}, "star");
  const std::string type = io::require(j, "type", "star").get<std::string>();
  const int n = job.k.dim();
  if (type == "ball") {
    const double rad = param_num(j, "radius", 1.0);
    const int d = param_int(j, "m", 1) * n;
    if (!(rad > 0.0)) throw InputError("star.radius must be positive");
    return {d, [rad](const Vector&) { return rad; }};
  }
  if (type == "body") {
    const Polytope k = job.k;
    return {n, [k](const Vector& u) { return radial(k, k.center(), u); }};
  }
  const int m = param_int(j, "m", 1);
  if (type == "diffbody") return diffbody(job.k, m);
  if (type == "polar-projection") return ProjectionBody(job.k, job.mu, m).polar();
  if (type == "rmb") return RadialMeanBody{job.k, job.mu, m, j.contains("p") ? parse_p(j.at("p")) : 1.0}.star();
  throw InputError("star: type must be ball, body, diffbody, polar-projection or rmb");
}

inline VerifyReport cmd_dualvol(const Job& job) {
  io::expect_keys(job.params, {"star", "kernel", "directions", "per_arc", "volume", "seed"}, "params");
  const StarBodyFn l = job.params.contains("star") ? parse_star(job, job.params.at("star"))
                                                   : parse_star(job, json{{"type", "body"}});
  const int d = l.dim;
  const KernelG g = job.params.contains("kernel") ? io::parse_kernel(job.params.at("kernel"), d)
                                                  : KernelG::power(d, d - 1.0, d);
  if (g.dim != d) throw InputError("kernel: dimension does not match the star body");
  const std::string why = spot_check_kernel(g, 1.0, job.seed);
  if (!why.empty()) throw InputError(why);
  const DirectionOptions opt = direction_options(job);
  const SphereQuadrature q = d == 2 ? sphere::trapezoid(opt.count_low) : sphere_quadrature(d, d == 3 ? opt.count_low : opt.count_high, job.seed);
  const Estimate v = dual_volume(g, l, q);
  VerifyReport r = computed("dualvol");
  r.seed = job.seed;
  r.lhs = v.value;
  r.samples = static_cast<long>(q.size());
  r.extra("dual_volume", v.value);
  r.extra("stderr", v.stderr_);
  if (param_bool(job.params, "volume")) r.extra("star_volume", star_volume(l, q).value);
  return r;
}

}  // namespace detail

/// Ray function fixtures for the chord inequalities.
namespace fixtures {

/// f = c (1 - w(u) t)(1 + kappa t), t = r / rho_L(u); w = 1 gives affine rays when kappa = 0.
inline ConcaveRayFn shaped(StarBodyFn l, double c, double kappa, std::function<double(const Vector&)> w) {
  ConcaveRayFn f;
  f.support = l;
  f.eval = [l, c, kappa, w](double r, const Vector& u) {
    const double rho = l.radial(u);
    if (r >= rho) return 0.0;
    const double t = r / rho;
    return c * std::max(0.0, (1.0 - w(u) * t) * (1.0 + kappa * t));
  };
  f.value_at_zero = [c](const Vector&) { return c; };
  f.ray_derivative_at_zero = [l, c, kappa, w](const Vector& u) { return c * (kappa - w(u)) / l.radial(u); };
  return f;
}

inline ConcaveRayFn affine(StarBodyFn l, double c) {
  return shaped(std::move(l), c, 0.0, [](const Vector&) { return 1.0; });
}

inline ConcaveRayFn concave(StarBodyFn l, double c, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw InputError("concave fixture: kappa must lie in (0, 1)");
  return shaped(std::move(l), c, kappa, [](const Vector&) { return 1.0; });
}

/// Constant in r wherever u_0 <= 0, so those directions fall in Omega_f.
inline ConcaveRayFn plateau(StarBodyFn l, double c) {
  return shaped(std::move(l), c, 0.0, [](const Vector& u) { return std::max(0.0, u(0)); });
}

/// f = g(K, r u)^s on D^m K; the ray derivative at 0 comes from extrapolated differences.
inline ConcaveRayFn covariogram_power(const Polytope& k, const WeightedMeasure& mu, int m, double s) {
  const int n = k.dim();
  ConcaveRayFn f;
  f.support = diffbody(k, m);
  f.eval = [k, mu, n, s](double r, const Vector& u) {
    const double g = covariogram(k, mu, MDirection::from_flat(u, n).scaled(r)).value;
    return g > 0.0 ? std::pow(g, s) : 0.0;
  };
  f.value_at_zero = [k, mu, s](const Vector&) { return std::pow(integrate_over_polytope(mu, k, "chord-mass").value, s); };
  f.ray_derivative_at_zero = [k, mu, n, s](const Vector& u) {
    const MDirection th = MDirection::from_flat(u, n);
    const double g0 = integrate_over_polytope(mu, k, "chord-mass").value;
    return s * std::pow(g0, s - 1.0) * variational_check(k, mu, th).lhs;
  };
  f.breakpoints = [k, n](const Vector& u) {
    const MDirection th = MDirection::from_flat(u, n);
    return covariogram_breakpoints(k, th, diffbody_radial(k, th));
  };
  return f;
}

}  // namespace fixtures

namespace detail {

inline VerifyReport cmd_chord(const Job& job) {
  io::expect_keys(job.params, {"branch", "fixture", "kernel", "h", "star", "c", "kappa", "m", "directions", "tolerance",
                               "seed"},
                  "params");
  const std::string branch = job.params.value("branch", "lower");
  if (branch != "lower" && branch != "upper") throw InputError("branch: expected lower or upper");
  const std::string fixture = job.params.value("fixture", "affine");
  const double c = param_num(job.params, "c", 1.0);
  if (!(c > 0.0)) throw InputError("c must be positive");
  const int m = param_m(job);
  std::optional<ConcaveRayFn> f;
  double default_h = 1.0;
  if (fixture == "covariogram") {
    const auto& conc = job.mu.density().concavity;
    if (conc.kind != Concavity::Kind::s_concave || !(conc.s > 0.0))
      throw InputError("covariogram fixture: needs an s-concave measure with s > 0");
    f = fixtures::covariogram_power(job.k, job.mu, m, conc.s);
    default_h = 1.0 / conc.s;
  } else {
    const StarBodyFn l = job.params.contains("star") ? parse_star(job, job.params.at("star"))
                                                     : StarBodyFn{job.k.dim() * m, [](const Vector&) { return 1.0; }};
    if (fixture == "affine") f = fixtures::affine(l, c);
    else if (fixture == "concave") f = fixtures::concave(l, c, param_num(job.params, "kappa", 0.5));
    else if (fixture == "plateau") f = fixtures::plateau(l, c);
    else throw InputError("fixture: expected affine, concave, plateau or covariogram");
  }
  const int d = f->support.dim;
  double h_exp = default_h;
  if (job.params.contains("h")) {
    const json& hj = job.params.at("h");
    io::expect_keys(hj, {"type", "exponent"}, "h");
    if (io::require(hj, "type", "h").get<std::string>() != "power") throw InputError("h: type must be power");
    h_exp = io::number(io::require(hj, "exponent", "h"), "h.exponent");
    if (!(h_exp > 0.0)) throw InputError("h: exponent must be positive");
  }
  const std::function<double(double)> h = [h_exp](double t) { return std::pow(t, h_exp); };
  const KernelG g = job.params.contains("kernel") ? io::parse_kernel(job.params.at("kernel"), d)
                                                  : KernelG::power(d, d - 1.0);
  if (g.dim != d) throw InputError("kernel: dimension does not match the ray function");
  const std::string why = spot_check_kernel(g, 1.0, job.seed);
  if (!why.empty()) throw InputError(why);
  const int count = param_int(job.params, "directions", d == 2 ? 512 : 4000);
  const SphereQuadrature q = sphere_quadrature(d, count, job.seed);
  ChordOptions opt;
  opt.tolerance = tolerance(job, opt.tolerance);
  VerifyReport r = branch == "lower" ? chord_lower_check(*f, h, g, q, opt) : chord_upper_check(*f, h, g, q, opt);
  r.seed = job.seed;
  r.notes.push_back("fixture " + fixture);
  return r;
}

inline Job parse_job(const json& spec, const Overrides& ov) {
  io::expect_keys(spec, {"command", "body", "measure", "params", "output", "outfile"}, "job");
  Job job{io::require(spec, "command", "job").get<std::string>(), io::parse_body(io::require(spec, "body", "job")),
          WeightedMeasure::lebesgue(1), json::object(), 42, std::nullopt};
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), job.command) == names.end())
    throw InputError("job: unknown command '" + job.command + "'");
  job.mu = io::parse_measure(spec.contains("measure") ? spec.at("measure") : json(), job.k.dim());
  if (spec.contains("params")) {
    if (!spec.at("params").is_object()) throw InputError("params: expected an object");
    job.params = spec.at("params");
  }
  if (job.params.contains("seed")) job.seed = job.params.at("seed").get<std::uint64_t>();
  if (ov.seed) job.seed = *ov.seed;
  job.tolerance = ov.tolerance;
  return job;
}

inline VerifyReport dispatch(const Job& job) {
  static const std::map<std::string, std::function<VerifyReport(const Job&)>> table = {
      {"covariogram", cmd_covariogram}, {"diffbody", cmd_diffbody},
      {"projbody", cmd_projbody},       {"rmb", cmd_rmb},
      {"verify-chain", cmd_chain},      {"verify-zhang", cmd_zhang},
      {"verify-rs", cmd_rs},            {"verify-variational", cmd_variational},
      {"verify-linear", cmd_linear},    {"verify-chord", cmd_chord},
      {"dualvol", cmd_dualvol},
  };
  return table.at(job.command)(job);
}

}  // namespace detail

/// Parses and executes one job; never throws.
inline Outcome run(const std::string& text, const Overrides& ov = {}) {
  Outcome out;
  try {
    const json spec = json::parse(text);
    out.format = ov.output ? *ov.output : spec.value("output", "json");
    if (out.format != "json" && out.format != "csv") throw InputError("output: expected json or csv");
    out.outfile = ov.outfile ? *ov.outfile : spec.value("outfile", "");
    if (ov.threads) {
      if (*ov.threads < 1) throw InputError("--threads must be positive");
      thread_cap() = *ov.threads;
    }
    const detail::Job job = detail::parse_job(spec, ov);
    const VerifyReport rep = detail::dispatch(job);
    out.report = out.format == "json" ? io::to_json(rep, job.command).dump(2) + "\n" : io::to_csv(rep);
    out.exit_code = rep.pass ? 0 : 1;
    if (!rep.pass) out.diagnostic = rep.name + ": check failed (margin " + io::format_double(rep.margin) + ")";
  } catch (const json::exception& e) {
    out.exit_code = 2;
    out.diagnostic = std::string("input error: ") + e.what();
  } catch (const NumericError& e) {
    out.exit_code = 3;
    out.diagnostic = std::string("numeric error: ") + e.what();
  } catch (const std::invalid_argument& e) {
    out.exit_code = 2;
    out.diagnostic = std::string("input error: ") + e.what();
  } catch (const std::exception& e) {
    out.exit_code = 3;
    out.diagnostic = std::string("numeric error: ") + e.what();
  }
  return out;
}

}  // namespace covbody::cli

#endif  // COVBODY_CLI_HPP
