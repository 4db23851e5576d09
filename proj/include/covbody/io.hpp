#ifndef COVBODY_IO_HPP
#define COVBODY_IO_HPP

// JSON schemas for bodies, densities and kernels, and report serialization.

#include "genvol.hpp"
#include "measure.hpp"
#include "polytope.hpp"
#include "report.hpp"

#include <nlohmann/json.hpp>

#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace covbody::io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

inline void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw InputError(where + ": unknown field '" + it.key() + "'");
}

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
  return j.get<int>();
}

inline Vector vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + ": expected a nonempty array of numbers");
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = number(j[i], where);
  return v;
}

inline std::vector<Vector> vectors(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of vectors");
  std::vector<Vector> out;
  for (const auto& e : j) out.push_back(vector(e, where));
  return out;
}

inline Matrix matrix(const json& j, const std::string& where) {
  const auto rows = vectors(j, where);
  if (rows.empty()) throw InputError(where + ": empty matrix");
  Matrix m(static_cast<int>(rows.size()), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw InputError(where + ": ragged matrix");
    m.row(static_cast<int>(i)) = rows[i].transpose();
  }
  return m;
}

/// {"type":"vrep"|"hrep"|"named", ...}.
inline Polytope parse_body(const json& j) {
  const std::string where = "body";
  if (!j.is_object()) throw InputError("body: expected an object");
  std::string type = j.contains("type") ? j.at("type").get<std::string>() : (j.contains("name") ? "named" : "");
  if (type == "vrep") {
    expect_keys(j, {"type", "vertices"}, where);
    return Polytope::from_vertices(vectors(require(j, "vertices", where), "body.vertices"));
  }
  if (type == "hrep") {
    expect_keys(j, {"type", "halfspaces"}, where);
    const json& hs = require(j, "halfspaces", where);
    if (!hs.is_array() || hs.empty()) throw InputError("body.halfspaces: expected a nonempty array");
    std::vector<Halfspace> out;
    int dim = -1;
    for (const auto& h : hs) {
      expect_keys(h, {"a", "b"}, "body.halfspaces[]");
      Vector a = vector(require(h, "a", "halfspace"), "halfspace.a");
      if (dim >= 0 && a.size() != dim) throw InputError("body.halfspaces: dimension mismatch");
      dim = static_cast<int>(a.size());
      out.push_back({a, number(require(h, "b", "halfspace"), "halfspace.b")});
    }
    return Polytope::from_halfspaces(out, dim);
  }
  if (type == "named") {
    expect_keys(j, {"type", "name", "dim"}, where);
    const std::string name = require(j, "name", where).get<std::string>();
    const int dim = integer(require(j, "dim", where), "body.dim");
    if (dim < 1) throw InputError("body.dim must be positive");
    if (name == "simplex") return named::simplex(dim);
    if (name == "cube") return named::cube(dim);
    if (name == "cross") return named::cross(dim);
    throw InputError("body: unknown named body '" + name + "'");
  }
  throw InputError("body: type must be vrep, hrep or named");
}

inline Concavity parse_concavity(const json& j) {
  expect_keys(j, {"kind", "s", "tag"}, "concavity");
  const std::string kind = require(j, "kind", "concavity").get<std::string>();
  if (kind == "s") return Concavity::power(number(require(j, "s", "concavity"), "concavity.s"));
  if (kind == "log") return Concavity::log();
  if (kind == "none") return Concavity::none();
  if (kind == "f") return Concavity::f(require(j, "tag", "concavity").get<std::string>());
  throw InputError("concavity: kind must be s, log, f or none");
}

/// Density schema; `dim` supplies the dimension for constant and gaussian densities.
inline Density parse_density(const json& j, int dim) {
  const std::string where = "density";
  if (!j.is_object()) throw InputError("density: expected an object");
  const std::string type = require(j, "type", where).get<std::string>();
  if (j.contains("dim")) dim = integer(j.at("dim"), "density.dim");
  std::optional<Density> d;
  if (type == "constant") {
    expect_keys(j, {"type", "c", "dim", "concavity", "integration"}, where);
    d = Density::constant(dim, j.contains("c") ? number(j.at("c"), "density.c") : 1.0);
  } else if (type == "gaussian") {
    expect_keys(j, {"type", "sigma", "dim", "concavity", "integration"}, where);
    d = Density::gaussian(dim, j.contains("sigma") ? number(j.at("sigma"), "density.sigma") : 1.0);
  } else if (type == "linear-power") {
    expect_keys(j, {"type", "a", "b", "k", "dim", "concavity", "integration"}, where);
    Vector a = vector(require(j, "a", where), "density.a");
    d = Density::linear_power(a, j.contains("b") ? number(j.at("b"), "density.b") : 0.0,
                              j.contains("k") ? number(j.at("k"), "density.k") : 1.0);
  } else if (type == "product") {
    expect_keys(j, {"type", "factors", "dim", "concavity", "integration"}, where);
    const json& fs = require(j, "factors", where);
    if (!fs.is_array() || fs.empty()) throw InputError("density.factors: expected a nonempty array");
    std::vector<Density> factors;
    for (const auto& f : fs) {
      if (!f.contains("dim") && f.value("type", "") != "linear-power")
        throw InputError("density.factors: each factor needs a dim");
      factors.push_back(parse_density(f, 0));
    }
    d = Density::product(std::move(factors));
  } else {
    throw InputError("density: unknown type '" + type + "'");
  }
  if (j.contains("concavity")) d->concavity = parse_concavity(j.at("concavity"));
  return *d;
}

inline Integration parse_integration(const json& j, const Density& d) {
  expect_keys(j, {"kind", "levels", "samples", "seed"}, "integration");
  const std::string kind = require(j, "kind", "integration").get<std::string>();
  if (kind == "exact") return Integration::exact();
  if (kind == "grid") return Integration::grid(j.contains("levels") ? integer(j.at("levels"), "levels") : 16);
  if (kind == "montecarlo") {
    Integration in = Integration::montecarlo();
    if (j.contains("samples")) in.samples = j.at("samples").get<long>();
    if (j.contains("seed")) in.seed = j.at("seed").get<std::uint64_t>();
    return in;
  }
  (void)d;
  throw InputError("integration: kind must be exact, grid or montecarlo");
}

inline WeightedMeasure parse_measure(const json& j, int dim) {
  if (j.is_null()) return WeightedMeasure::lebesgue(dim);
  Density d = parse_density(j, dim);
  if (d.dim() != dim) throw InputError("measure: density dimension does not match the body");
  if (j.contains("integration")) return WeightedMeasure(d, parse_integration(j.at("integration"), d));
  return WeightedMeasure(d);
}

/// {"type":"power","exponent":a} or {"type":"power-density","exponent":a,"density":{...}}.
inline KernelG parse_kernel(const json& j, int dim) {
  expect_keys(j, {"type", "exponent", "density", "scale"}, "kernel");
  const std::string type = require(j, "type", "kernel").get<std::string>();
  const double alpha = number(require(j, "exponent", "kernel"), "kernel.exponent");
  if (type == "power") return KernelG::power(dim, alpha, j.contains("scale") ? number(j.at("scale"), "kernel.scale") : 1.0);
  if (type == "power-density") return KernelG::power_density(alpha, parse_density(require(j, "density", "kernel"), dim));
  throw InputError("kernel: type must be power or power-density");
}

inline ConcavityF parse_function(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "log") return ConcavityF::log();
    throw InputError("function: unknown name");
  }
  expect_keys(j, {"type", "s"}, "function");
  const std::string type = require(j, "type", "function").get<std::string>();
  if (type == "log") return ConcavityF::log();
  if (type == "power") return ConcavityF::power(number(require(j, "s", "function"), "function.s"));
  throw InputError("function: type must be power or log");
}

/// Shortest decimal that round-trips, for stable text output.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  for (int prec = 1; prec <= 17; ++prec) {
    std::ostringstream t;
    t << std::setprecision(prec) << v;
    if (std::stod(t.str()) == v) return t.str();
  }
  return os.str();
}

inline ojson num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline ojson to_json(const VerifyReport& r, const std::string& command) {
  ojson j;
  j["schema_version"] = 1;
  j["command"] = command;
  j["name"] = r.name;
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["ratio"] = num(r.ratio);
  j["bound"] = num(r.bound);
  j["margin"] = num(r.margin);
  j["tolerance"] = num(r.tolerance);
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["notes"] = r.notes;
  ojson extras = ojson::object();
  for (const auto& [k, v] : r.extras) extras[k] = num(v);
  j["extras"] = extras;
  if (!r.columns.empty()) {
    j["columns"] = r.columns;
    ojson rows = ojson::array();
    for (const auto& row : r.rows) {
      ojson a = ojson::array();
      for (double v : row) a.push_back(num(v));
      rows.push_back(a);
    }
    j["rows"] = rows;
  }
  return j;
}

/// One row per table entry; reports without a table produce one summary row.
inline std::string to_csv(const VerifyReport& r) {
  std::ostringstream os;
  if (!r.columns.empty()) {
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << "\n";
    for (const auto& row : r.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
      os << "\n";
    }
    return os.str();
  }
  os << "name,lhs,rhs,ratio,bound,margin,pass,samples,seed";
  for (const auto& [k, v] : r.extras) os << "," << k;
  os << "\n"
     << r.name << "," << format_double(r.lhs) << "," << format_double(r.rhs) << "," << format_double(r.ratio) << ","
     << format_double(r.bound) << "," << format_double(r.margin) << "," << (r.pass ? "true" : "false") << ","
     << r.samples << "," << r.seed;
  for (const auto& [k, v] : r.extras) os << "," << format_double(v);
  os << "\n";
  return os.str();
}

}  // namespace covbody::io

#endif  // COVBODY_IO_HPP
