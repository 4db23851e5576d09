#ifndef COVBODY_TYPES_HPP
#define COVBODY_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace covbody {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Scalar function on R^d (densities, integrands).
using PointFn = std::function<double(const Vector&)>;

/// Malformed input: unbounded or empty bodies, singular maps, bad schemas,
/// concavity tags contradicted by a spot-check.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (p <= -1, Gamma poles).
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

/// Solver or quadrature failure.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
/// Predicate tolerance for geometric membership and incidence tests.
inline constexpr double geom = 1e-9;
/// Unit-norm tolerance for normals and directions.
inline constexpr double unit = 1e-12;
/// Pivot threshold of the simplex method.
inline constexpr double pivot = 1e-12;
}  // namespace tol

inline constexpr double pi = 3.14159265358979323846;

/// Estimate with a standard error; stderr is 0 for deterministic paths.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Surface measure |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
inline double sphere_area(int d) { return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d); }

/// Volume of the unit ball in R^d.
inline double ball_volume(int d) { return sphere_area(d) / d; }

}  // namespace covbody

#endif  // COVBODY_TYPES_HPP
