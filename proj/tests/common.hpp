#ifndef COVBODY_TESTS_COMMON_HPP
#define COVBODY_TESTS_COMMON_HPP

#include <covbody/covbody.hpp>

#include <cmath>
#include <random>
#include <vector>

namespace fx {

using covbody::Matrix;
using covbody::Polytope;
using covbody::Vector;

inline Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

inline Vector v3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

inline Polytope triangle() { return covbody::named::simplex(2); }
inline Polytope square() { return covbody::named::cube(2); }
inline Polytope segment() { return covbody::named::cube(1); }
inline Polytope cross3() { return covbody::named::cross(3); }

/// Square centred at the origin, [-1/2, 1/2]^2.
inline Polytope centred_square() {
  return Polytope::from_vertices({v2(-0.5, -0.5), v2(0.5, -0.5), v2(0.5, 0.5), v2(-0.5, 0.5)});
}

/// Irregular pentagon containing the origin.
inline Polytope pentagon() {
  return Polytope::from_vertices({v2(-1.0, -0.4), v2(0.8, -0.9), v2(1.2, 0.3), v2(0.1, 1.1), v2(-0.9, 0.6)});
}

inline double angle_unit(const Vector& u) { return std::atan2(u(1), u(0)); }

inline Vector unit_angle(double t) { return v2(std::cos(t), std::sin(t)); }

/// Vertices of a random convex polygon: points on an ellipse at sorted random angles.
inline std::vector<Vector> random_polygon(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> uni(0.0, 2.0 * covbody::pi);
  std::uniform_real_distribution<double> ax(0.5, 2.0);
  const double a = ax(rng), b = ax(rng);
  std::vector<double> t(count);
  for (auto& x : t) x = uni(rng);
  std::sort(t.begin(), t.end());
  std::vector<Vector> out;
  for (double s : t) out.push_back(v2(a * std::cos(s), b * std::sin(s)));
  return out;
}

/// Shoelace area of a polygon listed counterclockwise.
inline double shoelace(const std::vector<Vector>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vector& x = p[i];
    const Vector& y = p[(i + 1) % p.size()];
    a += x(0) * y(1) - x(1) * y(0);
  }
  return 0.5 * std::abs(a);
}

inline Matrix random_matrix(std::mt19937_64& rng, int n, double lo = 0.5) {
  std::normal_distribution<double> g(0.0, 1.0);
  while (true) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    if (std::abs(m.determinant()) > lo) return m;
  }
}

inline Vector random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = g(rng);
  return v / v.norm();
}

}  // namespace fx

#endif  // COVBODY_TESTS_COMMON_HPP
