#ifndef COVBODY_POLYTOPE_HPP
#define COVBODY_POLYTOPE_HPP

#include "linprog.hpp"
#include "types.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

namespace covbody {

/// The set {x : <normal, x> <= offset}, normal of unit length.
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// Simplex given by its k+1 vertices; volume is its k-dimensional measure.
struct Simplex {
  std::vector<Vector> vertices;
  double volume = 0.0;
};

struct Facet {
  Vector normal;
  double offset = 0.0;
  /// (n-1)-dimensional Hausdorff measure; 1 for the endpoints of a segment.
  double area = 0.0;
  std::vector<Vector> vertices;
  std::vector<Simplex> simplices;
};

/// Invertible linear map of R^n.
class LinearMap {
 public:
  explicit LinearMap(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw InputError("LinearMap: matrix must be square");
    const double det = m_.determinant();
    if (!(std::abs(det) > 1e-12)) throw InputError("LinearMap: singular matrix");
    det_abs_ = std::abs(det);
    inv_ = m_.inverse();
  }
  const Matrix& matrix() const { return m_; }
  const Matrix& inverse() const { return inv_; }
  double det_abs() const { return det_abs_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Matrix m_;
  Matrix inv_;
  double det_abs_ = 1.0;
};

namespace detail {

inline double simplex_volume(const std::vector<Vector>& v) {
  const int k = static_cast<int>(v.size()) - 1;
  if (k == 0) return 1.0;
  Matrix E(v[0].size(), k);
  for (int i = 0; i < k; ++i) E.col(i) = v[i + 1] - v[0];
  if (E.rows() == k) return std::abs(E.determinant()) / factorial(k);
  // k-volume from the QR factor; the Gram determinant squares the conditioning.
  const Matrix r = Eigen::HouseholderQR<Matrix>(E).matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return std::abs(r.diagonal().prod()) / factorial(k);
}

inline int affine_rank(const std::vector<Vector>& pts, double tol) {
  if (pts.size() <= 1) return 0;
  Matrix E(pts[0].size(), static_cast<int>(pts.size()) - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) E.col(static_cast<int>(i) - 1) = pts[i] - pts[0];
  Eigen::ColPivHouseholderQR<Matrix> qr(E);
  qr.setThreshold(tol);
  return static_cast<int>(qr.rank());
}

}  // namespace detail

/// Bounded convex polytope with nonempty interior, stored as an irredundant
/// H-representation together with its vertices, facets and a triangulation.
class Polytope {
 public:
  /// Intersection of halfspaces (normals need not be unit). Returns nullopt when
  /// the intersection is empty or has no interior. Throws InputError when unbounded.
  static std::optional<Polytope> intersection(const std::vector<Halfspace>& hs, int dim) {
    Polytope p;
    p.dim_ = dim;
    if (dim < 1) throw InputError("Polytope: dimension must be positive");
    std::vector<Halfspace> norm;
    for (const auto& h : hs) {
      if (h.normal.size() != dim) throw InputError("Polytope: halfspace dimension mismatch");
      const double len = h.normal.norm();
      if (!(len > 1e-14)) {
        if (h.offset < 0.0) return std::nullopt;
        continue;
      }
      norm.push_back({h.normal / len, h.offset / len});
    }
    if (!p.solve(std::move(norm))) return std::nullopt;
    return p;
  }

  /// Same as intersection but a missing interior is an input error.
  static Polytope from_halfspaces(const std::vector<Halfspace>& hs, int dim) {
    auto p = intersection(hs, dim);
    if (!p) throw InputError("Polytope: halfspaces define an empty or lower-dimensional set");
    return std::move(*p);
  }

  /// Convex hull of points; throws InputError if the hull has no interior.
  static Polytope from_vertices(const std::vector<Vector>& pts) {
    if (pts.empty()) throw InputError("Polytope: empty vertex list");
    const int n = static_cast<int>(pts[0].size());
    for (const auto& v : pts)
      if (v.size() != n) throw InputError("Polytope: vertex dimension mismatch");
    double scale = 1.0;
    for (const auto& v : pts) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    const double tol = tol::geom * scale;
    if (detail::affine_rank(pts, tol) < n) throw InputError("Polytope: vertices are affinely dependent");

    std::vector<Halfspace> hs;
    const int N = static_cast<int>(pts.size());
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    auto add_plane = [&](Vector a) {
      const double len = a.norm();
      if (len < 1e-14) return;
      a /= len;
      double b = a.dot(pts[idx[0]]);
      bool pos = false, neg = false;
      for (const auto& v : pts) {
        const double s = a.dot(v) - b;
        if (s > tol) pos = true;
        if (s < -tol) neg = true;
      }
      if (pos && neg) return;
      if (pos) {
        a = -a;
        b = -b;
      }
      for (const auto& h : hs)
        if ((h.normal - a).norm() < 1e-9) return;
      hs.push_back({a, b});
    };
    while (true) {
      if (n == 1) {
        add_plane(Vector::Ones(1));
      } else {
        Matrix E(n, n - 1);
        for (int i = 1; i < n; ++i) E.col(i - 1) = pts[idx[i]] - pts[idx[0]];
        Eigen::FullPivLU<Matrix> lu(E.transpose());
        lu.setThreshold(1e-12);
        if (lu.rank() == n - 1) {
          Matrix ker = lu.kernel();
          add_plane(ker.col(0));
        }
      }
      int d = n - 1;
      while (d >= 0 && idx[d] == N - n + d) --d;
      if (d < 0) break;
      ++idx[d];
      for (int i = d + 1; i < n; ++i) idx[i] = idx[i - 1] + 1;
    }
    // Enumerated vertices snap back to the input points they reproduce.
    Polytope p;
    p.dim_ = n;
    p.snap_ = &pts;
    if (!p.solve(std::move(hs))) throw InputError("Polytope: halfspaces define an empty or lower-dimensional set");
    p.snap_ = nullptr;
    return p;
  }

  int dim() const { return dim_; }
  const std::vector<Halfspace>& halfspaces() const { return hs_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  double volume() const { return volume_; }
  /// Chebyshev center and radius.
  const Vector& center() const { return center_; }
  double inradius() const { return inradius_; }

  Vector centroid() const {
    Vector c = Vector::Zero(dim_);
    for (const auto& s : simplices_) {
      Vector sc = Vector::Zero(dim_);
      for (const auto& v : s.vertices) sc += v;
      c += s.volume * sc / static_cast<double>(s.vertices.size());
    }
    return c / volume_;
  }

  bool contains(const Vector& x, double tol = tol::geom) const {
    for (const auto& h : hs_)
      if (h.normal.dot(x) > h.offset + tol) return false;
    return true;
  }

  std::pair<Vector, Vector> bounding_box() const {
    Vector lo = vertices_.front(), hi = vertices_.front();
    for (const auto& v : vertices_) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    return {lo, hi};
  }

 private:
  double scale() const {
    double s = 1.0;
    for (const auto& h : hs_) s = std::max(s, std::abs(h.offset));
    return s;
  }

  static lp::Result lp_over(const std::vector<Halfspace>& hs, int dim, const Vector& c, int skip = -1) {
    const int m = static_cast<int>(hs.size()) - (skip >= 0 ? 1 : 0);
    Matrix A(m, dim);
    Vector b(m);
    int r = 0;
    for (int i = 0; i < static_cast<int>(hs.size()); ++i) {
      if (i == skip) continue;
      A.row(r) = hs[i].normal.transpose();
      b(r++) = hs[i].offset;
    }
    return lp::maximize(A, b, c);
  }

  bool solve(std::vector<Halfspace> hs) {
    const int n = dim_;
    double sc = 1.0;
    for (const auto& h : hs) sc = std::max(sc, std::abs(h.offset));

    // Merge parallel duplicates, keeping the tighter offset.
    std::vector<Halfspace> uniq;
    for (auto& h : hs) {
      bool merged = false;
      for (auto& u : uniq) {
        if ((u.normal - h.normal).norm() < 1e-12) {
          u.offset = std::min(u.offset, h.offset);
          merged = true;
          break;
        }
      }
      if (!merged) uniq.push_back(h);
    }

    // Chebyshev center: maximize t subject to <a,x> + t <= b, t <= cap.
    {
      const int m = static_cast<int>(uniq.size());
      Matrix A = Matrix::Zero(m + 1, n + 1);
      Vector b(m + 1);
      for (int i = 0; i < m; ++i) {
        A.row(i).head(n) = uniq[i].normal.transpose();
        A(i, n) = 1.0;
        b(i) = uniq[i].offset;
      }
      A(m, n) = 1.0;
      b(m) = 1e12;
      Vector c = Vector::Zero(n + 1);
      c(n) = 1.0;
      auto res = lp::maximize(A, b, c);
      if (res.status != lp::Status::optimal) return false;
      // Slivers thinner than the incidence tolerance count as lower-dimensional.
      if (res.x(n) <= tol::geom * sc) return false;
      center_ = res.x.head(n);
      inradius_ = res.x(n);
    }

    // Boundedness.
    for (int k = 0; k < n; ++k) {
      for (double sgn : {1.0, -1.0}) {
        Vector c = Vector::Zero(n);
        c(k) = sgn;
        if (lp_over(uniq, n, c).status != lp::Status::optimal)
          throw InputError("Polytope: halfspaces define an unbounded set");
      }
    }

    // Redundancy pruning, one LP per halfspace against the remaining ones.
    for (int i = 0; i < static_cast<int>(uniq.size());) {
      auto res = lp_over(uniq, n, uniq[i].normal, i);
      if (res.status == lp::Status::optimal && res.value <= uniq[i].offset + tol::geom * sc) {
        uniq.erase(uniq.begin() + i);
      } else {
        ++i;
      }
    }
    hs_ = std::move(uniq);
    enumerate_vertices();
    build_facets();
    return true;
  }

  void enumerate_vertices() {
    const int n = dim_;
    const int m = static_cast<int>(hs_.size());
    const double tol = tol::geom * scale();
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    while (true) {
      Matrix A(n, n);
      Vector b(n);
      for (int i = 0; i < n; ++i) {
        A.row(i) = hs_[idx[i]].normal.transpose();
        b(i) = hs_[idx[i]].offset;
      }
      Eigen::FullPivLU<Matrix> lu(A);
      if (std::abs(A.determinant()) > 1e-12) {
        Vector x = lu.solve(b);
        if (snap_)
          for (const auto& q : *snap_)
            if ((q - x).norm() <= tol) {
              x = q;
              break;
            }
        if (contains(x, tol)) {
          bool dup = false;
          for (const auto& v : vertices_)
            if ((v - x).norm() <= tol) dup = true;
          if (!dup) vertices_.push_back(x);
        }
      }
      int d = n - 1;
      while (d >= 0 && idx[d] == m - n + d) --d;
      if (d < 0) break;
      ++idx[d];
      for (int i = d + 1; i < n; ++i) idx[i] = idx[i - 1] + 1;
    }
    if (static_cast<int>(vertices_.size()) < n + 1) throw NumericError("Polytope: vertex enumeration failed");
  }

  // Triangulates the face spanned by vertex indices `face` (dimension k) by
  // coning from its vertex centroid over its (k-1)-faces.
  std::vector<std::vector<Vector>> fan(const std::vector<int>& face, int k,
                                       const std::vector<std::vector<int>>& incidence, double tol) const {
    std::vector<std::vector<Vector>> out;
    if (static_cast<int>(face.size()) == k + 1) {
      std::vector<Vector> s;
      for (int i : face) s.push_back(vertices_[i]);
      out.push_back(std::move(s));
      return out;
    }
    Vector apex = Vector::Zero(dim_);
    for (int i : face) apex += vertices_[i];
    apex /= static_cast<double>(face.size());
    std::set<std::vector<int>> subfaces;
    for (const auto& inc : incidence) {
      std::vector<int> common;
      std::set_intersection(face.begin(), face.end(), inc.begin(), inc.end(), std::back_inserter(common));
      if (static_cast<int>(common.size()) < k || common.size() == face.size()) continue;
      std::vector<Vector> pts;
      for (int i : common) pts.push_back(vertices_[i]);
      if (detail::affine_rank(pts, tol) == k - 1) subfaces.insert(common);
    }
    for (const auto& sub : subfaces) {
      for (auto& s : fan(sub, k - 1, incidence, tol)) {
        s.push_back(apex);
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  void build_facets() {
    const int n = dim_;
    const double tol = tol::geom * scale();
    std::vector<std::vector<int>> incidence;
    for (const auto& h : hs_) {
      std::vector<int> inc;
      for (int i = 0; i < static_cast<int>(vertices_.size()); ++i)
        if (std::abs(h.normal.dot(vertices_[i]) - h.offset) <= tol) inc.push_back(i);
      incidence.push_back(std::move(inc));
    }
    Vector apex = Vector::Zero(n);
    for (const auto& v : vertices_) apex += v;
    apex /= static_cast<double>(vertices_.size());

    volume_ = 0.0;
    for (std::size_t f = 0; f < hs_.size(); ++f) {
      Facet facet;
      facet.normal = hs_[f].normal;
      facet.offset = hs_[f].offset;
      for (int i : incidence[f]) facet.vertices.push_back(vertices_[i]);
      for (auto& s : fan(incidence[f], n - 1, incidence, tol)) {
        Simplex fs{s, detail::simplex_volume(s)};
        facet.area += fs.volume;
        s.push_back(apex);
        Simplex cs{s, detail::simplex_volume(s)};
        volume_ += cs.volume;
        simplices_.push_back(std::move(cs));
        facet.simplices.push_back(std::move(fs));
      }
      facets_.push_back(std::move(facet));
    }
  }

  int dim_ = 0;
  std::vector<Halfspace> hs_;
  const std::vector<Vector>* snap_ = nullptr;
  std::vector<Vector> vertices_;
  std::vector<Facet> facets_;
  std::vector<Simplex> simplices_;
  double volume_ = 0.0;
  Vector center_;
  double inradius_ = 0.0;
};

/// Polytope or the distinguished empty set.
using MaybePolytope = std::optional<Polytope>;

inline double volume(const MaybePolytope& p) { return p ? p->volume() : 0.0; }

inline double support(const Polytope& p, const Vector& u) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : p.vertices()) best = std::max(best, u.dot(v));
  return best;
}

/// Radial function of P - base in direction u; base must be interior.
inline double radial(const Polytope& p, const Vector& base, const Vector& u) {
  const double un = u.norm();
  if (!(un > 0.0)) throw InputError("radial: zero direction");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : p.halfspaces()) {
    const double slack = h.offset - h.normal.dot(base);
    if (slack <= tol::geom) throw InputError("radial: base point is not interior");
    const double c = h.normal.dot(u);
    if (c > 0.0) best = std::min(best, slack / c);
  }
  return best;
}

/// K intersected with the translates x_i + K.
inline MaybePolytope intersect_translates(const Polytope& k, const std::vector<Vector>& shifts) {
  std::vector<Halfspace> hs = k.halfspaces();
  for (const auto& x : shifts) {
    if (x.size() != k.dim()) throw InputError("intersect_translates: shift dimension mismatch");
    for (const auto& h : k.halfspaces()) hs.push_back({h.normal, h.offset + h.normal.dot(x)});
  }
  return Polytope::intersection(hs, k.dim());
}

inline Polytope apply_linear(const LinearMap& t, const Polytope& p) {
  if (t.dim() != p.dim()) throw InputError("apply_linear: dimension mismatch");
  std::vector<Halfspace> hs;
  const Matrix tinv_t = t.inverse().transpose();
  for (const auto& h : p.halfspaces()) hs.push_back({tinv_t * h.normal, h.offset});
  return Polytope::from_halfspaces(hs, p.dim());
}

inline Polytope translate(const Polytope& p, const Vector& x) {
  std::vector<Halfspace> hs;
  for (const auto& h : p.halfspaces()) hs.push_back({h.normal, h.offset + h.normal.dot(x)});
  return Polytope::from_halfspaces(hs, p.dim());
}

/// -P.
inline Polytope reflect(const Polytope& p) {
  std::vector<Halfspace> hs;
  for (const auto& h : p.halfspaces()) hs.push_back({-h.normal, h.offset});
  return Polytope::from_halfspaces(hs, p.dim());
}

inline Polytope scale(const Polytope& p, double c) {
  if (!(c > 0.0)) throw InputError("scale: factor must be positive");
  std::vector<Halfspace> hs;
  for (const auto& h : p.halfspaces()) hs.push_back({h.normal, c * h.offset});
  return Polytope::from_halfspaces(hs, p.dim());
}

/// K + (-K), as the hull of pairwise vertex differences.
inline Polytope difference_body(const Polytope& k) {
  std::vector<Vector> pts;
  for (const auto& v : k.vertices())
    for (const auto& w : k.vertices()) pts.push_back(v - w);
  return Polytope::from_vertices(pts);
}

namespace named {

/// conv{0, e_1, ..., e_n}.
inline Polytope simplex(int n) {
  std::vector<Halfspace> hs;
  for (int i = 0; i < n; ++i) hs.push_back({-Vector::Unit(n, i), 0.0});
  hs.push_back({Vector::Ones(n), 1.0});
  return Polytope::from_halfspaces(hs, n);
}

/// [0,1]^n.
inline Polytope cube(int n) {
  std::vector<Halfspace> hs;
  for (int i = 0; i < n; ++i) {
    hs.push_back({Vector::Unit(n, i), 1.0});
    hs.push_back({-Vector::Unit(n, i), 0.0});
  }
  return Polytope::from_halfspaces(hs, n);
}

/// conv{+-e_i}.
inline Polytope cross(int n) {
  std::vector<Vector> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back(Vector::Unit(n, i));
    pts.push_back(-Vector::Unit(n, i));
  }
  return Polytope::from_vertices(pts);
}

}  // namespace named

}  // namespace covbody

#endif  // COVBODY_POLYTOPE_HPP
