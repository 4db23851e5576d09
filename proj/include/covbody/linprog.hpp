#ifndef COVBODY_LINPROG_HPP
#define COVBODY_LINPROG_HPP

// Dense two-phase simplex method with Bland's rule. Problems in this library
// have at most a few dozen constraints and n+1 <= 4 variables, so a full
// tableau is the simplest exact-enough tool.

#include "types.hpp"

#include <vector>

namespace covbody::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  double value = 0.0;
  Vector x;
};

namespace detail {

class Tableau {
 public:
  Tableau(int rows, int cols) : t_(Matrix::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  double& at(int i, int j) { return t_(i, j); }
  double rhs(int i) const { return t_(i, t_.cols() - 1); }
  double& rhs(int i) { return t_(i, t_.cols() - 1); }
  double& cost(int j) { return t_(rows(), j); }
  double objective() const { return t_(rows(), t_.cols() - 1); }
  int rows() const { return static_cast<int>(basis_.size()); }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  // Reduce the objective row against the current basis.
  void canonicalize() {
    for (int i = 0; i < rows(); ++i) {
      const double f = t_(rows(), basis_[i]);
      if (f != 0.0) t_.row(rows()) -= f * t_.row(i);
    }
  }

  // Maximizes over columns [0, active). Returns false when unbounded.
  bool run(int active) {
    for (int iter = 0; iter < 50000; ++iter) {
      int enter = -1;
      for (int j = 0; j < active; ++j) {
        if (t_(rows(), j) < -tol::pivot) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < rows(); ++i) {
        const double a = t_(i, enter);
        if (a <= tol::pivot) continue;
        const double ratio = rhs(i) / a;
        if (leave < 0 || ratio < best - 1e-15 ||
            (ratio <= best + 1e-15 && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw NumericError("simplex method did not terminate");
  }

 private:
  Matrix t_;
  std::vector<int> basis_;
};

}  // namespace detail

/// Maximizes <c, x> subject to A x <= b with x free.
inline Result maximize(const Matrix& A, const Vector& b, const Vector& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n) throw InputError("lp::maximize: dimension mismatch");

  int n_art = 0;
  for (int i = 0; i < m; ++i) n_art += b(i) < 0.0 ? 1 : 0;
  const int slack0 = 2 * n;
  const int art0 = 2 * n + m;
  detail::Tableau t(m, art0 + n_art);

  int next_art = art0;
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      t.at(i, j) = sign * A(i, j);
      t.at(i, n + j) = -sign * A(i, j);
    }
    t.at(i, slack0 + i) = sign;
    t.rhs(i) = sign * b(i);
    if (sign < 0.0) {
      t.at(i, next_art) = 1.0;
      t.basis()[i] = next_art++;
    } else {
      t.basis()[i] = slack0 + i;
    }
  }

  Result result;
  if (n_art > 0) {
    for (int j = art0; j < art0 + n_art; ++j) t.cost(j) = 1.0;
    t.canonicalize();
    t.run(art0 + n_art);
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (t.objective() < -1e-10 * scale) {
      result.status = Status::infeasible;
      return result;
    }
    // Drive remaining zero-level artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (t.basis()[i] < art0) continue;
      for (int j = 0; j < art0; ++j) {
        if (std::abs(t.at(i, j)) > 1e-9) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (int j = 0; j <= t.cols(); ++j) t.cost(j) = 0.0;
  }

  for (int j = 0; j < n; ++j) {
    t.cost(j) = -c(j);
    t.cost(n + j) = c(j);
  }
  t.canonicalize();
  if (!t.run(art0)) {
    result.status = Status::unbounded;
    return result;
  }

  result.status = Status::optimal;
  result.x = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int bi = t.basis()[i];
    if (bi < n) result.x(bi) += t.rhs(i);
    else if (bi < 2 * n) result.x(bi - n) -= t.rhs(i);
  }
  result.value = c.dot(result.x);
  return result;
}

}  // namespace covbody::lp

#endif  // COVBODY_LINPROG_HPP
