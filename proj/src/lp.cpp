#include "acompc/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "acompc/error.hpp"

namespace acompc {

namespace {

// Dense tableau; the last row holds reduced costs, the last column the RHS.
class Tableau {
public:
  Tableau(Eigen::MatrixXd t, std::vector<int> basis, double tol) : t_(std::move(t)), basis_(std::move(basis)), tol_(tol) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index rhs_col() const { return t_.cols() - 1; }

  void set_objective(const Eigen::VectorXd& cost) {
    t_.row(rows()).setZero();
    t_.row(rows()).head(cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const double cb = t_(rows(), basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) t_.row(rows()) -= cb * t_.row(i);
    }
  }

  /// Bland's rule over columns [0, allowed). Returns false if unbounded.
  bool optimize(Eigen::Index allowed) {
    while (true) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j)
        if (t_(rows(), j) < -tol_) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows(); ++i) {
        if (t_(i, enter) <= tol_) continue;
        const double ratio = t_(i, rhs_col()) / t_(i, enter);
        const bool tie = leave >= 0 && std::abs(ratio - best_ratio) <= tol_;
        if (leave < 0 || (!tie && ratio < best_ratio) ||
            (tie && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          if (!tie) best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i)
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    basis_[static_cast<std::size_t>(r)] = static_cast<int>(c);
  }

  /// Pivot artificial columns [first_art, ...) out of the basis where possible.
  void expel_artificials(Eigen::Index first_art) {
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (basis_[static_cast<std::size_t>(i)] < first_art) continue;
      for (Eigen::Index j = 0; j < first_art; ++j)
        if (std::abs(t_(i, j)) > tol_) {
          pivot(i, j);
          break;
        }
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  double objective_value() const { return -t_(rows(), rhs_col()); }

  Eigen::VectorXd primal(Eigen::Index n) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b < n) x(b) = t_(i, rhs_col());
    }
    return x;
  }

  void zero_columns(Eigen::Index from, Eigen::Index to) { t_.middleCols(from, to - from).setZero(); }

private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  double tol_;
};

}  // namespace

LpSolution solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_ub, const Eigen::VectorXd& b_ub,
                    const Eigen::MatrixXd& a_eq, const Eigen::VectorXd& b_eq, double tolerance) {
  const Eigen::Index n = c.size();
  const Eigen::Index m_ub = a_ub.rows();
  const Eigen::Index m_eq = a_eq.rows();
  if ((m_ub > 0 && a_ub.cols() != n) || (m_eq > 0 && a_eq.cols() != n) || b_ub.size() != m_ub ||
      b_eq.size() != m_eq)
    throw ValidationError("lp: inconsistent dimensions");

  const Eigen::Index m = m_ub + m_eq;
  // Rows needing an artificial: equalities and inequalities with negative RHS.
  std::vector<Eigen::Index> art_rows;
  for (Eigen::Index i = 0; i < m_ub; ++i)
    if (b_ub(i) < 0.0) art_rows.push_back(i);
  for (Eigen::Index i = 0; i < m_eq; ++i) art_rows.push_back(m_ub + i);

  const Eigen::Index n_art = static_cast<Eigen::Index>(art_rows.size());
  const Eigen::Index first_art = n + m_ub;
  const Eigen::Index cols = first_art + n_art + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  std::vector<int> basis(static_cast<std::size_t>(m), -1);

  for (Eigen::Index i = 0; i < m_ub; ++i) {
    const double sign = b_ub(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a_ub.row(i);
    t(i, n + i) = sign;
    t(i, cols - 1) = sign * b_ub(i);
    if (sign > 0.0) basis[static_cast<std::size_t>(i)] = static_cast<int>(n + i);
  }
  for (Eigen::Index i = 0; i < m_eq; ++i) {
    const double sign = b_eq(i) < 0.0 ? -1.0 : 1.0;
    t.row(m_ub + i).head(n) = sign * a_eq.row(i);
    t(m_ub + i, cols - 1) = sign * b_eq(i);
  }
  for (Eigen::Index k = 0; k < n_art; ++k) {
    t(art_rows[static_cast<std::size_t>(k)], first_art + k) = 1.0;
    basis[static_cast<std::size_t>(art_rows[static_cast<std::size_t>(k)])] = static_cast<int>(first_art + k);
  }

  Tableau tab(std::move(t), std::move(basis), tolerance);
  LpSolution out;

  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols - 1);
    phase1.tail(n_art).setOnes();
    tab.set_objective(phase1);
    tab.optimize(cols - 1);
    const double scale = 1.0 + (b_ub.size() ? b_ub.cwiseAbs().maxCoeff() : 0.0) +
                         (b_eq.size() ? b_eq.cwiseAbs().maxCoeff() : 0.0);
    if (tab.objective_value() > tolerance * scale * 10.0) {
      out.status = LpStatus::infeasible;
      return out;
    }
    tab.expel_artificials(first_art);
    tab.zero_columns(first_art, first_art + n_art);
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols - 1);
  phase2.head(n) = c;
  tab.set_objective(phase2);
  if (!tab.optimize(first_art)) {
    out.status = LpStatus::unbounded;
    return out;
  }
  out.status = LpStatus::optimal;
  out.x = tab.primal(n).cwiseMax(0.0);
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace acompc
