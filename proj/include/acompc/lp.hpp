#pragma once

#include <Eigen/Core>

namespace acompc {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// Dense two-phase tableau simplex with Bland's rule:
///   minimize c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
/// Either constraint block may have zero rows (but must have c.size() columns).
LpSolution solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_ub, const Eigen::VectorXd& b_ub,
                    const Eigen::MatrixXd& a_eq, const Eigen::VectorXd& b_eq, double tolerance = 1e-9);

}  // namespace acompc
