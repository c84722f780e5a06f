#include "acompc/horizon.hpp"

#include <cmath>

#include "acompc/error.hpp"

namespace acompc {

Eigen::Matrix<int, kNumMoves, 2> move_matrix() {
  Eigen::Matrix<int, kNumMoves, 2> m;
  for (int i = 0; i < kNumMoves; ++i) m.row(i) << kMoves[static_cast<std::size_t>(i)].col, kMoves[static_cast<std::size_t>(i)].row;
  return m;
}

void validate(const HorizonCost& cost) {
  if (cost.horizon < 1) throw ValidationError("horizon: steps must be >= 1");
  if (!cost.stage_weights.empty()) {
    if (static_cast<int>(cost.stage_weights.size()) != cost.horizon)
      throw ValidationError("horizon: stage_weights length must equal the horizon");
    for (double w : cost.stage_weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("horizon: stage weights must be finite and > 0");
  }
  if (!(cost.penalty > 0.0) || !std::isfinite(cost.penalty)) throw ValidationError("horizon: penalty must be > 0");
  if (!(cost.terminal_weight >= 0.0) || !std::isfinite(cost.terminal_weight))
    throw ValidationError("horizon: terminal_weight must be finite and >= 0");
}

double horizon_cost(const HorizonProblem& problem, const std::vector<GridPos>& positions, int invalid_steps) {
  const GridEnvironment& env = *problem.env;
  const HorizonCost& hc = problem.cost;
  if (invalid_steps > 0 && hc.infeasible == InfeasibleCost::infinite) return kInf;
  double total = 0.0;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    const double length = hc.length_weighted ? step_length_cells(positions[i - 1], positions[i]) * env.cell_size() : 1.0;
    total += hc.weight(static_cast<int>(i - 1)) * env.cost_at(positions[i]) * length;
  }
  if (hc.terminal_weight > 0.0) {
    const double unit = hc.length_weighted ? env.cell_size() : 1.0;
    // Measured from the start and shifted by the largest possible progress, so
    // the term is >= 0 and of stage-cost scale. The shift is constant per problem.
    const double remaining = octile_cells(positions.back(), problem.target) - octile_cells(problem.start, problem.target) +
                             hc.horizon * std::sqrt(2.0);
    total += hc.terminal_weight * remaining * unit * env.mean_free_cost();
  }
  return total + hc.penalty * invalid_steps;
}

SequenceEvaluation evaluate_sequence(const HorizonProblem& problem, const MoveSequence& moves) {
  const GridEnvironment& env = *problem.env;
  SequenceEvaluation out;
  out.positions.reserve(moves.size() + 1);
  out.positions.push_back(problem.start);
  GridPos at = problem.start;
  out.reached = at == problem.target;
  for (std::size_t i = 0; i < moves.size() && !out.reached; ++i) {
    const int m = moves[i];
    const GridPos next = (m >= 0 && m < kNumMoves) ? at + kMoves[static_cast<std::size_t>(m)] : GridPos{-1, -1};
    if (!is_valid(env, next)) {
      ++out.invalid_steps;
      continue;
    }
    at = next;
    out.positions.push_back(at);
    out.reached = at == problem.target;
  }
  out.feasible = out.invalid_steps == 0;
  out.cost = horizon_cost(problem, out.positions, out.invalid_steps);
  return out;
}

}  // namespace acompc
