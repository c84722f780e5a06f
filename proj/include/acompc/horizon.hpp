#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "acompc/environment.hpp"

namespace acompc {

inline constexpr int kNumMoves = 8;

/// Move offsets as (dcol, drow). Pheromone columns index into this order.
inline constexpr std::array<GridPos, kNumMoves> kMoves{{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

/// The moves as an N_m x 2 integer matrix, columns (dcol, drow).
Eigen::Matrix<int, kNumMoves, 2> move_matrix();

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Geometric length of a grid step in cells (1 axial, sqrt 2 diagonal).
inline double step_length_cells(GridPos from, GridPos to) {
  const GridPos d = to - from;
  return std::sqrt(static_cast<double>(d.col * d.col + d.row * d.row));
}

inline double euclidean_cells(GridPos a, GridPos b) { return step_length_cells(a, b); }

inline int chebyshev(GridPos a, GridPos b) {
  const GridPos d = b - a;
  return std::max(std::abs(d.col), std::abs(d.row));
}

/// Shortest unobstructed 8-connected length in cells, D_diag*sqrt2 + D_axial.
inline double octile_cells(GridPos a, GridPos b) {
  const GridPos d = b - a;
  const int dx = std::abs(d.col);
  const int dy = std::abs(d.row);
  const int diag = std::min(dx, dy);
  return diag * std::sqrt(2.0) + (std::max(dx, dy) - diag);
}

/// Energy for entering `to` from `from`: cost[to] * step length in km.
inline double step_energy(const GridEnvironment& env, GridPos from, GridPos to) {
  return env.cost_at(to) * step_length_cells(from, to) * env.cell_size();
}

enum class InfeasibleCost { infinite, penalty };

/// Horizon cost settings shared by every horizon optimizer.
///
/// Stage i contributes w_i * E(p_i) * len_i with len_i the step length in km
/// (or 1 when `length_weighted` is false). A candidate that arrives at the
/// target stops accruing stage cost. The terminal term adds
/// terminal_weight * (octile(p_H, target) - octile(p_0, target) + H*sqrt(2))
/// * cell_size * mean_free_cost: an estimate of the energy still needed to
/// reach the target, offset per problem so that it never goes negative.
struct HorizonCost {
  int horizon = 5;
  std::vector<double> stage_weights;  // empty -> all ones; otherwise length == horizon
  InfeasibleCost infeasible = InfeasibleCost::infinite;
  double penalty = 1e6;
  bool length_weighted = true;
  double terminal_weight = 2.0;

  double weight(int stage) const { return stage_weights.empty() ? 1.0 : stage_weights[static_cast<std::size_t>(stage)]; }
};

void validate(const HorizonCost& cost);

/// Sequence of move indices into kMoves, length == horizon.
using MoveSequence = std::vector<int>;

struct HorizonProblem {
  const GridEnvironment* env = nullptr;
  GridPos start;
  GridPos target;
  HorizonCost cost;

  int horizon() const { return cost.horizon; }
};

/// Result of rolling a move sequence out from the problem's start.
struct SequenceEvaluation {
  std::vector<GridPos> positions;  // start plus every executed step
  double cost = kInf;
  int invalid_steps = 0;  // steps that left the grid, hit an obstacle, or were never executed
  bool feasible = false;
  bool reached = false;  // arrived at the target within the horizon
};

/// Roll out `moves`; an invalid step is rejected (the position stays) and
/// counted. Infinite mode gives cost +inf for any invalid step; penalty mode
/// adds `penalty` per invalid step.
SequenceEvaluation evaluate_sequence(const HorizonProblem& problem, const MoveSequence& moves);

/// Cost of the executed positions (positions[0] is the start). Stage i uses
/// weight i. `invalid_steps` feeds only the penalty mode.
double horizon_cost(const HorizonProblem& problem, const std::vector<GridPos>& positions, int invalid_steps);

/// Ordering key: feasible candidates are compared by cost; any feasible one
/// beats any infeasible one; among infeasible ones fewer invalid steps wins,
/// then cost.
struct Fitness {
  double cost = kInf;
  int invalid_steps = 0;
  bool feasible = false;

  static Fitness of(const SequenceEvaluation& e) { return {e.cost, e.invalid_steps, e.feasible}; }
  static Fitness worst() { return {kInf, std::numeric_limits<int>::max(), false}; }
};

inline bool better(const Fitness& a, const Fitness& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.feasible) return a.cost < b.cost;
  if (a.invalid_steps != b.invalid_steps) return a.invalid_steps < b.invalid_steps;
  return a.cost < b.cost;
}

/// Output shared by every horizon optimizer.
struct HorizonSolution {
  MoveSequence moves;
  double cost = kInf;
  int invalid_steps = 0;
  bool feasible = false;
  std::vector<double> trace;  // best-so-far cost per iteration (non-increasing)
  std::uint64_t evaluations = 0;

  Fitness fitness() const { return {cost, invalid_steps, feasible}; }
};

}  // namespace acompc
