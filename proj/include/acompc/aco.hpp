#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "acompc/horizon.hpp"
#include "acompc/rng.hpp"

namespace acompc {

/// H x N_m pheromone weights over (horizon step, move).
using PheromoneMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumMoves>;
/// H x N_m 0/1 record of the move taken at each executed step.
using IncidenceMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumMoves>;

struct AcoParams {
  int ants = 30;
  int generations = 20;
  double initial_pheromone = 1.0;
  double evaporation = 0.3;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
};

void validate(const AcoParams& params);

struct Candidate {
  std::vector<GridPos> positions;  // start plus executed steps
  std::vector<int> moves;
  IncidenceMatrix incidence;
  bool feasible = false;
  bool reached = false;
  double cost = kInf;

  /// Moves padded to `horizon` with index 0; padding past an arrival is never executed.
  MoveSequence padded_moves(int horizon) const;
};

PheromoneMatrix initial_pheromone(int horizon, double phi0);

/// 1 / (|pos + move - target|_2 + eps), distance in cells.
double heuristic(GridPos pos, GridPos move, GridPos target, double epsilon);

/// phi_m * eta_m normalized over valid moves; invalid moves get exactly 0.
/// Returns nullopt when no move is valid (dead end).
template <typename DerivedP, typename DerivedH, typename DerivedM>
std::optional<Eigen::ArrayXd> move_probabilities(const Eigen::DenseBase<DerivedP>& pheromone,
                                                 const Eigen::DenseBase<DerivedH>& heuristics,
                                                 const Eigen::DenseBase<DerivedM>& valid) {
  const Eigen::Index n = pheromone.size();
  Eigen::ArrayXd weight(n);
  double total = 0.0;
  for (Eigen::Index m = 0; m < n; ++m) {
    weight(m) = valid.derived()(m) ? pheromone.derived()(m) * heuristics.derived()(m) : 0.0;
    total += weight(m);
  }
  if (!(total > 0.0)) return std::nullopt;
  return weight / total;
}

/// Roulette-wheel draw; returns the first index whose cumulative mass exceeds u.
int sample_move(const Eigen::ArrayXd& probabilities, Rng& rng);

/// H stochastic steps restricted to valid successors. Stops early at the
/// target; a dead end leaves the candidate infeasible with the rest unfilled.
/// The cost field is filled via candidate_cost. Throws ValidationError for an
/// invalid start.
Candidate construct_candidate(const HorizonProblem& problem, const PheromoneMatrix& pheromone,
                              const AcoParams& params, Rng& rng);

/// Stage cost sum of the executed steps; +inf (or the penalty) if infeasible.
double candidate_cost(const HorizonProblem& problem, const Candidate& candidate);

/// phi <- (1 - rho) phi + sum_a I_a / J_a, with 1/inf = 0. Matrix form.
PheromoneMatrix pheromone_update(const PheromoneMatrix& pheromone, const std::vector<Candidate>& candidates,
                                 double evaporation);

struct AcoSearchResult {
  Candidate best;
  std::vector<double> trace;  // best-so-far after each generation
  PheromoneMatrix pheromone;
};

/// G generations of N_a ants with a pheromone update after each; returns the
/// cheapest feasible candidate seen. The pheromone starts at phi0 on every call.
AcoSearchResult aco_horizon_search(const HorizonProblem& problem, const AcoParams& params);

/// Same search packaged as a HorizonSolution.
HorizonSolution aco_solve(const HorizonProblem& problem, const AcoParams& params);

}  // namespace acompc
