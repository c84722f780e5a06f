#pragma once

#include <cstdint>
#include <vector>

#include "acompc/aco.hpp"
#include "acompc/horizon.hpp"

namespace acompc {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Global optimum over all N_m^H sequences; ties go to the lexicographically
/// smallest sequence. Throws BudgetError when N_m^H exceeds `cap`.
HorizonSolution exhaustive_horizon_search(const HorizonProblem& problem,
                                          std::uint64_t cap = kDefaultEnumerationCap);

struct GaParams {
  double crossover_rate = 0.9;
  double mutation_rate = -1.0;  // < 0 -> 1 / H
  int tournament_size = 3;
};

struct PsoParams {
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  double max_velocity = 4.0;  // per-coordinate clamp, in move-index units
};

struct WoaParams {
  double spiral = 1.0;  // logarithmic spiral constant b
};

struct MetaheuristicParams {
  int population = 20;
  int iterations = 30;
  GaParams ga;
  PsoParams pso;
  WoaParams woa;
  std::uint64_t seed = 0;
  /// Replaces (a prefix of) the random initial population when nonempty.
  std::vector<MoveSequence> initial_population;
};

void validate(const MetaheuristicParams& params, int horizon);

/// Continuous genotype -> move indices: floor, then clamp to [0, N_m).
MoveSequence decode(const Eigen::VectorXd& genotype);

/// Tournament selection, one-point crossover, per-gene uniform mutation,
/// elitism of one.
HorizonSolution ga_horizon_search(const HorizonProblem& problem, const MetaheuristicParams& params);

/// Canonical PSO over [0, N_m]^H with floor decoding.
HorizonSolution pso_horizon_search(const HorizonProblem& problem, const MetaheuristicParams& params);

/// Canonical whale optimization (encircling / random-agent search / spiral)
/// with `a` decreasing linearly from 2 to 0.
HorizonSolution woa_horizon_search(const HorizonProblem& problem, const MetaheuristicParams& params);

/// Alternates one WOA generation with `aco_rounds_per_iteration` ACO
/// generations. The ACO colony shares a pheromone matrix into which the WOA
/// leader deposits 1/J each round; a better ant replaces the WOA leader.
/// With aco_rounds_per_iteration == 0 this is exactly woa_horizon_search.
HorizonSolution woa_aco_horizon_search(const HorizonProblem& problem, const MetaheuristicParams& params,
                                       const AcoParams& aco, int aco_rounds_per_iteration = 1);

}  // namespace acompc
