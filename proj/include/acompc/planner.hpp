#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "acompc/aco.hpp"
#include "acompc/horizon.hpp"
#include "acompc/metaheuristics.hpp"

namespace acompc {

enum class Termination { reached, max_iters, stalled, infeasible };

std::string_view to_string(Termination t);

struct PlanResult {
  std::vector<GridPos> path;
  double total_energy = kInf;  // kWh; +inf unless reached without collision
  std::vector<double> per_step_costs;
  int steps = 0;
  Termination terminated = Termination::max_iters;
  std::string planner;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  double cell_size_km = 1.0;
};

struct MpcParams {
  int max_iterations = 500;
  double arrival_tolerance = 0.0;  // cells, Euclidean
  int stall_window = 20;
  int commit_length = 1;
};

void validate(const MpcParams& params, int horizon);

/// A horizon optimizer: solves one horizon problem with a per-call seed.
using HorizonOptimizer = std::function<HorizonSolution(const HorizonProblem&, std::uint64_t seed)>;

/// Receding-horizon loop. Each outer iteration solves a horizon problem from
/// the current cell with seed derive_seed(seed, {iteration}) and executes the
/// first `commit_length` steps of the best sequence.
///
/// Stops when the current cell is within `arrival_tolerance` of the target and
/// 8-adjacent to it (the target is then appended), after `max_iterations`, when
/// the Chebyshev distance has not strictly improved for `stall_window`
/// iterations, or when the optimizer returns no feasible sequence.
PlanResult plan(const GridEnvironment& env, GridPos start, GridPos target, const HorizonCost& cost,
                const HorizonOptimizer& optimizer, const MpcParams& mpc, std::uint64_t seed,
                std::string planner_name = "mpc");

/// 8-connected integer line (Bresenham), endpoints included.
std::vector<GridPos> direct_path(GridPos start, GridPos target);

/// Horizontal leg first, then vertical, in unit steps.
std::vector<GridPos> wind_first_path(GridPos start, GridPos target);

/// Default sinusoid amplitude: max(1, round(0.1 * straight-line length)).
double default_5050_amplitude(GridPos start, GridPos target);

/// Straight line with a perpendicular offset amplitude * sin(2 pi t), sampled
/// at the direct path's cells, rounded to cells, deduplicated and re-stitched
/// with direct_path so consecutive cells stay 8-adjacent.
std::vector<GridPos> combined_5050_path(GridPos start, GridPos target, double amplitude);

/// +inf if any position is invalid, otherwise sum of step_energy in order.
double evaluate_fixed_path(const GridEnvironment& env, const std::vector<GridPos>& positions);

/// Wrap a fixed path as a PlanResult (reached iff it ends at the target and is valid).
PlanResult fixed_plan(const GridEnvironment& env, std::vector<GridPos> path, GridPos target, std::string name);

inline bool is_adjacent8(GridPos a, GridPos b) { return chebyshev(a, b) == 1; }

}  // namespace acompc
