#include "acompc/planner.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "acompc/error.hpp"
#include "acompc/rng.hpp"

namespace acompc {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::reached: return "reached";
    case Termination::max_iters: return "max_iters";
    case Termination::stalled: return "stalled";
    case Termination::infeasible: return "infeasible";
  }
  return "unknown";
}

void validate(const MpcParams& p, int horizon) {
  if (p.max_iterations < 1) throw ValidationError("mpc: max_iterations must be >= 1");
  if (!(p.arrival_tolerance >= 0.0)) throw ValidationError("mpc: arrival_tolerance must be >= 0");
  if (p.stall_window < 1) throw ValidationError("mpc: stall_window must be >= 1");
  if (p.commit_length < 1 || p.commit_length > horizon)
    throw ValidationError("mpc: commit_length must lie in [1, H]");
}

double evaluate_fixed_path(const GridEnvironment& env, const std::vector<GridPos>& positions) {
  for (GridPos p : positions)
    if (!is_valid(env, p)) return kInf;
  double total = 0.0;
  for (std::size_t i = 1; i < positions.size(); ++i) total += step_energy(env, positions[i - 1], positions[i]);
  return total;
}

PlanResult plan(const GridEnvironment& env, GridPos start, GridPos target, const HorizonCost& cost,
                const HorizonOptimizer& optimizer, const MpcParams& mpc, std::uint64_t seed,
                std::string planner_name) {
  validate(cost);
  validate(mpc, cost.horizon);
  if (!is_valid(env, start)) throw ValidationError("plan: start cell is out of bounds or blocked");
  if (!is_valid(env, target)) throw ValidationError("plan: target cell is out of bounds or blocked");

  const auto t0 = std::chrono::steady_clock::now();
  PlanResult out;
  out.planner = std::move(planner_name);
  out.seed = seed;
  out.cell_size_km = env.cell_size();
  out.path.push_back(start);

  GridPos at = start;
  int best_distance = chebyshev(at, target);
  int since_improvement = 0;
  out.terminated = Termination::max_iters;

  auto advance = [&](GridPos next) {
    out.per_step_costs.push_back(step_energy(env, at, next));
    out.path.push_back(next);
    at = next;
  };

  for (int iter = 0; iter < mpc.max_iterations; ++iter) {
    if (at == target) {
      out.terminated = Termination::reached;
      break;
    }
    if (euclidean_cells(at, target) <= mpc.arrival_tolerance && is_adjacent8(at, target)) {
      advance(target);
      out.terminated = Termination::reached;
      break;
    }

    HorizonProblem problem{&env, at, target, cost};
    const HorizonSolution sol = optimizer(problem, derive_seed(seed, {static_cast<std::uint64_t>(iter)}));
    if (!sol.feasible) {
      out.terminated = Termination::infeasible;
      break;
    }
    const auto rollout = evaluate_sequence(problem, sol.moves);
    const int executable = static_cast<int>(rollout.positions.size()) - 1;
    const int commit = std::min(mpc.commit_length, executable);
    for (int k = 1; k <= commit; ++k) advance(rollout.positions[static_cast<std::size_t>(k)]);

    const int distance = chebyshev(at, target);
    if (distance < best_distance) {
      best_distance = distance;
      since_improvement = 0;
    } else if (++since_improvement >= mpc.stall_window) {
      out.terminated = Termination::stalled;
      break;
    }
  }
  // The loop can exhaust I_max on the very step that lands on the target.
  if (out.terminated == Termination::max_iters && at == target) out.terminated = Termination::reached;

  out.steps = static_cast<int>(out.path.size()) - 1;
  out.total_energy = out.terminated == Termination::reached ? evaluate_fixed_path(env, out.path) : kInf;
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<GridPos> direct_path(GridPos start, GridPos target) {
  std::vector<GridPos> out;
  const int dx = std::abs(target.col - start.col);
  const int dy = -std::abs(target.row - start.row);
  const int sx = start.col < target.col ? 1 : -1;
  const int sy = start.row < target.row ? 1 : -1;
  int err = dx + dy;
  GridPos p = start;
  while (true) {
    out.push_back(p);
    if (p == target) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      p.col += sx;
    }
    if (e2 <= dx) {
      err += dx;
      p.row += sy;
    }
  }
  return out;
}

std::vector<GridPos> wind_first_path(GridPos start, GridPos target) {
  std::vector<GridPos> out{start};
  GridPos p = start;
  const int sx = target.col > start.col ? 1 : -1;
  const int sy = target.row > start.row ? 1 : -1;
  while (p.col != target.col) {
    p.col += sx;
    out.push_back(p);
  }
  while (p.row != target.row) {
    p.row += sy;
    out.push_back(p);
  }
  return out;
}

double default_5050_amplitude(GridPos start, GridPos target) {
  return std::max(1.0, std::round(0.1 * euclidean_cells(start, target)));
}

std::vector<GridPos> combined_5050_path(GridPos start, GridPos target, double amplitude) {
  if (!(amplitude >= 0.0)) throw ValidationError("50-50 path: amplitude must be >= 0");
  const std::vector<GridPos> base = direct_path(start, target);
  if (base.size() < 2) return base;

  const double length = euclidean_cells(start, target);
  const double nx = -(target.row - start.row) / length;  // unit normal (col, row)
  const double ny = (target.col - start.col) / length;
  const auto last = static_cast<double>(base.size() - 1);

  std::vector<GridPos> out;
  auto append = [&](GridPos q) {
    if (!out.empty() && out.back() == q) return;
    if (!out.empty() && !is_adjacent8(out.back(), q)) {
      const auto bridge = direct_path(out.back(), q);
      out.insert(out.end(), bridge.begin() + 1, bridge.end());
      return;
    }
    out.push_back(q);
  };
  for (std::size_t k = 0; k < base.size(); ++k) {
    const double t = static_cast<double>(k) / last;
    const double offset = amplitude * std::sin(2.0 * std::numbers::pi * t);
    GridPos q = base[k];
    if (k != 0 && k + 1 != base.size()) {
      q.col += static_cast<int>(std::lround(offset * nx));
      q.row += static_cast<int>(std::lround(offset * ny));
    }
    append(q);
  }
  return out;
}

PlanResult fixed_plan(const GridEnvironment& env, std::vector<GridPos> path, GridPos target, std::string name) {
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult out;
  out.planner = std::move(name);
  out.cell_size_km = env.cell_size();
  out.path = std::move(path);
  out.steps = static_cast<int>(out.path.size()) - 1;
  const double energy = evaluate_fixed_path(env, out.path);
  const bool ends_at_target = !out.path.empty() && out.path.back() == target;
  if (std::isfinite(energy))
    for (std::size_t i = 1; i < out.path.size(); ++i)
      out.per_step_costs.push_back(step_energy(env, out.path[i - 1], out.path[i]));
  out.total_energy = ends_at_target ? energy : kInf;
  out.terminated = !std::isfinite(energy) ? Termination::infeasible
                   : ends_at_target      ? Termination::reached
                                         : Termination::max_iters;
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace acompc
