#include "acompc/aco.hpp"

#include <cmath>

#include "acompc/error.hpp"

namespace acompc {

void validate(const AcoParams& p) {
  if (p.ants < 1) throw ValidationError("aco: ants must be >= 1");
  if (p.generations < 1) throw ValidationError("aco: generations must be >= 1");
  if (!(p.initial_pheromone > 0.0) || !std::isfinite(p.initial_pheromone))
    throw ValidationError("aco: initial_pheromone must be > 0");
  if (!(p.evaporation > 0.0 && p.evaporation < 1.0)) throw ValidationError("aco: evaporation must lie in (0, 1)");
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) throw ValidationError("aco: epsilon must be > 0");
}

MoveSequence Candidate::padded_moves(int horizon) const {
  MoveSequence out(moves.begin(), moves.end());
  out.resize(static_cast<std::size_t>(horizon), 0);
  return out;
}

PheromoneMatrix initial_pheromone(int horizon, double phi0) {
  return PheromoneMatrix::Constant(horizon, kNumMoves, phi0);
}

double heuristic(GridPos pos, GridPos move, GridPos target, double epsilon) {
  return 1.0 / (euclidean_cells(pos + move, target) + epsilon);
}

int sample_move(const Eigen::ArrayXd& probabilities, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  int last_valid = -1;
  for (Eigen::Index m = 0; m < probabilities.size(); ++m) {
    if (probabilities(m) <= 0.0) continue;
    last_valid = static_cast<int>(m);
    cumulative += probabilities(m);
    if (u < cumulative) return last_valid;
  }
  return last_valid;  // rounding left u above the final cumulative sum
}

Candidate construct_candidate(const HorizonProblem& problem, const PheromoneMatrix& pheromone,
                              const AcoParams& params, Rng& rng) {
  const GridEnvironment& env = *problem.env;
  if (!is_valid(env, problem.start)) throw ValidationError("aco: start cell is out of bounds or blocked");
  const int horizon = problem.horizon();

  Candidate cand;
  cand.incidence = IncidenceMatrix::Zero(horizon, kNumMoves);
  cand.positions.push_back(problem.start);
  GridPos at = problem.start;
  cand.reached = at == problem.target;
  bool dead_end = false;

  Eigen::Array<double, kNumMoves, 1> eta;
  Eigen::Array<bool, kNumMoves, 1> valid;
  for (int h = 0; h < horizon && !cand.reached; ++h) {
    for (int m = 0; m < kNumMoves; ++m) {
      const GridPos move = kMoves[static_cast<std::size_t>(m)];
      valid(m) = is_valid(env, at + move);
      eta(m) = heuristic(at, move, problem.target, params.epsilon);
    }
    const auto probs = move_probabilities(pheromone.row(h), eta, valid);
    if (!probs) {
      dead_end = true;
      break;
    }
    const int m = sample_move(*probs, rng);
    at = at + kMoves[static_cast<std::size_t>(m)];
    cand.moves.push_back(m);
    cand.positions.push_back(at);
    cand.incidence(h, m) = 1.0;
    cand.reached = at == problem.target;
  }
  cand.feasible = !dead_end;
  cand.cost = candidate_cost(problem, cand);
  return cand;
}

double candidate_cost(const HorizonProblem& problem, const Candidate& candidate) {
  const int executed = static_cast<int>(candidate.moves.size());
  const int missing = candidate.feasible ? 0 : std::max(1, problem.horizon() - executed);
  return horizon_cost(problem, candidate.positions, missing);
}

PheromoneMatrix pheromone_update(const PheromoneMatrix& pheromone, const std::vector<Candidate>& candidates,
                                 double evaporation) {
  PheromoneMatrix deposit = PheromoneMatrix::Zero(pheromone.rows(), kNumMoves);
  for (const auto& c : candidates)
    if (std::isfinite(c.cost) && c.cost > 0.0) deposit += c.incidence / c.cost;
  return (1.0 - evaporation) * pheromone + deposit;
}

AcoSearchResult aco_horizon_search(const HorizonProblem& problem, const AcoParams& params) {
  validate(params);
  validate(problem.cost);
  AcoSearchResult out;
  out.pheromone = initial_pheromone(problem.horizon(), params.initial_pheromone);
  out.best.cost = kInf;
  Fitness best_fit = Fitness::worst();

  std::vector<Candidate> colony(static_cast<std::size_t>(params.ants));
  for (int g = 0; g < params.generations; ++g) {
    for (int a = 0; a < params.ants; ++a) {
      Rng rng(derive_seed(params.seed, {static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(a)}));
      colony[static_cast<std::size_t>(a)] = construct_candidate(problem, out.pheromone, params, rng);
    }
    for (const auto& c : colony) {
      const Fitness f{c.cost, c.feasible ? 0 : 1, c.feasible};
      if (better(f, best_fit)) {
        best_fit = f;
        out.best = c;
      }
    }
    out.pheromone = pheromone_update(out.pheromone, colony, params.evaporation);
    out.trace.push_back(best_fit.feasible ? best_fit.cost : kInf);
  }
  return out;
}

HorizonSolution aco_solve(const HorizonProblem& problem, const AcoParams& params) {
  const auto result = aco_horizon_search(problem, params);
  HorizonSolution sol;
  sol.moves = result.best.padded_moves(problem.horizon());
  sol.feasible = result.best.feasible;
  sol.cost = result.best.feasible ? result.best.cost : kInf;
  sol.invalid_steps = result.best.feasible ? 0 : 1;
  sol.trace = result.trace;
  sol.evaluations = static_cast<std::uint64_t>(params.ants) * static_cast<std::uint64_t>(params.generations);
  return sol;
}

}  // namespace acompc
