#include "acompc/metaheuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acompc/error.hpp"
#include "acompc/rng.hpp"

namespace acompc {

namespace {

struct Individual {
  MoveSequence moves;
  Fitness fitness = Fitness::worst();
};

Individual evaluate(const HorizonProblem& problem, MoveSequence moves) {
  const auto e = evaluate_sequence(problem, moves);
  return {std::move(moves), Fitness::of(e)};
}

// Running record of the best sequence seen plus a best-so-far trace.
struct Incumbent {
  Individual best;
  std::vector<double> trace;
  std::uint64_t evaluations = 0;

  void offer(const Individual& ind) {
    ++evaluations;
    if (best.moves.empty() || better(ind.fitness, best.fitness)) best = ind;
  }
  void mark() { trace.push_back(best.fitness.feasible ? best.fitness.cost : kInf); }

  HorizonSolution solution() const {
    HorizonSolution s;
    s.moves = best.moves;
    s.cost = best.fitness.cost;
    s.invalid_steps = best.fitness.invalid_steps;
    s.feasible = best.fitness.feasible;
    s.trace = trace;
    s.evaluations = evaluations;
    return s;
  }
};

MoveSequence random_sequence(int horizon, Rng& rng) {
  MoveSequence s(static_cast<std::size_t>(horizon));
  for (int& g : s) g = static_cast<int>(rng.below(kNumMoves));
  return s;
}

Eigen::VectorXd encode(const MoveSequence& moves) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(moves.size()));
  for (std::size_t i = 0; i < moves.size(); ++i) x(static_cast<Eigen::Index>(i)) = moves[i] + 0.5;
  return x;
}

Eigen::VectorXd clamp_genotype(const Eigen::VectorXd& x) { return x.cwiseMax(0.0).cwiseMin(double{kNumMoves}); }

// Mirror out-of-range coordinates back into [0, N_m]; clamps what is still outside.
Eigen::VectorXd reflect_genotype(Eigen::VectorXd x) {
  constexpr double hi = kNumMoves;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    if (x(d) < 0.0) x(d) = -x(d);
    if (x(d) > hi) x(d) = 2.0 * hi - x(d);
  }
  return clamp_genotype(x);
}

std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

// Continuous-genotype initial swarm shared by PSO and WOA.
std::vector<Eigen::VectorXd> initial_swarm(const HorizonProblem& problem, const MetaheuristicParams& params,
                                           std::uint64_t tag) {
  std::vector<Eigen::VectorXd> xs;
  for (int i = 0; i < params.population; ++i) {
    if (static_cast<std::size_t>(i) < params.initial_population.size()) {
      xs.push_back(encode(params.initial_population[static_cast<std::size_t>(i)]));
      continue;
    }
    Rng rng(derive_seed(params.seed, {tag, 0, u64(i)}));
    Eigen::VectorXd x(problem.horizon());
    for (Eigen::Index d = 0; d < x.size(); ++d) x(d) = rng.uniform(0.0, kNumMoves);
    xs.push_back(x);
  }
  return xs;
}

constexpr std::uint64_t kGaTag = 0x6761;
constexpr std::uint64_t kPsoTag = 0x70736f;
constexpr std::uint64_t kWoaTag = 0x776f61;
constexpr std::uint64_t kHybridAcoTag = 0x776f61616d6f;

class WhaleSwarm {
public:
  WhaleSwarm(const HorizonProblem& problem, const MetaheuristicParams& params)
      : problem_(problem), params_(params), whales_(initial_swarm(problem, params, kWoaTag)) {
    for (const auto& x : whales_) consider(x);
    incumbent_.mark();
  }

  void iterate(int t) {
    const double a = 2.0 - 2.0 * t / params_.iterations;
    const std::vector<Eigen::VectorXd> snapshot = whales_;
    for (int i = 0; i < params_.population; ++i) {
      Rng rng(derive_seed(params_.seed, {kWoaTag, u64(t + 1), u64(i)}));
      const double p = rng.uniform();
      const double l = rng.uniform(-1.0, 1.0);
      const auto k = static_cast<std::size_t>(rng.below(u64(params_.population)));
      Eigen::VectorXd& x = whales_[static_cast<std::size_t>(i)];
      if (p < 0.5) {
        // A and C are drawn per coordinate; |A_d| picks leader or random agent.
        for (Eigen::Index d = 0; d < x.size(); ++d) {
          const double coef_a = 2.0 * a * rng.uniform() - a;
          const double coef_c = 2.0 * rng.uniform();
          const double ref = std::abs(coef_a) < 1.0 ? leader_(d) : snapshot[k](d);
          x(d) = ref - coef_a * std::abs(coef_c * ref - x(d));
        }
      } else {
        const double spiral = std::exp(params_.woa.spiral * l) * std::cos(2.0 * std::numbers::pi * l);
        x = (leader_ - x).cwiseAbs() * spiral + leader_;
      }
      x = reflect_genotype(x);
    }
    for (const auto& x : whales_) consider(x);
    incumbent_.mark();
  }

  /// Adopt an externally found sequence as leader if it is better.
  void offer(const Individual& ind) {
    if (better(ind.fitness, incumbent_.best.fitness)) leader_ = encode(ind.moves);
    incumbent_.offer(ind);
  }

  Incumbent& incumbent() { return incumbent_; }

private:
  void consider(const Eigen::VectorXd& x) {
    Individual ind = evaluate(problem_, decode(x));
    if (incumbent_.best.moves.empty() || better(ind.fitness, incumbent_.best.fitness)) leader_ = x;
    incumbent_.offer(ind);
  }

  const HorizonProblem& problem_;
  const MetaheuristicParams& params_;
  std::vector<Eigen::VectorXd> whales_;
  Eigen::VectorXd leader_;
  Incumbent incumbent_;
};

}  // namespace

void validate(const MetaheuristicParams& p, int horizon) {
  if (p.population < 2) throw ValidationError("metaheuristic: population must be >= 2");
  if (p.iterations < 0) throw ValidationError("metaheuristic: iterations must be >= 0");
  auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate(p.ga.crossover_rate)) throw ValidationError("ga: crossover_rate must lie in [0, 1]");
  if (p.ga.mutation_rate >= 0.0 && !rate(p.ga.mutation_rate))
    throw ValidationError("ga: mutation_rate must lie in [0, 1]");
  if (p.ga.tournament_size < 2) throw ValidationError("ga: tournament_size must be >= 2");
  if (!(p.pso.max_velocity > 0.0)) throw ValidationError("pso: max_velocity must be > 0");
  if (!std::isfinite(p.pso.inertia) || !std::isfinite(p.pso.cognitive) || !std::isfinite(p.pso.social))
    throw ValidationError("pso: coefficients must be finite");
  if (!std::isfinite(p.woa.spiral)) throw ValidationError("woa: spiral must be finite");
  for (const auto& s : p.initial_population) {
    if (static_cast<int>(s.size()) != horizon)
      throw ValidationError("metaheuristic: initial_population sequences must have length H");
    for (int g : s)
      if (g < 0 || g >= kNumMoves) throw ValidationError("metaheuristic: move index out of range");
  }
}

MoveSequence decode(const Eigen::VectorXd& genotype) {
  MoveSequence out(static_cast<std::size_t>(genotype.size()));
  for (Eigen::Index d = 0; d < genotype.size(); ++d) {
    const double v = genotype(d);
    const int idx = std::isfinite(v) ? static_cast<int>(std::floor(std::clamp(v, 0.0, double{kNumMoves}))) : 0;
    out[static_cast<std::size_t>(d)] = std::clamp(idx, 0, kNumMoves - 1);
  }
  return out;
}

HorizonSolution exhaustive_horizon_search(const HorizonProblem& problem, std::uint64_t cap) {
  validate(problem.cost);
  const int horizon = problem.horizon();
  std::uint64_t total = 1;
  for (int h = 0; h < horizon; ++h) {
    if (total > cap / kNumMoves + 1) {
      total = cap + 1;
      break;
    }
    total *= kNumMoves;
  }
  if (total > cap)
    throw BudgetError("exhaustive search: 8^" + std::to_string(horizon) + " sequences exceed the enumeration cap of " +
                      std::to_string(cap) + "; use a smaller horizon");

  Incumbent inc;
  MoveSequence seq(static_cast<std::size_t>(horizon), 0);
  for (std::uint64_t n = 0; n < total; ++n) {
    inc.offer(evaluate(problem, seq));
    for (int d = horizon - 1; d >= 0; --d) {  // lexicographic increment
      if (++seq[static_cast<std::size_t>(d)] < kNumMoves) break;
      seq[static_cast<std::size_t>(d)] = 0;
    }
  }
  inc.mark();
  return inc.solution();
}

HorizonSolution ga_horizon_search(const HorizonProblem& problem, const MetaheuristicParams& params) {
  validate(problem.cost);
  validate(params, problem.horizon());
  const int horizon = problem.horizon();
  const double mutation = params.ga.mutation_rate < 0.0 ? 1.0 / horizon : params.ga.mutation_rate;

  std::vector<Individual> pop;
  for (int i = 0; i < params.population; ++i) {
    MoveSequence s;
    if (static_cast<std::size_t>(i) < params.initial_population.size()) {
      s = params.initial_population[static_cast<std::size_t>(i)];
    } else {
      Rng rng(derive_seed(params.seed, {kGaTag, 0, u64(i)}));
      s = random_sequence(horizon, rng);
    }
    pop.push_back(evaluate(problem, std::move(s)));
  }
  Incumbent inc;
  for (const auto& ind : pop) inc.offer(ind);
  inc.mark();

  auto tournament = [&](Rng& rng) -> const Individual& {
    const Individual* pick = &pop[rng.below(pop.size())];
    for (int k = 1; k < params.ga.tournament_size; ++k) {
      const Individual& other = pop[rng.below(pop.size())];
      if (better(other.fitness, pick->fitness)) pick = &other;
    }
    return *pick;
  };

  for (int it = 0; it < params.iterations; ++it) {
    std::vector<Individual> next;
    next.reserve(pop.size());
    next.push_back(*std::min_element(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
      return better(a.fitness, b.fitness);
    }));
    for (int i = 1; i < params.population; ++i) {
      Rng rng(derive_seed(params.seed, {kGaTag, u64(it + 1), u64(i)}));
      const Individual& mother = tournament(rng);
      const Individual& father = tournament(rng);
      MoveSequence child = mother.moves;
      if (horizon > 1 && rng.uniform() < params.ga.crossover_rate) {
        const auto cut = static_cast<std::size_t>(1 + rng.below(u64(horizon - 1)));
        std::copy(father.moves.begin() + static_cast<std::ptrdiff_t>(cut), father.moves.end(),
                  child.begin() + static_cast<std::ptrdiff_t>(cut));
      }
      for (int& g : child)
        if (rng.uniform() < mutation) g = static_cast<int>(rng.below(kNumMoves));
      next.push_back(evaluate(problem, std::move(child)));
      inc.offer(next.back());
    }
    pop = std::move(next);
    inc.mark();
  }
  return inc.solution();
}

HorizonSolution pso_horizon_search(const HorizonProblem& problem, const MetaheuristicParams& params) {
  validate(problem.cost);
  validate(params, problem.horizon());
  const auto n = static_cast<std::size_t>(params.population);
  std::vector<Eigen::VectorXd> x = initial_swarm(problem, params, kPsoTag);
  std::vector<Eigen::VectorXd> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(params.seed, {kPsoTag, 0, u64(static_cast<int>(i)), 1}));
    v[i].resize(problem.horizon());
    for (Eigen::Index d = 0; d < v[i].size(); ++d) v[i](d) = rng.uniform(-params.pso.max_velocity, params.pso.max_velocity);
  }

  Incumbent inc;
  std::vector<Eigen::VectorXd> pbest = x;
  std::vector<Fitness> pbest_fit(n);
  Eigen::VectorXd gbest;
  for (std::size_t i = 0; i < n; ++i) {
    const Individual ind = evaluate(problem, decode(x[i]));
    pbest_fit[i] = ind.fitness;
    if (inc.best.moves.empty() || better(ind.fitness, inc.best.fitness)) gbest = x[i];
    inc.offer(ind);
  }
  inc.mark();

  const double vmax = params.pso.max_velocity;
  for (int it = 0; it < params.iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(derive_seed(params.seed, {kPsoTag, u64(it + 1), u64(static_cast<int>(i))}));
      for (Eigen::Index d = 0; d < x[i].size(); ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        const double vel = params.pso.inertia * v[i](d) + params.pso.cognitive * r1 * (pbest[i](d) - x[i](d)) +
                           params.pso.social * r2 * (gbest(d) - x[i](d));
        v[i](d) = std::clamp(vel, -vmax, vmax);
      }
      const Eigen::VectorXd moved = x[i] + v[i];
      x[i] = reflect_genotype(moved);
      for (Eigen::Index d = 0; d < moved.size(); ++d)
        if (moved(d) < 0.0 || moved(d) > kNumMoves) v[i](d) = -v[i](d);  // bounce off the wall
    }
    Eigen::VectorXd next_gbest = gbest;
    for (std::size_t i = 0; i < n; ++i) {
      const Individual ind = evaluate(problem, decode(x[i]));
      if (better(ind.fitness, pbest_fit[i])) {
        pbest[i] = x[i];
        pbest_fit[i] = ind.fitness;
      }
      if (better(ind.fitness, inc.best.fitness)) next_gbest = x[i];
      inc.offer(ind);
    }
    gbest = next_gbest;
    inc.mark();
  }
  return inc.solution();
}

HorizonSolution woa_horizon_search(const HorizonProblem& problem, const MetaheuristicParams& params) {
  validate(problem.cost);
  validate(params, problem.horizon());
  WhaleSwarm swarm(problem, params);
  for (int t = 0; t < params.iterations; ++t) swarm.iterate(t);
  return swarm.incumbent().solution();
}

HorizonSolution woa_aco_horizon_search(const HorizonProblem& problem, const MetaheuristicParams& params,
                                       const AcoParams& aco, int aco_rounds_per_iteration) {
  validate(problem.cost);
  validate(params, problem.horizon());
  validate(aco);
  if (aco_rounds_per_iteration < 0) throw ValidationError("woa-aco: aco rounds must be >= 0");

  WhaleSwarm swarm(problem, params);
  PheromoneMatrix pheromone = initial_pheromone(problem.horizon(), aco.initial_pheromone);
  std::vector<Candidate> colony(static_cast<std::size_t>(aco.ants));

  for (int t = 0; t < params.iterations; ++t) {
    swarm.iterate(t);
    for (int r = 0; r < aco_rounds_per_iteration; ++r) {
      for (int a = 0; a < aco.ants; ++a) {
        Rng rng(derive_seed(params.seed, {kHybridAcoTag, u64(t), u64(r), u64(a)}));
        colony[static_cast<std::size_t>(a)] = construct_candidate(problem, pheromone, aco, rng);
      }
      pheromone = pheromone_update(pheromone, colony, aco.evaporation);

      // The WOA leader deposits alongside the colony.
      const Individual& leader = swarm.incumbent().best;
      if (leader.fitness.feasible && leader.fitness.cost > 0.0) {
        const auto e = evaluate_sequence(problem, leader.moves);
        for (std::size_t h = 1; h < e.positions.size(); ++h) {
          const GridPos step = e.positions[h] - e.positions[h - 1];
          const auto m = std::find(kMoves.begin(), kMoves.end(), step) - kMoves.begin();
          pheromone(static_cast<Eigen::Index>(h - 1), m) += 1.0 / leader.fitness.cost;
        }
      }
      for (const auto& c : colony) swarm.offer(evaluate(problem, c.padded_moves(problem.horizon())));
    }
    if (aco_rounds_per_iteration > 0) {
      // keep one trace entry per iteration
      auto& trace = swarm.incumbent().trace;
      trace.back() = swarm.incumbent().best.fitness.feasible ? swarm.incumbent().best.fitness.cost : kInf;
    }
  }
  return swarm.incumbent().solution();
}

}  // namespace acompc
