#include <gtest/gtest.h>

#include <random>

#include "acompc/aco.hpp"
#include "acompc/error.hpp"
#include "acompc/metaheuristics.hpp"
#include "test_support.hpp"

using namespace acompc;
using testing_support::uniform_env;

namespace {

HorizonProblem make_problem(const GridEnvironment& env, GridPos start, GridPos target, int horizon,
                            double terminal_weight = 0.0) {
  HorizonProblem p;
  p.env = &env;
  p.start = start;
  p.target = target;
  p.cost.horizon = horizon;
  p.cost.terminal_weight = terminal_weight;
  return p;
}

Candidate manual_candidate(const HorizonProblem& problem, const std::vector<int>& moves) {
  Candidate c;
  c.positions.push_back(problem.start);
  c.incidence = IncidenceMatrix::Zero(problem.horizon(), kNumMoves);
  c.feasible = true;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const GridPos next = c.positions.back() + kMoves[static_cast<std::size_t>(moves[i])];
    if (!is_valid(*problem.env, next)) {
      c.feasible = false;
      break;
    }
    c.positions.push_back(next);
    c.moves.push_back(moves[i]);
    c.incidence(static_cast<Eigen::Index>(i), moves[i]) = 1.0;
  }
  c.cost = candidate_cost(problem, c);
  return c;
}

GridEnvironment boxed_env() {
  ObstacleMask mask = ObstacleMask::Ones(5, 5);
  mask(2, 2) = 0;
  mask(0, 0) = 0;
  return GridEnvironment(1.0, Field::Zero(5, 5), Field::Zero(5, 5), mask, Field::Ones(5, 5));
}

}  // namespace

TEST(Aco, MoveTableOrder) {
  const auto m = move_matrix();
  const int expected[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(m(i, 0), expected[i][0]);
    EXPECT_EQ(m(i, 1), expected[i][1]);
  }
}

TEST(Aco, HeuristicExamples) {
  EXPECT_DOUBLE_EQ(heuristic({0, 0}, {1, 1}, {1, 1}, 0.1), 10.0);
  EXPECT_DOUBLE_EQ(heuristic({0, 0}, {1, 0}, {4, 0}, 1.0), 0.25);
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> d(-20, 20);
  for (int i = 0; i < 200; ++i) {
    const double h = heuristic({d(gen), d(gen)}, kMoves[static_cast<std::size_t>(i % 8)], {d(gen), d(gen)}, 0.3);
    EXPECT_GT(h, 0.0);
    EXPECT_LE(h, 1.0 / 0.3);
  }
}

TEST(Aco, ProbabilityExamples) {
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(8);
  Eigen::Array<bool, Eigen::Dynamic, 1> all(8);
  all.setConstant(true);
  const auto uniform = move_probabilities(ones, ones, all);
  ASSERT_TRUE(uniform);
  EXPECT_TRUE((uniform->array() == 0.125).all());

  Eigen::Array<bool, Eigen::Dynamic, 1> one(8);
  one.setConstant(false);
  one(5) = true;
  const auto single = move_probabilities(Eigen::ArrayXd::LinSpaced(8, 1, 8), ones, one);
  ASSERT_TRUE(single);
  EXPECT_EQ((*single)(5), 1.0);
  EXPECT_EQ(single->sum(), 1.0);

  const Eigen::Array2d phi(2.0, 1.0);
  const Eigen::Array2d eta(1.0, 1.0);
  const Eigen::Array<bool, 2, 1> both(true, true);
  const auto toy = move_probabilities(phi, eta, both);
  ASSERT_TRUE(toy);
  EXPECT_DOUBLE_EQ((*toy)(0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ((*toy)(1), 1.0 / 3.0);

  Eigen::Array<bool, Eigen::Dynamic, 1> none(8);
  none.setConstant(false);
  EXPECT_FALSE(move_probabilities(ones, ones, none));
}

TEST(Aco, ProbabilitiesSumToOne) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  std::bernoulli_distribution b(0.6);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::ArrayXd phi(8), eta(8);
    Eigen::Array<bool, Eigen::Dynamic, 1> valid(8);
    for (int m = 0; m < 8; ++m) {
      phi(m) = u(gen);
      eta(m) = u(gen);
      valid(m) = b(gen);
    }
    valid(trial % 8) = true;
    const auto p = move_probabilities(phi, eta, valid);
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->sum(), 1.0, 1e-12);
    for (int m = 0; m < 8; ++m)
      if (!valid(m)) {
        EXPECT_EQ((*p)(m), 0.0);
      }
  }
}

TEST(Aco, SampleMoveFollowsRoulette) {
  Eigen::ArrayXd p = Eigen::ArrayXd::Zero(8);
  p(2) = 0.25;
  p(6) = 0.75;
  Rng rng(99);
  int counts[8] = {};
  for (int i = 0; i < 20000; ++i) ++counts[sample_move(p, rng)];
  EXPECT_EQ(counts[0] + counts[1] + counts[3] + counts[4] + counts[5] + counts[7], 0);
  EXPECT_NEAR(counts[2] / 20000.0, 0.25, 0.02);
}

TEST(Aco, HeuristicFavoursTargetNeighbour) {
  const GridEnvironment env = uniform_env(5, 5, 1.0);
  HorizonProblem problem = make_problem(env, {2, 2}, {3, 3}, 1);
  Eigen::ArrayXd eta(8);
  Eigen::Array<bool, Eigen::Dynamic, 1> valid(8);
  for (int m = 0; m < 8; ++m) {
    eta(m) = heuristic(problem.start, kMoves[static_cast<std::size_t>(m)], problem.target, 0.01);
    valid(m) = true;
  }
  const auto p = move_probabilities(initial_pheromone(1, 1.0).row(0).array(), eta, valid);
  ASSERT_TRUE(p);
  Eigen::Index arg;
  p->maxCoeff(&arg);
  EXPECT_EQ(arg, 1);  // (1,1)
  for (int m = 0; m < 8; ++m)
    if (m != 1) {
      EXPECT_LT((*p)(m), (*p)(1));
    }
}

TEST(Aco, ConstructCandidateDeterministicAndValid) {
  const GridEnvironment env = testing_support::random_env(3, 8, 0.2, {{0, 0}, {7, 7}});
  const HorizonProblem problem = make_problem(env, {0, 0}, {7, 7}, 5);
  const AcoParams params;
  const PheromoneMatrix phi = initial_pheromone(5, 1.0);
  Rng a(1234), b(1234);
  const Candidate c1 = construct_candidate(problem, phi, params, a);
  const Candidate c2 = construct_candidate(problem, phi, params, b);
  EXPECT_EQ(c1.moves, c2.moves);
  EXPECT_EQ(c1.cost, c2.cost);
  for (std::size_t i = 1; i < c1.positions.size(); ++i) {
    EXPECT_TRUE(is_valid(env, c1.positions[i]));
    EXPECT_EQ(chebyshev(c1.positions[i - 1], c1.positions[i]), 1);
  }
  for (std::size_t i = 0; i < c1.moves.size(); ++i) {
    EXPECT_EQ(c1.incidence.row(static_cast<Eigen::Index>(i)).sum(), 1.0);
    EXPECT_EQ(c1.incidence(static_cast<Eigen::Index>(i), c1.moves[i]), 1.0);
  }
  EXPECT_EQ(c1.feasible, std::isfinite(c1.cost));
}

TEST(Aco, EnclosedStartIsInfeasible) {
  const GridEnvironment env = boxed_env();
  const HorizonProblem problem = make_problem(env, {2, 2}, {0, 0}, 3);
  Rng rng(5);
  const Candidate c = construct_candidate(problem, initial_pheromone(3, 1.0), AcoParams{}, rng);
  EXPECT_FALSE(c.feasible);
  EXPECT_TRUE(std::isinf(c.cost));
  const auto result = aco_horizon_search(problem, AcoParams{});
  EXPECT_FALSE(result.best.feasible);
  EXPECT_FALSE(aco_solve(problem, AcoParams{}).feasible);
}

TEST(Aco, InvalidStartThrows) {
  const GridEnvironment env = boxed_env();
  const HorizonProblem problem = make_problem(env, {1, 1}, {0, 0}, 2);
  Rng rng(1);
  EXPECT_THROW(construct_candidate(problem, initial_pheromone(2, 1.0), AcoParams{}, rng), ValidationError);
  const HorizonProblem outside = make_problem(env, {-1, 0}, {0, 0}, 2);
  EXPECT_THROW(construct_candidate(outside, initial_pheromone(2, 1.0), AcoParams{}, rng), ValidationError);
}

TEST(Aco, CandidateCostExamples) {
  Field cost = Field::Constant(3, 4, 1.0);
  cost(0, 1) = 3.0;
  cost(0, 2) = 4.0;
  const GridEnvironment env(1.0, Field::Zero(3, 4), Field::Zero(3, 4), ObstacleMask::Zero(3, 4), cost);
  const HorizonProblem axial = make_problem(env, {0, 0}, {3, 2}, 2);
  EXPECT_DOUBLE_EQ(manual_candidate(axial, {0, 0}).cost, 7.0);

  Field two = Field::Constant(3, 3, 2.0);
  const GridEnvironment env2(1.0, Field::Zero(3, 3), Field::Zero(3, 3), ObstacleMask::Zero(3, 3), two);
  const HorizonProblem diag = make_problem(env2, {0, 0}, {2, 2}, 1);
  EXPECT_NEAR(manual_candidate(diag, {1}).cost, 2.0 * std::sqrt(2.0), 1e-15);

  ObstacleMask mask = ObstacleMask::Zero(3, 3);
  mask(0, 1) = 1;
  const GridEnvironment env3(1.0, Field::Zero(3, 3), Field::Zero(3, 3), mask, two);
  const HorizonProblem blocked = make_problem(env3, {0, 0}, {2, 2}, 2);
  EXPECT_TRUE(std::isinf(manual_candidate(blocked, {0, 2}).cost));
}

TEST(Aco, PenaltyModeIsFinite) {
  ObstacleMask mask = ObstacleMask::Zero(3, 3);
  mask(0, 1) = 1;
  const GridEnvironment env(1.0, Field::Zero(3, 3), Field::Zero(3, 3), mask, Field::Constant(3, 3, 2.0));
  HorizonProblem problem = make_problem(env, {0, 0}, {2, 2}, 2);
  problem.cost.infeasible = InfeasibleCost::penalty;
  problem.cost.penalty = 1000.0;
  const SequenceEvaluation e = evaluate_sequence(problem, {0, 2});
  EXPECT_FALSE(e.feasible);
  EXPECT_EQ(e.invalid_steps, 1);
  EXPECT_DOUBLE_EQ(e.cost, 2.0 + 1000.0);
}

TEST(Aco, PheromoneUpdateExamples) {
  const GridEnvironment env = uniform_env(4, 4, 1.0);
  const HorizonProblem problem = make_problem(env, {0, 0}, {3, 3}, 2);
  Candidate c;
  c.incidence = IncidenceMatrix::Zero(2, kNumMoves);
  c.incidence(1, 4) = 1.0;
  c.cost = 2.0;
  c.feasible = true;
  const PheromoneMatrix next = pheromone_update(initial_pheromone(2, 1.0), {c}, 0.5);
  for (int h = 0; h < 2; ++h)
    for (int m = 0; m < 8; ++m) EXPECT_DOUBLE_EQ(next(h, m), (h == 1 && m == 4) ? 1.0 : 0.5);

  Candidate bad = c;
  bad.cost = kInf;
  bad.feasible = false;
  const PheromoneMatrix phi = PheromoneMatrix::Constant(2, kNumMoves, 0.8);
  EXPECT_TRUE(pheromone_update(phi, {bad, bad}, 0.3).isApprox(0.7 * phi, 1e-15));
  (void)problem;
}

TEST(Aco, PheromoneMatrixFormMatchesLoop) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  std::uniform_int_distribution<int> move(0, 7);
  std::bernoulli_distribution infeasible(0.2);
  for (int trial = 0; trial < 300; ++trial) {
    const int h = 1 + trial % 6;
    PheromoneMatrix phi(h, kNumMoves);
    for (int i = 0; i < h; ++i)
      for (int m = 0; m < 8; ++m) phi(i, m) = u(gen);
    std::vector<Candidate> cands(1 + trial % 9);
    for (auto& c : cands) {
      c.incidence = IncidenceMatrix::Zero(h, kNumMoves);
      const int executed = 1 + static_cast<int>(gen() % static_cast<unsigned>(h));
      for (int i = 0; i < executed; ++i) c.incidence(i, move(gen)) = 1.0;
      c.feasible = !infeasible(gen);
      c.cost = c.feasible ? u(gen) * 10.0 : kInf;
    }
    const double rho = 0.05 + 0.9 * (trial % 10) / 10.0;
    const PheromoneMatrix fast = pheromone_update(phi, cands, rho);
    for (int i = 0; i < h; ++i)
      for (int m = 0; m < 8; ++m) {
        double expected = (1.0 - rho) * phi(i, m);
        for (const auto& c : cands) expected += c.incidence(i, m) * (std::isinf(c.cost) ? 0.0 : 1.0 / c.cost);
        EXPECT_NEAR(fast(i, m), expected, 1e-12);
      }
  }
}

TEST(Aco, MatchesExhaustiveOnFreeGrid) {
  const GridEnvironment env = testing_support::random_env(8, 4, 0.0);
  for (int k = 0; k < 10; ++k) {
    const GridPos start{k % 4, (k / 4) % 4};
    const GridPos target{3 - start.col, 3};
    const HorizonProblem problem = make_problem(env, start, target, 2, HorizonCost{}.terminal_weight);
    AcoParams params;
    params.seed = static_cast<std::uint64_t>(k);
    const auto result = aco_horizon_search(problem, params);
    EXPECT_NEAR(result.best.cost,
                testing_support::oracle_best_cost(env, start, target, 2, HorizonCost{}.terminal_weight), 1e-12);
  }
}

TEST(Aco, SearchContracts) {
  const GridEnvironment env = testing_support::random_env(21, 7, 0.25, {{1, 1}, {6, 5}});
  HorizonProblem problem = make_problem(env, {1, 1}, {6, 5}, 3, 2.0);
  AcoParams params;
  params.seed = 77;
  params.ants = 10;
  params.generations = 15;
  const auto a = aco_horizon_search(problem, params);
  const auto b = aco_horizon_search(problem, params);
  EXPECT_EQ(a.best.moves, b.best.moves);
  EXPECT_EQ(a.trace, b.trace);
  ASSERT_EQ(a.trace.size(), 15u);
  for (std::size_t i = 1; i < a.trace.size(); ++i) EXPECT_LE(a.trace[i], a.trace[i - 1]);
  EXPECT_GT(a.pheromone.minCoeff(), 0.0);
  EXPECT_TRUE(a.pheromone.allFinite());
  const double optimum = testing_support::oracle_best_cost(env, {1, 1}, {6, 5}, 3, 2.0);
  EXPECT_GE(a.best.cost, optimum - 1e-12);
  EXPECT_NEAR(a.best.cost,
              testing_support::oracle_sequence_cost(env, {1, 1}, {6, 5}, a.best.padded_moves(3), 2.0), 1e-12);
}

TEST(Aco, ParameterValidation) {
  AcoParams p;
  p.evaporation = 1.0;
  EXPECT_THROW(validate(p), ValidationError);
  p = AcoParams{};
  p.epsilon = 0.0;
  EXPECT_THROW(validate(p), ValidationError);
  p = AcoParams{};
  p.ants = 0;
  EXPECT_THROW(validate(p), ValidationError);
  p = AcoParams{};
  p.initial_pheromone = -1.0;
  EXPECT_THROW(validate(p), ValidationError);
}
