#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "acompc/error.hpp"
#include "acompc/metaheuristics.hpp"
#include "acompc/planner.hpp"
#include "acompc/serialization.hpp"
#include "test_support.hpp"

using namespace acompc;
using testing_support::uniform_env;

namespace {

HorizonOptimizer exhaustive() {
  return [](const HorizonProblem& p, std::uint64_t) { return exhaustive_horizon_search(p); };
}

HorizonOptimizer aco(int ants = 30, int generations = 20) {
  return [=](const HorizonProblem& p, std::uint64_t seed) {
    AcoParams params;
    params.ants = ants;
    params.generations = generations;
    params.seed = seed;
    return aco_solve(p, params);
  };
}

HorizonCost horizon_of(int h) {
  HorizonCost c;
  c.horizon = h;
  return c;
}

void expect_connected(const std::vector<GridPos>& path) {
  for (std::size_t i = 1; i < path.size(); ++i) EXPECT_TRUE(is_adjacent8(path[i - 1], path[i])) << "step " << i;
}

}  // namespace

TEST(DirectPath, Diagonal) {
  const auto p = direct_path({0, 0}, {3, 3});
  ASSERT_EQ(p.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(p[static_cast<std::size_t>(i)], (GridPos{i, i}));
}

TEST(DirectPath, Vertical) {
  const auto p = direct_path({0, 0}, {0, 4});
  ASSERT_EQ(p.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(p[static_cast<std::size_t>(i)], (GridPos{0, i}));
}

TEST(DirectPath, StaysWithinHalfCellOfTheLine) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> coord(-12, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const GridPos a{coord(gen), coord(gen)};
    const GridPos b{coord(gen), coord(gen)};
    const auto p = direct_path(a, b);
    ASSERT_EQ(static_cast<int>(p.size()), chebyshev(a, b) + 1);
    EXPECT_EQ(p.front(), a);
    EXPECT_EQ(p.back(), b);
    expect_connected(p);
    const double dx = b.col - a.col;
    const double dy = b.row - a.row;
    for (GridPos q : p) {
      // Offset along the minor axis from the ideal line.
      if (std::abs(dx) >= std::abs(dy)) {
        const double ideal = dx == 0 ? a.row : a.row + dy * (q.col - a.col) / dx;
        EXPECT_LE(std::abs(q.row - ideal), 0.5 + 1e-12);
      } else {
        const double ideal = a.col + dx * (q.row - a.row) / dy;
        EXPECT_LE(std::abs(q.col - ideal), 0.5 + 1e-12);
      }
    }
  }
}

TEST(DirectPath, ShallowSlope) {
  const auto p = direct_path({0, 0}, {2, 5});
  ASSERT_EQ(p.size(), 6u);
  for (int r = 0; r <= 5; ++r) {
    EXPECT_EQ(p[static_cast<std::size_t>(r)].row, r);
    EXPECT_LE(std::abs(p[static_cast<std::size_t>(r)].col - 0.4 * r), 0.5);
  }
}

TEST(WindFirst, HorizontalThenVertical) {
  const std::vector<GridPos> expected{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {3, 1}, {3, 2}};
  EXPECT_EQ(wind_first_path({0, 0}, {3, 2}), expected);
  EXPECT_EQ(wind_first_path({1, 4}, {6, 4}), direct_path({1, 4}, {6, 4}));
  const auto vertical = wind_first_path({2, 5}, {2, 1});
  ASSERT_EQ(vertical.size(), 5u);
  for (GridPos q : vertical) EXPECT_EQ(q.col, 2);
}

TEST(Combined5050, ZeroAmplitudeIsDirect) {
  EXPECT_EQ(combined_5050_path({0, 0}, {9, 4}, 0.0), direct_path({0, 0}, {9, 4}));
}

TEST(Combined5050, EndpointsAndDeviation) {
  const auto p = combined_5050_path({0, 0}, {10, 0}, 2.0);
  EXPECT_EQ(p.front(), (GridPos{0, 0}));
  EXPECT_EQ(p.back(), (GridPos{10, 0}));
  expect_connected(p);
  int deviation = 0;
  for (GridPos q : p) deviation = std::max(deviation, std::abs(q.row));
  EXPECT_EQ(deviation, 2);
  EXPECT_THROW(combined_5050_path({0, 0}, {4, 4}, -1.0), ValidationError);
}

TEST(Combined5050, DefaultAmplitude) {
  EXPECT_DOUBLE_EQ(default_5050_amplitude({0, 0}, {3, 0}), 1.0);
  EXPECT_DOUBLE_EQ(default_5050_amplitude({0, 0}, {49, 49}), 7.0);
}

TEST(FixedPath, Evaluation) {
  GridEnvironment env = uniform_env(5, 5, 2.0);
  EXPECT_DOUBLE_EQ(evaluate_fixed_path(env, {{0, 0}, {1, 0}, {2, 0}, {2, 1}}), 6.0);
  EXPECT_DOUBLE_EQ(evaluate_fixed_path(env, {{3, 3}}), 0.0);
  EXPECT_TRUE(std::isinf(evaluate_fixed_path(env, {{0, 0}, {-1, 0}})));

  ObstacleMask mask = ObstacleMask::Zero(5, 5);
  mask(0, 1) = 1;
  const GridEnvironment blocked(1.0, Field::Zero(5, 5), Field::Zero(5, 5), mask, Field::Constant(5, 5, 2.0));
  EXPECT_TRUE(std::isinf(evaluate_fixed_path(blocked, {{0, 0}, {1, 0}, {2, 0}})));
  const PlanResult r = fixed_plan(blocked, direct_path({0, 0}, {4, 0}), {4, 0}, "direct");
  EXPECT_TRUE(std::isinf(r.total_energy));
  EXPECT_EQ(r.terminated, Termination::infeasible);
}

TEST(FixedPath, ShortPathIsNotReached) {
  const GridEnvironment env = uniform_env(5, 5, 1.0);
  const PlanResult r = fixed_plan(env, {{0, 0}, {1, 1}}, {4, 4}, "partial");
  EXPECT_TRUE(std::isinf(r.total_energy));
  EXPECT_EQ(r.terminated, Termination::max_iters);
}

TEST(Plan, StartEqualsTarget) {
  const GridEnvironment env = uniform_env(4, 4, 1.0);
  const PlanResult r = plan(env, {2, 2}, {2, 2}, horizon_of(3), exhaustive(), {}, 1);
  ASSERT_EQ(r.path.size(), 1u);
  EXPECT_DOUBLE_EQ(r.total_energy, 0.0);
  EXPECT_EQ(r.terminated, Termination::reached);
}

TEST(Plan, AcoCrossesUniformGridDiagonally) {
  const double c = 1.7;
  const GridEnvironment env = uniform_env(6, 6, c);
  const PlanResult r = plan(env, {0, 0}, {5, 5}, horizon_of(3), aco(), {}, 11);
  EXPECT_EQ(r.terminated, Termination::reached);
  EXPECT_EQ(r.steps, 5);
  EXPECT_NEAR(r.total_energy, 5.0 * c * std::sqrt(2.0), 1e-12);
}

TEST(Plan, EnclosedTargetNeverReaches) {
  ObstacleMask mask = ObstacleMask::Zero(8, 8);
  for (int k = 4; k <= 6; ++k) {
    mask(4, k) = mask(6, k) = 1;
    mask(k, 4) = mask(k, 6) = 1;
  }
  const GridEnvironment env(1.0, Field::Zero(8, 8), Field::Zero(8, 8), mask, Field::Constant(8, 8, 1.0));
  MpcParams mpc;
  mpc.max_iterations = 60;
  mpc.stall_window = 10;
  const PlanResult r = plan(env, {0, 0}, {5, 5}, horizon_of(2), exhaustive(), mpc, 3);
  EXPECT_TRUE(r.terminated == Termination::stalled || r.terminated == Termination::max_iters);
  EXPECT_TRUE(std::isinf(r.total_energy));
}

TEST(Plan, RejectsBlockedEndpoints) {
  ObstacleMask mask = ObstacleMask::Zero(4, 4);
  mask(3, 3) = 1;
  const GridEnvironment env(1.0, Field::Zero(4, 4), Field::Zero(4, 4), mask, Field::Constant(4, 4, 1.0));
  EXPECT_THROW(plan(env, {0, 0}, {3, 3}, horizon_of(2), exhaustive(), {}, 0), ValidationError);
  EXPECT_THROW(plan(env, {0, 9}, {1, 1}, horizon_of(2), exhaustive(), {}, 0), ValidationError);
}

TEST(Plan, GeodesicOnUniformGrid) {
  const double c = 0.8;
  const double cell = 2.5;
  const GridEnvironment env = uniform_env(15, 12, c, cell);
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const GridPos a{static_cast<int>(gen() % 15), static_cast<int>(gen() % 12)};
    const GridPos b{static_cast<int>(gen() % 15), static_cast<int>(gen() % 12)};
    const PlanResult r = plan(env, a, b, horizon_of(3), exhaustive(), {}, 0);
    const int dx = std::abs(a.col - b.col);
    const int dy = std::abs(a.row - b.row);
    const double expected = (std::min(dx, dy) * std::sqrt(2.0) + std::abs(dx - dy)) * c * cell;
    EXPECT_EQ(r.terminated, Termination::reached);
    EXPECT_NEAR(r.total_energy, expected, 1e-9);
  }
}

TEST(Plan, FinitePathsAreValidAndSumPerStep) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const GridEnvironment env = testing_support::random_env(seed + 40, 10, 0.15, {{0, 0}, {9, 9}});
    const PlanResult r = plan(env, {0, 0}, {9, 9}, horizon_of(3), aco(10, 10), {}, seed);
    if (!std::isfinite(r.total_energy)) continue;
    EXPECT_EQ(r.path.back(), (GridPos{9, 9}));
    expect_connected(r.path);
    for (GridPos q : r.path) EXPECT_TRUE(is_valid(env, q));
    double sum = 0.0;
    for (double e : r.per_step_costs) sum += e;
    EXPECT_NEAR(r.total_energy, sum, 1e-9);
    EXPECT_NEAR(r.total_energy, evaluate_fixed_path(env, r.path), 1e-9);
  }
}

TEST(Plan, SameSeedSamePath) {
  const GridEnvironment env = testing_support::random_env(7, 10, 0.1, {{0, 0}, {9, 8}});
  const PlanResult a = plan(env, {0, 0}, {9, 8}, horizon_of(3), aco(10, 8), {}, 5);
  const PlanResult b = plan(env, {0, 0}, {9, 8}, horizon_of(3), aco(10, 8), {}, 5);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.per_step_costs, b.per_step_costs);
}

TEST(Plan, ArrivalToleranceSnapsToTarget) {
  const GridEnvironment env = uniform_env(6, 6, 1.0);
  MpcParams mpc;
  mpc.arrival_tolerance = 1.5;
  const PlanResult r = plan(env, {0, 0}, {4, 4}, horizon_of(2), exhaustive(), mpc, 0);
  EXPECT_EQ(r.terminated, Termination::reached);
  EXPECT_EQ(r.path.back(), (GridPos{4, 4}));
  expect_connected(r.path);
}

TEST(PathCsv, RoundTrip) {
  const std::vector<GridPos> path{{0, 0}, {1, 1}, {2, 1}, {12, 40}};
  std::stringstream buf;
  write_path_csv(buf, path, "test path");
  EXPECT_EQ(read_path_csv(buf), path);
}
