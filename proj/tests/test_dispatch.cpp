#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "acompc/dispatch.hpp"
#include "acompc/lp.hpp"
#include "dispatch_oracle.hpp"

using namespace acompc;
using testing_support::brute_force;
using testing_support::GridOptimum;
using testing_support::random_problem;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::MatrixXd empty_rows(Eigen::Index cols) { return Eigen::MatrixXd::Zero(0, cols); }

DispatchProblem single_slot(double demand, double renewable) {
  DispatchProblem p;
  p.demand = vec({demand});
  p.renewable = vec({renewable});
  return p;
}

void expect_physical(const DispatchProblem& p, const DispatchSchedule& s) {
  for (Eigen::Index t = 0; t < p.horizon(); ++t) {
    const double residual =
        p.renewable(t) + s.discharge(t) + s.backup(t) - p.demand(t) - s.charge(t) - s.curtail(t);
    EXPECT_LE(std::abs(residual), 1e-6) << "slot " << t;
    EXPECT_GE(s.soc(t), p.battery.soc_min - 1e-9);
    EXPECT_LE(s.soc(t), p.battery.soc_max + 1e-9);
    EXPECT_LE(s.charge(t), p.battery.max_charge + 1e-9);
    EXPECT_LE(s.discharge(t), p.battery.max_discharge + 1e-9);
    EXPECT_GE(s.charge(t), -1e-9);
    EXPECT_GE(s.discharge(t), -1e-9);
    EXPECT_GE(s.backup(t), -1e-9);
    EXPECT_GE(s.curtail(t), -1e-9);
  }
  EXPECT_TRUE(s.soc.isApprox(soc_trajectory(p.battery, s.charge, s.discharge), 1e-12));
}

}  // namespace

TEST(Lp, KnownOptimum) {
  // max x + y  s.t.  x + 2y <= 4,  3x + y <= 6
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 3, 1;
  const LpSolution s = solve_lp(vec({-1, -1}), a, vec({4, 6}), empty_rows(2), Eigen::VectorXd(0));
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.x(0), 1.6, 1e-9);
  EXPECT_NEAR(s.x(1), 1.2, 1e-9);
  EXPECT_NEAR(s.objective, -2.8, 1e-9);
}

TEST(Lp, EqualityRows) {
  Eigen::MatrixXd eq(1, 2);
  eq << 1, 1;
  const LpSolution s = solve_lp(vec({1, 0}), empty_rows(2), Eigen::VectorXd(0), eq, vec({1}));
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.x(0), 0.0, 1e-12);
  EXPECT_NEAR(s.x(1), 1.0, 1e-12);
}

TEST(Lp, NegativeRightHandSide) {
  // x >= 2 written as -x <= -2
  Eigen::MatrixXd a(1, 1);
  a << -1;
  const LpSolution s = solve_lp(vec({1}), a, vec({-2}), empty_rows(1), Eigen::VectorXd(0));
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.x(0), 2.0, 1e-12);
}

TEST(Lp, Infeasible) {
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;
  const LpSolution s = solve_lp(vec({1}), a, vec({1, -2}), empty_rows(1), Eigen::VectorXd(0));
  EXPECT_EQ(s.status, LpStatus::infeasible);
}

TEST(Lp, Unbounded) {
  Eigen::MatrixXd a(1, 2);
  a << 1, -1;
  const LpSolution s = solve_lp(vec({-1, 0}), a, vec({1}), empty_rows(2), Eigen::VectorXd(0));
  EXPECT_EQ(s.status, LpStatus::unbounded);
}

TEST(Lp, DegenerateProblemTerminates) {
  // A classic cycling example for the largest-coefficient rule.
  Eigen::MatrixXd a(3, 4);
  a << 0.25, -8, -1, 9,  //
      0.5, -12, -0.5, 3,  //
      0, 0, 1, 0;
  const LpSolution s = solve_lp(vec({-0.75, 20, -0.5, 6}), a, vec({0, 0, 1}), empty_rows(4), Eigen::VectorXd(0));
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective, -1.25, 1e-9);
}

TEST(Soc, ReferenceBatteryArithmetic) {
  const BatteryParams b;
  EXPECT_EQ(soc_trajectory(b, vec({100}), vec({0}))(0), 590.0);
  EXPECT_EQ(soc_trajectory(b, vec({0}), vec({90}))(0), 400.0);
  const Eigen::VectorXd idle = soc_trajectory(b, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4));
  EXPECT_TRUE((idle.array() == 500.0).all());
  EXPECT_THROW(soc_trajectory(b, vec({1, 2}), vec({1})), ValidationError);
}

TEST(Soc, CumulativeOperator) {
  const Eigen::MatrixXd l = cumulative_operator<double>(3);
  Eigen::MatrixXd expected(3, 3);
  expected << 1, 0, 0, 1, 1, 0, 1, 1, 1;
  EXPECT_EQ(l, expected);
}

TEST(Dispatch, SurplusCharges) {
  const DispatchSchedule s = solve_dispatch(single_slot(50, 80));
  EXPECT_NEAR(s.charge(0), 30.0, 1e-9);
  EXPECT_NEAR(s.curtail(0), 0.0, 1e-9);
  EXPECT_NEAR(s.backup(0), 0.0, 1e-9);
  EXPECT_NEAR(s.soc(0), 527.0, 1e-9);
  EXPECT_NEAR(s.objective, 0.0, 1e-12);
}

TEST(Dispatch, DeficitUsesBatteryThenBackup) {
  const DispatchProblem p = single_slot(200, 0);
  const DispatchSchedule s = solve_dispatch(p);
  EXPECT_NEAR(s.discharge(0), 100.0, 1e-9);
  EXPECT_NEAR(s.backup(0), 100.0, 1e-9);
  EXPECT_NEAR(s.objective, 0.1 * 100 + 0.5 * 100, 1e-9);
  expect_physical(p, s);
}

TEST(Dispatch, ZeroWeightsGiveZeroObjective) {
  DispatchProblem p = single_slot(300, 20);
  p.weights = {0.0, 0.0};
  const DispatchSchedule s = solve_dispatch(p);
  EXPECT_NEAR(s.objective, 0.0, 1e-12);
  expect_physical(p, s);
}

TEST(Dispatch, RejectsBadInput) {
  DispatchProblem p = single_slot(10, 5);
  p.renewable = vec({1, 2});
  EXPECT_THROW(solve_dispatch(p), ValidationError);
  p = single_slot(-1, 5);
  EXPECT_THROW(solve_dispatch(p), ValidationError);
  p = single_slot(1, 5);
  p.battery.initial_soc = 2000;
  EXPECT_THROW(solve_dispatch(p), ValidationError);
}

TEST(Dispatch, MatchesBruteForceGrid) {
  std::mt19937_64 gen(808);
  for (int trial = 0; trial < 40; ++trial) {
    const DispatchProblem p = random_problem(gen, 1 + trial % 3);
    const DispatchSchedule s = solve_dispatch(p);
    const GridOptimum grid = brute_force(p);
    ASSERT_TRUE(std::isfinite(grid.objective));
    EXPECT_LE(s.objective, grid.objective + 1e-9);
    expect_physical(p, s);
    EXPECT_NEAR(s.objective, dispatch_objective(p, s.discharge, s.backup), 1e-12);
  }
}

TEST(Dispatch, DearerBackupNeverRaisesBackupUse) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 30; ++trial) {
    DispatchProblem p = random_problem(gen, 3);
    p.weights.backup = 0.05;
    const double cheap = solve_dispatch(p).backup.sum();
    p.weights.backup = 5.0;
    const double dear = solve_dispatch(p).backup.sum();
    EXPECT_LE(dear, cheap + 1e-9);
  }
}

TEST(Demand, SingleBin) {
  PlanResult plan;
  plan.path = {{0, 0}, {1, 0}};
  plan.per_step_costs = {10.0};
  plan.total_energy = 10.0;
  plan.cell_size_km = 5.0;
  const Eigen::VectorXd d = demand_from_path(plan, 5.0, 1.0);
  ASSERT_EQ(d.size(), 1);
  EXPECT_NEAR(d(0), 10.0, 1e-12);
}

TEST(Demand, SplitsAcrossBins) {
  PlanResult plan;
  plan.path = {{0, 0}, {1, 0}, {2, 0}};
  plan.per_step_costs = {3.0, 5.0};
  plan.total_energy = 8.0;
  // 1 km per step at 1.5 km/h: steps span [0, 2/3) and [2/3, 4/3) hours.
  const Eigen::VectorXd d = demand_from_path(plan, 1.5, 1.0);
  ASSERT_EQ(d.size(), 2);
  EXPECT_NEAR(d(0), 3.0 + 2.5, 1e-12);
  EXPECT_NEAR(d(1), 2.5, 1e-12);
}

TEST(Demand, ConservesEnergy) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    PlanResult plan;
    plan.path.push_back({0, 0});
    plan.total_energy = 0.0;
    for (int k = 0; k < 3 + trial; ++k) {
      const GridPos step = kMoves[gen() % 8];
      plan.path.push_back(plan.path.back() + step);
      plan.per_step_costs.push_back(u(gen));
      plan.total_energy += plan.per_step_costs.back();
    }
    plan.cell_size_km = 0.5 + trial * 0.1;
    const double dt = 0.25 + 0.25 * (trial % 3);
    const Eigen::VectorXd d = demand_from_path(plan, u(gen), dt);
    EXPECT_NEAR(d.sum() * dt, plan.total_energy, 1e-9);
    EXPECT_TRUE((d.array() >= 0.0).all());
  }
}

TEST(Demand, RejectsInfinitePlan) {
  PlanResult plan;
  plan.path = {{0, 0}, {1, 0}};
  plan.per_step_costs = {1.0};
  EXPECT_THROW(demand_from_path(plan, 1.0, 1.0), ValidationError);
}

TEST(Renewable, SeriesFromReferenceModel) {
  const Eigen::VectorXd p = renewable_series(vec({50, 0}), vec({8, 0}), kReferenceRenewableModel);
  EXPECT_NEAR(p(0), 973.992, 1e-9);
  EXPECT_EQ(p(1), 0.0);  // clamped from the negative intercept
  const Eigen::VectorXd zero = renewable_series(vec({3, 4}), vec({5, 6}), RenewableModelCoefficients{});
  EXPECT_TRUE((zero.array() == 0.0).all());
  EXPECT_THROW(renewable_series(vec({1}), vec({1, 2}), kReferenceRenewableModel), ValidationError);
}
