#include "acompc/dispatch.hpp"

#include <cmath>

#include "acompc/lp.hpp"

namespace acompc {

void validate(const BatteryParams& b) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(b.capacity) || !finite(b.initial_soc) || !finite(b.soc_min) || !finite(b.soc_max) ||
      !finite(b.max_charge) || !finite(b.max_discharge) || !finite(b.efficiency) || !finite(b.dt))
    throw ValidationError("battery: parameters must be finite");
  if (!(0.0 <= b.soc_min && b.soc_min <= b.initial_soc && b.initial_soc <= b.soc_max && b.soc_max <= b.capacity))
    throw ValidationError("battery: need 0 <= soc_min <= initial_soc <= soc_max <= capacity");
  if (!(b.max_charge > 0.0) || !(b.max_discharge > 0.0)) throw ValidationError("battery: rate limits must be > 0");
  if (!(b.efficiency > 0.0 && b.efficiency <= 1.0)) throw ValidationError("battery: efficiency must lie in (0, 1]");
  if (!(b.dt > 0.0)) throw ValidationError("battery: dt must be > 0");
}

void validate(const DispatchProblem& p) {
  validate(p.battery);
  if (p.demand.size() < 1) throw ValidationError("dispatch: horizon must be >= 1");
  if (p.renewable.size() != p.demand.size())
    throw ValidationError("dispatch: renewable and demand series differ in length");
  if (!p.demand.allFinite() || !p.renewable.allFinite() || (p.demand.array() < 0.0).any() ||
      (p.renewable.array() < 0.0).any())
    throw ValidationError("dispatch: forecasts and demand must be finite and >= 0");
  if (!(p.weights.battery >= 0.0) || !(p.weights.backup >= 0.0) || !std::isfinite(p.weights.battery) ||
      !std::isfinite(p.weights.backup))
    throw ValidationError("dispatch: cost weights must be finite and >= 0");
}

double dispatch_objective(const DispatchProblem& problem, const Eigen::VectorXd& discharge,
                          const Eigen::VectorXd& backup) {
  return (problem.weights.battery * discharge.sum() + problem.weights.backup * backup.sum()) * problem.battery.dt;
}

DispatchSchedule solve_dispatch(const DispatchProblem& problem) {
  validate(problem);
  const BatteryParams& bat = problem.battery;
  const Eigen::Index n = problem.horizon();
  // Variable blocks: [charge | discharge | backup | curtail], each of length n.
  const Eigen::Index nv = 4 * n;
  auto ch = [&](Eigen::Index t) { return t; };
  auto dis = [&](Eigen::Index t) { return n + t; };
  auto bk = [&](Eigen::Index t) { return 2 * n + t; };
  auto cu = [&](Eigen::Index t) { return 3 * n + t; };

  Eigen::MatrixXd a_eq = Eigen::MatrixXd::Zero(n, nv);
  Eigen::VectorXd b_eq(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    a_eq(t, ch(t)) = -1.0;
    a_eq(t, dis(t)) = 1.0;
    a_eq(t, bk(t)) = 1.0;
    a_eq(t, cu(t)) = -1.0;
    b_eq(t) = problem.demand(t) - problem.renewable(t);
  }

  // Rate limits, then SOC upper and lower bounds along the cumulative trajectory.
  Eigen::MatrixXd a_ub = Eigen::MatrixXd::Zero(4 * n + 1, nv);
  Eigen::VectorXd b_ub = Eigen::VectorXd::Zero(4 * n + 1);
  const double gain = bat.efficiency * bat.dt;
  const double drain = bat.dt / bat.efficiency;
  for (Eigen::Index t = 0; t < n; ++t) {
    a_ub(t, ch(t)) = 1.0;
    b_ub(t) = bat.max_charge;
    a_ub(n + t, dis(t)) = 1.0;
    b_ub(n + t) = bat.max_discharge;
    for (Eigen::Index s = 0; s <= t; ++s) {
      a_ub(2 * n + t, ch(s)) = gain;
      a_ub(2 * n + t, dis(s)) = -drain;
      a_ub(3 * n + t, ch(s)) = -gain;
      a_ub(3 * n + t, dis(s)) = drain;
    }
    b_ub(2 * n + t) = bat.soc_max - bat.initial_soc;
    b_ub(3 * n + t) = bat.initial_soc - bat.soc_min;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nv);
  for (Eigen::Index t = 0; t < n; ++t) {
    cost(dis(t)) = problem.weights.battery * bat.dt;
    cost(bk(t)) = problem.weights.backup * bat.dt;
  }

  // Stage 1 leaves the cost-optimal value; the last inequality row stays inert.
  const auto stage1 = solve_lp(cost, a_ub.topRows(4 * n), b_ub.head(4 * n), a_eq, b_eq);
  if (stage1.status != LpStatus::optimal) throw Error("dispatch: LP solve failed");

  // Stage 2: among cost-optimal schedules, least curtailment (earlier slots
  // weigh more), then least discharge and backup.
  a_ub.row(4 * n) = cost.transpose();
  b_ub(4 * n) = stage1.objective;
  Eigen::VectorXd secondary = Eigen::VectorXd::Zero(nv);
  for (Eigen::Index t = 0; t < n; ++t) {
    secondary(cu(t)) = 2.0 - static_cast<double>(t) / static_cast<double>(n);
    secondary(dis(t)) = 0.5;
    secondary(bk(t)) = 0.5;
  }
  const auto stage2 = solve_lp(secondary, a_ub, b_ub, a_eq, b_eq);
  const Eigen::VectorXd& x = stage2.status == LpStatus::optimal ? stage2.x : stage1.x;

  DispatchSchedule out;
  out.charge = x.segment(0, n);
  out.discharge = x.segment(n, n);
  out.backup = x.segment(2 * n, n);
  out.curtail = x.segment(3 * n, n);
  out.soc = soc_trajectory(bat, out.charge, out.discharge);
  out.objective = dispatch_objective(problem, out.discharge, out.backup);
  out.path_energy = problem.path_energy;
  return out;
}

Eigen::VectorXd renewable_series(const Eigen::VectorXd& irradiance, const Eigen::VectorXd& wind,
                                 const RenewableModelCoefficients& coeffs) {
  if (irradiance.size() != wind.size()) throw ValidationError("renewable_series: series differ in length");
  Eigen::VectorXd out(irradiance.size());
  for (Eigen::Index t = 0; t < out.size(); ++t) out(t) = std::max(predict(coeffs, irradiance(t), wind(t)), 0.0);
  return out;
}

Eigen::VectorXd demand_from_path(const PlanResult& plan, double cruise_speed_kmh, double dt) {
  if (!std::isfinite(plan.total_energy)) throw ValidationError("demand_from_path: plan has infinite energy");
  if (!(cruise_speed_kmh > 0.0) || !(dt > 0.0)) throw ValidationError("demand_from_path: speed and dt must be > 0");
  if (plan.per_step_costs.size() + 1 != plan.path.size())
    throw ValidationError("demand_from_path: per-step costs do not match the path");

  std::vector<double> durations;
  double total_time = 0.0;
  for (std::size_t k = 1; k < plan.path.size(); ++k) {
    durations.push_back(step_length_cells(plan.path[k - 1], plan.path[k]) * plan.cell_size_km / cruise_speed_kmh);
    total_time += durations.back();
  }
  const auto bins = static_cast<Eigen::Index>(std::max(1.0, std::ceil(total_time / dt - 1e-9)));
  Eigen::VectorXd energy = Eigen::VectorXd::Zero(bins);
  auto bin_of = [&](double t) { return std::min<Eigen::Index>(static_cast<Eigen::Index>(t / dt), bins - 1); };

  double t = 0.0;
  for (std::size_t k = 0; k < durations.size(); ++k) {
    const double e = plan.per_step_costs[k];
    const double tau = durations[k];
    if (tau <= 0.0) {
      energy(bin_of(t)) += e;
      continue;
    }
    const double end = t + tau;
    double placed = 0.0;
    for (Eigen::Index b = bin_of(t); b < bins; ++b) {
      const double lo = std::max(t, b * dt);
      const double hi = b + 1 == bins ? end : std::min(end, (b + 1) * dt);
      if (hi <= lo) continue;
      const double share = e * (hi - lo) / tau;
      energy(b) += share;
      placed += share;
      if (hi >= end) break;
    }
    energy(bin_of(end)) += e - placed;  // rounding remainder
    t = end;
  }
  return energy / dt;
}

}  // namespace acompc
