#pragma once

#include <vector>

#include <Eigen/Core>

#include "acompc/energy_model.hpp"
#include "acompc/error.hpp"
#include "acompc/planner.hpp"

namespace acompc {

/// Defaults are the reference battery: 1000 kWh, start at 500 kWh, 1000 kW
/// charge, 100 kW discharge, 0.9 efficiency, 1 h step.
struct BatteryParams {
  double capacity = 1000.0;
  double initial_soc = 500.0;
  double max_charge = 1000.0;
  double max_discharge = 100.0;
  double efficiency = 0.9;
  double soc_min = 0.0;
  double soc_max = 1000.0;
  double dt = 1.0;
};

void validate(const BatteryParams& b);

/// Lower-triangular ones: maps per-slot increments to cumulative sums.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cumulative_operator(Eigen::Index n) {
  return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Ones(n, n).template triangularView<Eigen::Lower>();
}

/// X = A x0 + B_ch U_ch + B_dis U_dis with A x0 = x0 * 1,
/// B_ch = eta dt L and B_dis = -(dt / eta) L for the cumulative operator L.
template <typename DerivedC, typename DerivedD>
Eigen::Matrix<typename DerivedC::Scalar, Eigen::Dynamic, 1> soc_trajectory(const BatteryParams& b,
                                                                           const Eigen::MatrixBase<DerivedC>& charge,
                                                                           const Eigen::MatrixBase<DerivedD>& discharge) {
  using Scalar = typename DerivedC::Scalar;
  if (charge.size() != discharge.size()) throw ValidationError("soc_trajectory: charge/discharge length mismatch");
  const Eigen::Index n = charge.size();
  const auto lower = cumulative_operator<Scalar>(n);
  const Scalar eta = static_cast<Scalar>(b.efficiency);
  const Scalar dt = static_cast<Scalar>(b.dt);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> increments =
      (eta * dt) * charge.derived().col(0) - (dt / eta) * discharge.derived().col(0);
  return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(n, static_cast<Scalar>(b.initial_soc)) + lower * increments;
}

struct DispatchWeights {
  double battery = 0.1;  // per kWh discharged
  double backup = 0.5;   // per kWh of backup generation
};

struct DispatchProblem {
  Eigen::VectorXd renewable;  // kW per slot, >= 0
  Eigen::VectorXd demand;     // kW per slot, >= 0
  DispatchWeights weights;
  BatteryParams battery;
  double path_energy = 0.0;  // kWh of the committed path; constant in the objective

  Eigen::Index horizon() const { return demand.size(); }
};

void validate(const DispatchProblem& p);

struct DispatchSchedule {
  Eigen::VectorXd charge;
  Eigen::VectorXd discharge;
  Eigen::VectorXd backup;
  Eigen::VectorXd curtail;
  Eigen::VectorXd soc;
  double objective = 0.0;  // sum_t (c_bat U_dis + c_backup P_backup) dt
  double path_energy = 0.0;
};

/// Exact LP optimum of the horizon dispatch with power balance
/// P_ren + U_dis + P_backup = P_demand + U_ch + curtail. Among cost-optimal
/// schedules, surplus goes to charging before curtailment, earlier slots first.
DispatchSchedule solve_dispatch(const DispatchProblem& problem);

double dispatch_objective(const DispatchProblem& problem, const Eigen::VectorXd& discharge,
                          const Eigen::VectorXd& backup);

/// Per-slot max(predict(coeffs, irr, v), 0).
Eigen::VectorXd renewable_series(const Eigen::VectorXd& irradiance, const Eigen::VectorXd& wind,
                                 const RenewableModelCoefficients& coeffs);

/// Hourly load from a finite-energy plan. Each step's energy is spread
/// uniformly over its traversal time (length / speed) and binned into dt slots.
Eigen::VectorXd demand_from_path(const PlanResult& plan, double cruise_speed_kmh, double dt);

}  // namespace acompc
