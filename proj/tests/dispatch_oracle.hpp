#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "acompc/dispatch.hpp"

namespace testing_support {

struct GridOptimum {
  double objective = acompc::kInf;
};

// Enumerates integer (charge, discharge) per slot; the cheapest balancing
// backup for fixed battery flows is max(net load, 0).
inline GridOptimum brute_force(const acompc::DispatchProblem& p) {
  const Eigen::Index n = p.horizon();
  const int max_ch = static_cast<int>(p.battery.max_charge);
  const int max_dis = static_cast<int>(p.battery.max_discharge);
  const int per_slot = (max_ch + 1) * (max_dis + 1);
  long long combos = 1;
  for (Eigen::Index t = 0; t < n; ++t) combos *= per_slot;
  GridOptimum best;
  for (long long code = 0; code < combos; ++code) {
    long long x = code;
    double soc = p.battery.initial_soc;
    double cost = 0.0;
    bool ok = true;
    for (Eigen::Index t = 0; t < n && ok; ++t) {
      const int slot = static_cast<int>(x % per_slot);
      x /= per_slot;
      const double ch = slot % (max_ch + 1);
      const double dis = slot / (max_ch + 1);
      soc += p.battery.efficiency * p.battery.dt * ch - p.battery.dt / p.battery.efficiency * dis;
      if (soc < p.battery.soc_min - 1e-9 || soc > p.battery.soc_max + 1e-9) ok = false;
      const double backup = std::max(p.demand(t) + ch - p.renewable(t) - dis, 0.0);
      cost += (p.weights.battery * dis + p.weights.backup * backup) * p.battery.dt;
    }
    if (ok) best.objective = std::min(best.objective, cost);
  }
  return best;
}

inline acompc::DispatchProblem random_problem(std::mt19937_64& gen, Eigen::Index n) {
  std::uniform_int_distribution<int> load(0, 8);
  std::uniform_int_distribution<int> rate(1, 5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  acompc::DispatchProblem p;
  p.demand.resize(n);
  p.renewable.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    p.demand(t) = load(gen);
    p.renewable(t) = load(gen);
  }
  p.weights.battery = u(gen);
  p.weights.backup = u(gen);
  p.battery.capacity = 20.0;
  p.battery.soc_min = 2.0;
  p.battery.soc_max = 16.0;
  p.battery.initial_soc = std::uniform_int_distribution<int>(2, 16)(gen);
  p.battery.max_charge = rate(gen);
  p.battery.max_discharge = rate(gen);
  p.battery.efficiency = 0.8 + 0.2 * u(gen);
  return p;
}

}  // namespace testing_support
