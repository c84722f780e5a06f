#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "acompc/dispatch.hpp"
#include "acompc/environment.hpp"
#include "acompc/planner.hpp"
#include "acompc/serialization.hpp"

namespace acompc {

/// Cost coefficients used when a scenario gives no energy model.
inline constexpr EnergyModelCoefficients kBenchmarkEnergyModel{0.5, 0.05, 0.001, 0.2};

/// Names accepted in a scenario's planner list.
const std::vector<std::string>& planner_names();

struct PlannerSpec {
  std::string name;
  std::string label;  // defaults to name
  int horizon = 0;    // 0 -> scenario horizon
  AcoParams aco;
  MetaheuristicParams meta;
  int aco_rounds = 1;  // woa-aco only
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  double amplitude = -1.0;  // 50-50 only; < 0 -> default
};

/// Two-square benchmark layout. `corner`: start top-left, target bottom-right.
/// `center`: target in the middle of the map between the squares.
struct BenchmarkLayout {
  std::string variant = "corner";
  int size = 50;
  double cell_size_km = 1.0;
};

struct ScenarioEnvironment {
  std::optional<EnvSpec> spec;
  std::optional<std::filesystem::path> file;
  std::optional<BenchmarkLayout> benchmark;
  bool reseed = false;  // spec only: regenerate with each run seed
};

struct DispatchBlock {
  std::string planner;  // label of the planner whose path drives the demand
  double cruise_speed_kmh = 10.0;
  int horizon = 24;     // slots; demand is padded with zeros / truncated
  Eigen::VectorXd irradiance;
  Eigen::VectorXd wind;
  RenewableModelCoefficients renewable = kReferenceRenewableModel;
  BatteryParams battery;
  DispatchWeights weights;
};

struct ScenarioSpec {
  ScenarioEnvironment environment;
  EnergyModelCoefficients energy_model;
  std::optional<std::filesystem::path> energy_samples;
  double cost_floor = 0.0;
  std::optional<GridPos> start;   // required unless the benchmark layout supplies it
  std::optional<GridPos> target;
  HorizonCost horizon;
  MpcParams mpc;
  std::vector<PlannerSpec> planners;
  std::vector<std::uint64_t> seeds;
  std::optional<DispatchBlock> dispatch;
  bool timing = false;  // write wall_ms to the table (breaks byte-reproducibility)
  bool plots = true;
};

/// Parse and validate; errors name the offending field path. Relative file
/// references resolve against `base_dir`.
ScenarioSpec scenario_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
/// Full resolved configuration, defaults included.
Json to_json(const ScenarioSpec& spec);

EnvSpec benchmark_env_spec(const BenchmarkLayout& layout, std::uint64_t seed);
std::pair<GridPos, GridPos> benchmark_endpoints(const BenchmarkLayout& layout);

/// Build the optimizer for a named horizon planner (not the fixed baselines).
HorizonOptimizer make_optimizer(const PlannerSpec& spec, int horizon);

/// Run one planner on one environment. Fixed baselines ignore the seed.
PlanResult run_planner(const PlannerSpec& spec, const GridEnvironment& env, GridPos start, GridPos target,
                       const HorizonCost& horizon, const MpcParams& mpc, std::uint64_t seed);

struct BenchRow {
  std::string planner;
  std::uint64_t seed = 0;
  double energy = kInf;  // independent re-evaluation of the emitted path
  int steps = 0;
  Termination status = Termination::max_iters;
  double wall_ms = 0.0;
};

struct PlannerSummary {
  std::string planner;
  double median = kInf;
  double min = kInf;
  double max = kInf;
  int feasible = 0;
  int runs = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // ordered by (planner list order, seed list order)
  std::vector<PlannerSummary> summaries;
  std::vector<std::string> environment_digests;  // one per seed
  bool timing = false;
};

struct SeedRun {
  std::uint64_t seed = 0;
  GridEnvironment env;
  GridPos start;
  GridPos target;
  std::vector<PlanResult> plans;  // one per planner, in planner order
  std::optional<DispatchSchedule> dispatch;
};

struct ScenarioOutcome {
  BenchReport report;
  std::vector<SeedRun> runs;
};

/// Median of the values (mean of the two middle ones for even counts); inf sorts last.
double median_of(std::vector<double> values);

std::vector<PlannerSummary> summarize(const std::vector<BenchRow>& rows, const std::vector<std::string>& planners);

/// Run every planner x seed with `jobs` worker threads. Output order is
/// independent of `jobs`.
ScenarioOutcome run_scenario(const ScenarioSpec& spec, int jobs = 1);

/// CSV: planner,seed,energy_kWh,steps,status,wall_ms, then one summary row per planner.
std::string emit_table(const BenchReport& report);

struct PlotPath {
  std::string name;
  std::vector<GridPos> positions;
  double cost = kInf;
};

/// SVG: cost heatmap, obstacle squares, one polyline per path, legend "name: cost".
std::string emit_plot(const GridEnvironment& env, const std::vector<PlotPath>& paths, const std::string& title = {});

/// Writes results.csv, report.json, resolved_config.json, plot_seed<k>.svg and
/// dispatch_seed<k>.json (when a dispatch block is present) into `out_dir`.
void write_scenario_outputs(const ScenarioSpec& spec, const ScenarioOutcome& outcome,
                            const std::filesystem::path& out_dir);

}  // namespace acompc
