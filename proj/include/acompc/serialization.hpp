#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "acompc/aco.hpp"
#include "acompc/dispatch.hpp"
#include "acompc/energy_model.hpp"
#include "acompc/environment.hpp"
#include "acompc/metaheuristics.hpp"
#include "acompc/planner.hpp"

namespace acompc {

using Json = nlohmann::ordered_json;

// Environment documents: {n_x, n_y, cell_size_km, polar, wind, obstacles, cost},
// each map an array of n_y rows of n_x numbers.
Json environment_to_json(const GridEnvironment& env);
GridEnvironment environment_from_json(const Json& doc);
void save_environment(const GridEnvironment& env, const std::filesystem::path& path);
GridEnvironment load_environment(const std::filesystem::path& path);

/// Shortest round-trip decimal; "inf" / "-inf" / "nan" for non-finite values.
std::string format_number(double v);
/// Fixed-point with `digits` decimals; non-finite values as above.
std::string format_fixed(double v, int digits);

// Parameter blocks. Every from_json rejects unknown keys; absent keys keep defaults.
Json to_json(const EnvSpec& spec);
EnvSpec env_spec_from_json(const Json& doc);
Json to_json(const EnergyModelCoefficients& c);
EnergyModelCoefficients energy_coefficients_from_json(const Json& doc);
Json to_json(const RenewableModelCoefficients& c);
RenewableModelCoefficients renewable_coefficients_from_json(const Json& doc);
Json to_json(const HorizonCost& c);
HorizonCost horizon_cost_from_json(const Json& doc, HorizonCost base = {});
Json to_json(const AcoParams& p);
AcoParams aco_params_from_json(const Json& doc, AcoParams base = {});
Json to_json(const MetaheuristicParams& p);
MetaheuristicParams meta_params_from_json(const Json& doc, MetaheuristicParams base = {});
Json to_json(const MpcParams& p);
MpcParams mpc_params_from_json(const Json& doc, MpcParams base = {});
Json to_json(const BatteryParams& b);
BatteryParams battery_from_json(const Json& doc, BatteryParams base = {});

Json to_json(const PlanResult& r);
Json to_json(const DispatchProblem& p);
Json to_json(const DispatchSchedule& s);

/// Dispatch problem document. Either `renewable_kw` or the pair
/// `irradiance` + `wind` (with optional `renewable_model`) supplies the
/// forecast; `forecast_file` names a delimited `irradiance, wind, demand_kw`
/// file that supplies both forecast inputs and demand.
DispatchProblem dispatch_problem_from_json(const Json& doc, const std::filesystem::path& base_dir = {});

template <typename Coefficients>
Json fit_to_json(const ModelFit<Coefficients>& fit) {
  return Json{{"coefficients", to_json(fit.coefficients)},
              {"residual_norm", fit.residual_norm},
              {"condition", fit.condition}};
}

/// `col,row` per line, `#` comment header.
void write_path_csv(std::ostream& out, const std::vector<GridPos>& path, const std::string& comment = {});
std::vector<GridPos> read_path_csv(std::istream& in);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Parse "c,r".
GridPos parse_grid_pos(const std::string& text);

}  // namespace acompc
