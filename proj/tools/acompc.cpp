#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "acompc/error.hpp"
#include "acompc/harness.hpp"

using namespace acompc;

namespace {

void print_config(const Json& config) { std::cout << "# resolved configuration\n" << config.dump(2) << "\n"; }

int cmd_gen_env(const std::string& spec_file, const std::string& out_file) {
  const Json doc = read_json_file(spec_file);
  for (const auto& [key, value] : doc.items())
    if (key != "environment" && key != "energy_model") throw ValidationError(key + ": unknown key");
  if (!doc.contains("environment") || !doc.at("environment").contains("spec"))
    throw ValidationError("environment.spec: required");
  for (const auto& [key, value] : doc.at("environment").items())
    if (key != "spec") throw ValidationError("environment." + key + ": unknown key");
  const EnvSpec spec = env_spec_from_json(doc.at("environment").at("spec"));
  EnergyModelCoefficients model = kBenchmarkEnergyModel;
  double floor = 0.0;
  if (doc.contains("energy_model")) {
    const Json& m = doc.at("energy_model");
    for (const auto& [key, value] : m.items())
      if (key != "coefficients" && key != "cost_floor") throw ValidationError("energy_model." + key + ": unknown key");
    if (m.contains("coefficients")) model = energy_coefficients_from_json(m.at("coefficients"));
    if (m.contains("cost_floor")) floor = m.at("cost_floor").get<double>();
  }
  print_config({{"environment", {{"spec", to_json(spec)}}},
                {"energy_model", {{"coefficients", to_json(model)}, {"cost_floor", floor}}},
                {"out", out_file}});
  const GridEnvironment env = apply_cost_model(generate_environment(spec), model, floor);
  save_environment(env, out_file);
  std::cout << "wrote " << out_file << " digest=" << environment_digest(env) << "\n";
  return 0;
}

int cmd_fit(const std::string& samples_file, const std::string& basis) {
  const SampleSet samples = read_samples_file(samples_file);
  print_config({{"samples", samples_file}, {"basis", basis}, {"count", samples.size()}});
  const Json out = basis == "energy" ? fit_to_json(fit_energy_model(samples)) : fit_to_json(fit_renewable_model(samples));
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct PlanOptions {
  std::string env_file;
  std::string planner = "aco";
  std::string start;
  std::string target;
  std::uint64_t seed = 0;
  std::string config_file;
  std::string out_file;
};

int cmd_plan(const PlanOptions& o) {
  const GridEnvironment env = load_environment(o.env_file);
  const GridPos start = parse_grid_pos(o.start);
  const GridPos target = parse_grid_pos(o.target);
  if (!is_valid(env, start)) throw ValidationError("start: cell is out of bounds or inside an obstacle");
  if (!is_valid(env, target)) throw ValidationError("target: cell is out of bounds or inside an obstacle");

  // Reuse the scenario parser so planner options share one schema.
  Json doc{{"environment", {{"file", o.env_file}}},
           {"start", {start.col, start.row}},
           {"target", {target.col, target.row}},
           {"planners", Json::array({Json{{"name", o.planner}}})},
           {"seeds", {o.seed}}};
  if (!o.config_file.empty()) {
    const Json extra = read_json_file(o.config_file);
    for (const auto& [key, value] : extra.items()) {
      if (key == "planner") {
        Json p = value;
        p["name"] = o.planner;
        doc["planners"] = Json::array({p});
      } else if (key == "horizon" || key == "mpc") {
        doc[key] = value;
      } else {
        throw ValidationError("config." + key + ": unknown key (expected planner, horizon, mpc)");
      }
    }
  }
  const ScenarioSpec spec = scenario_from_json(doc);
  Json resolved = to_json(spec);
  resolved.erase("dispatch");
  resolved.erase("timing");
  resolved.erase("plots");
  resolved.erase("energy_model");
  print_config(resolved);

  PlanResult r = run_planner(spec.planners.front(), env, start, target, spec.horizon, spec.mpc, o.seed);
  Json out = to_json(r);
  const bool arrived = !r.path.empty() && r.path.back() == target;
  const double energy = arrived ? evaluate_fixed_path(env, r.path) : kInf;
  out["reported_energy_kWh"] = std::isfinite(energy) ? Json(energy) : Json("inf");
  std::cout << out.dump(2) << "\n";
  if (!o.out_file.empty()) {
    std::ofstream f(o.out_file);
    if (!f) throw IoError("cannot write " + o.out_file);
    write_path_csv(f, r.path, r.planner + " energy_kWh=" + format_number(energy));
  }
  return 0;
}

int cmd_dispatch(const std::string& problem_file, const std::string& out_file) {
  const std::filesystem::path path = problem_file;
  const DispatchProblem problem = dispatch_problem_from_json(read_json_file(path), path.parent_path());
  print_config(to_json(problem));
  const DispatchSchedule schedule = solve_dispatch(problem);
  const std::string text = to_json(schedule).dump(2) + "\n";
  std::cout << text;
  if (!out_file.empty()) write_text_file(out_file, text);
  return 0;
}

int cmd_bench(const std::string& scenario_file, const std::string& out_dir, int jobs) {
  const std::filesystem::path path = scenario_file;
  const ScenarioSpec spec = scenario_from_json(read_json_file(path), path.parent_path());
  print_config(to_json(spec));
  const ScenarioOutcome outcome = run_scenario(spec, jobs);
  write_scenario_outputs(spec, outcome, out_dir);
  std::cout << emit_table(outcome.report);
  return 0;
}

int cmd_plot(const std::string& env_file, const std::vector<std::string>& path_files, const std::string& out_file,
             const std::string& title) {
  const GridEnvironment env = load_environment(env_file);
  print_config({{"env", env_file}, {"paths", path_files}, {"out", out_file}, {"title", title}});
  std::vector<PlotPath> paths;
  for (const auto& file : path_files) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    PlotPath p;
    p.name = std::filesystem::path(file).stem().string();
    p.positions = read_path_csv(in);
    p.cost = evaluate_fixed_path(env, p.positions);
    paths.push_back(std::move(p));
  }
  write_text_file(out_file, emit_plot(env, paths, title));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware grid path planning and battery dispatch"};
  app.require_subcommand(1);
  std::string spec_file, out_file, samples_file, basis = "energy", problem_file, scenario_file, out_dir, title;
  std::vector<std::string> path_files;
  int jobs = 1;
  PlanOptions plan_opts;

  auto* gen = app.add_subcommand("gen-env", "Generate an environment from a spec file");
  gen->add_option("--spec", spec_file, "Spec file (JSON)")->required();
  gen->add_option("--out", out_file, "Output environment file")->required();

  auto* fit = app.add_subcommand("fit", "Least-squares fit of an energy or renewable model");
  fit->add_option("--samples", samples_file, "Sample file: feature wind response per line")->required();
  fit->add_option("--basis", basis, "energy or renewable")->check(CLI::IsMember({"energy", "renewable"}));

  auto* plan = app.add_subcommand("plan", "Plan one path");
  plan->add_option("--env", plan_opts.env_file, "Environment file")->required();
  plan->add_option("--planner", plan_opts.planner, "Planner name");
  plan->add_option("--start", plan_opts.start, "Start cell col,row")->required();
  plan->add_option("--target", plan_opts.target, "Target cell col,row")->required();
  plan->add_option("--seed", plan_opts.seed, "Seed");
  plan->add_option("--config", plan_opts.config_file, "JSON with optional planner, horizon, mpc blocks");
  plan->add_option("--out", plan_opts.out_file, "Write the path as CSV");

  auto* dispatch = app.add_subcommand("dispatch", "Solve a battery dispatch problem");
  dispatch->add_option("--problem", problem_file, "Problem file (JSON)")->required();
  dispatch->add_option("--out", out_file, "Write the schedule as JSON");

  auto* bench = app.add_subcommand("bench", "Run a multi-planner scenario");
  bench->add_option("--scenario", scenario_file, "Scenario file (JSON)")->required();
  bench->add_option("--out-dir", out_dir, "Output directory")->required();
  bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plot", "Render paths over an environment as SVG");
  plot->add_option("--env", spec_file, "Environment file")->required();
  plot->add_option("--paths", path_files, "Path CSV files")->required();
  plot->add_option("--out", out_file, "Output SVG")->required();
  plot->add_option("--title", title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen_env(spec_file, out_file);
    if (*fit) return cmd_fit(samples_file, basis);
    if (*plan) return cmd_plan(plan_opts);
    if (*dispatch) return cmd_dispatch(problem_file, out_file);
    if (*bench) return cmd_bench(scenario_file, out_dir, jobs);
    if (*plot) return cmd_plot(spec_file, path_files, out_file, title);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
