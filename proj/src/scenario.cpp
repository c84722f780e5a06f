#include "acompc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "acompc/error.hpp"
#include "acompc/rng.hpp"

namespace acompc {

namespace {

bool is_fixed_baseline(const std::string& name) { return name == "direct" || name == "wind-first" || name == "50-50"; }

template <typename F>
auto with_context(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

void reject_unknown(const Json& doc, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!doc.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : doc.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw ValidationError((where.empty() ? key : where + "." + key) + ": unknown key");
}

GridPos pos_from_json(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ValidationError(where + ": expected [col, row]");
  return {v[0].get<int>(), v[1].get<int>()};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p = file;
  return p.is_relative() ? base / p : p;
}

Eigen::VectorXd vector_from_json(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ValidationError(where + "[" + std::to_string(i) + "]: expected a number");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

PlannerSpec planner_from_json(const Json& doc, const std::string& where) {
  PlannerSpec p;
  if (doc.is_string()) {
    p.name = doc.get<std::string>();
  } else {
    reject_unknown(doc, {"name", "label", "horizon", "aco", "meta", "aco_rounds", "enumeration_cap", "amplitude"},
                   where);
    if (!doc.contains("name") || !doc.at("name").is_string()) throw ValidationError(where + ".name: required string");
    p.name = doc.at("name").get<std::string>();
  }
  const auto& names = planner_names();
  if (std::find(names.begin(), names.end(), p.name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ValidationError(where + ".name: unknown planner '" + p.name + "'; valid names: " + list);
  }
  if (p.name == "woa-aco") p.aco.ants = 10;
  p.label = p.name;
  if (doc.is_object()) {
    if (doc.contains("label")) {
      if (!doc.at("label").is_string()) throw ValidationError(where + ".label: expected a string");
      p.label = doc.at("label").get<std::string>();
    }
    if (doc.contains("horizon")) {
      if (!doc.at("horizon").is_number_integer() || doc.at("horizon").get<int>() < 1)
        throw ValidationError(where + ".horizon: expected an integer >= 1");
      p.horizon = doc.at("horizon").get<int>();
    }
    if (doc.contains("aco")) p.aco = with_context(where, [&] { return aco_params_from_json(doc.at("aco"), p.aco); });
    if (doc.contains("meta"))
      p.meta = with_context(where, [&] { return meta_params_from_json(doc.at("meta"), p.meta); });
    if (doc.contains("aco_rounds")) {
      if (!doc.at("aco_rounds").is_number_integer() || doc.at("aco_rounds").get<int>() < 0)
        throw ValidationError(where + ".aco_rounds: expected an integer >= 0");
      p.aco_rounds = doc.at("aco_rounds").get<int>();
    }
    if (doc.contains("enumeration_cap")) {
      const Json& cap = doc.at("enumeration_cap");
      if (!cap.is_number_integer() || cap.get<std::int64_t>() < 1)
        throw ValidationError(where + ".enumeration_cap: expected a positive integer");
      p.enumeration_cap = doc.at("enumeration_cap").get<std::uint64_t>();
    }
    if (doc.contains("amplitude")) {
      if (!doc.at("amplitude").is_number() || doc.at("amplitude").get<double>() < 0.0)
        throw ValidationError(where + ".amplitude: expected a number >= 0");
      p.amplitude = doc.at("amplitude").get<double>();
    }
  }
  return p;
}

Json planner_to_json(const PlannerSpec& p, int scenario_horizon) {
  Json j{{"name", p.name}, {"label", p.label}};
  if (is_fixed_baseline(p.name)) {
    if (p.name == "50-50") j["amplitude"] = p.amplitude < 0.0 ? Json("default") : Json(p.amplitude);
    return j;
  }
  j["horizon"] = p.horizon > 0 ? p.horizon : scenario_horizon;
  if (p.name == "aco" || p.name == "woa-aco") j["aco"] = to_json(p.aco);
  if (p.name == "ga" || p.name == "pso" || p.name == "woa" || p.name == "woa-aco") j["meta"] = to_json(p.meta);
  if (p.name == "woa-aco") j["aco_rounds"] = p.aco_rounds;
  if (p.name == "exhaustive") j["enumeration_cap"] = p.enumeration_cap;
  return j;
}

}  // namespace

const std::vector<std::string>& planner_names() {
  static const std::vector<std::string> names{"direct", "wind-first", "50-50", "aco",
                                              "exhaustive", "ga", "pso", "woa", "woa-aco"};
  return names;
}

EnvSpec benchmark_env_spec(const BenchmarkLayout& layout, std::uint64_t seed) {
  if (layout.variant != "corner" && layout.variant != "center")
    throw ValidationError("benchmark.variant: expected \"corner\" or \"center\"");
  if (layout.size < 20) throw ValidationError("benchmark.size: must be >= 20");
  const double n = layout.size;
  const double scale = n / 50.0;

  EnvSpec spec;
  spec.n_x = layout.size;
  spec.n_y = layout.size;
  spec.cell_size_km = layout.cell_size_km;
  spec.seed = seed;
  spec.polar = FieldSpec{0.2, {}, 6, 0.2, 1.0, 4.0 * scale, 10.0 * scale};
  spec.wind = FieldSpec{4.0, {}, 6, 1.0, 5.0, 5.0 * scale, 12.0 * scale};

  Rng rng(derive_seed(seed, {0x626e6368}));
  const int jitter = std::max(1, static_cast<int>(std::lround(0.04 * n)));
  auto square = [&](double cx, double cy) {
    const int half = static_cast<int>(std::lround((0.06 + 0.02 * rng.uniform()) * n));  // side 0.12n..0.16n
    const int col = static_cast<int>(std::lround(cx * n)) + static_cast<int>(rng.below(2 * jitter + 1)) - jitter;
    const int row = static_cast<int>(std::lround(cy * n)) + static_cast<int>(rng.below(2 * jitter + 1)) - jitter;
    spec.obstacles.push_back({std::max(1, col - half), std::max(1, row - half), std::min(layout.size - 2, col + half),
                              std::min(layout.size - 2, row + half)});
  };
  if (layout.variant == "corner") {
    square(0.36, 0.36);
    square(0.64, 0.64);
  } else {
    square(0.30, 0.30);
    square(0.70, 0.70);
  }
  return spec;
}

std::pair<GridPos, GridPos> benchmark_endpoints(const BenchmarkLayout& layout) {
  if (layout.variant == "center") return {{0, 0}, {layout.size / 2, layout.size / 2}};
  return {{0, 0}, {layout.size - 1, layout.size - 1}};
}

ScenarioSpec scenario_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  reject_unknown(doc,
                 {"environment", "energy_model", "start", "target", "horizon", "mpc", "planners", "seeds", "dispatch",
                  "timing", "plots"},
                 "");
  ScenarioSpec s;
  s.energy_model = kBenchmarkEnergyModel;

  if (!doc.contains("environment")) throw ValidationError("environment: required");
  {
    const Json& e = doc.at("environment");
    reject_unknown(e, {"spec", "file", "benchmark", "reseed"}, "environment");
    const int sources = int(e.contains("spec")) + int(e.contains("file")) + int(e.contains("benchmark"));
    if (sources != 1) throw ValidationError("environment: give exactly one of spec, file, benchmark");
    if (e.contains("spec")) s.environment.spec = env_spec_from_json(e.at("spec"));
    if (e.contains("file")) {
      if (!e.at("file").is_string()) throw ValidationError("environment.file: expected a string");
      s.environment.file = resolve(base_dir, e.at("file").get<std::string>());
    }
    if (e.contains("benchmark")) {
      const Json& b = e.at("benchmark");
      reject_unknown(b, {"variant", "size", "cell_size_km"}, "environment.benchmark");
      BenchmarkLayout layout;
      if (b.contains("variant")) layout.variant = b.at("variant").get<std::string>();
      if (b.contains("size")) layout.size = b.at("size").get<int>();
      if (b.contains("cell_size_km")) layout.cell_size_km = b.at("cell_size_km").get<double>();
      benchmark_env_spec(layout, 0);  // validates
      s.environment.benchmark = layout;
    }
    if (e.contains("reseed")) {
      if (!e.at("reseed").is_boolean()) throw ValidationError("environment.reseed: expected true or false");
      s.environment.reseed = e.at("reseed").get<bool>();
    }
  }

  bool explicit_model = false;
  if (doc.contains("energy_model")) {
    const Json& m = doc.at("energy_model");
    reject_unknown(m, {"coefficients", "samples", "cost_floor"}, "energy_model");
    if (m.contains("coefficients") == m.contains("samples"))
      throw ValidationError("energy_model: give exactly one of coefficients, samples");
    if (m.contains("coefficients")) s.energy_model = energy_coefficients_from_json(m.at("coefficients"));
    if (m.contains("samples")) s.energy_samples = resolve(base_dir, m.at("samples").get<std::string>());
    if (m.contains("cost_floor")) {
      if (!m.at("cost_floor").is_number() || m.at("cost_floor").get<double>() < 0.0)
        throw ValidationError("energy_model.cost_floor: expected a number >= 0");
      s.cost_floor = m.at("cost_floor").get<double>();
    }
    explicit_model = true;
  }
  if (s.environment.file && !explicit_model) s.energy_model = {};  // keep the file's own cost map

  if (doc.contains("start")) s.start = pos_from_json(doc.at("start"), "start");
  if (doc.contains("target")) s.target = pos_from_json(doc.at("target"), "target");
  if (!s.environment.benchmark && (!s.start || !s.target))
    throw ValidationError("start/target: required unless environment.benchmark supplies them");

  if (doc.contains("horizon")) s.horizon = horizon_cost_from_json(doc.at("horizon"));
  if (doc.contains("mpc")) s.mpc = mpc_params_from_json(doc.at("mpc"));

  if (!doc.contains("planners") || !doc.at("planners").is_array() || doc.at("planners").empty())
    throw ValidationError("planners: need a nonempty array");
  for (std::size_t i = 0; i < doc.at("planners").size(); ++i)
    s.planners.push_back(planner_from_json(doc.at("planners")[i], "planners[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < s.planners.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (s.planners[i].label == s.planners[j].label)
        throw ValidationError("planners[" + std::to_string(i) + "].label: duplicate label '" + s.planners[i].label +
                              "'");
  for (std::size_t i = 0; i < s.planners.size(); ++i) {
    const auto& p = s.planners[i];
    if (is_fixed_baseline(p.name)) continue;
    const int h = p.horizon > 0 ? p.horizon : s.horizon.horizon;
    if (!s.horizon.stage_weights.empty() && static_cast<int>(s.horizon.stage_weights.size()) != h)
      throw ValidationError("planners[" + std::to_string(i) + "].horizon: differs from horizon.stage_weights length");
    with_context("planners[" + std::to_string(i) + "]", [&] {
      validate(s.mpc, h);
      validate(p.meta, h);
      return 0;
    });
  }

  if (!doc.contains("seeds") || !doc.at("seeds").is_array() || doc.at("seeds").empty())
    throw ValidationError("seeds: need a nonempty array");
  for (std::size_t i = 0; i < doc.at("seeds").size(); ++i) {
    const Json& v = doc.at("seeds")[i];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ValidationError("seeds[" + std::to_string(i) + "]: expected an unsigned integer");
    s.seeds.push_back(v.get<std::uint64_t>());
  }

  if (doc.contains("dispatch")) {
    const Json& d = doc.at("dispatch");
    reject_unknown(d, {"planner", "cruise_speed_kmh", "horizon", "irradiance", "wind", "renewable_model", "battery",
                       "weights"},
                   "dispatch");
    DispatchBlock b;
    b.planner = s.planners.front().label;
    if (d.contains("planner")) b.planner = d.at("planner").get<std::string>();
    if (std::none_of(s.planners.begin(), s.planners.end(), [&](const PlannerSpec& p) { return p.label == b.planner; }))
      throw ValidationError("dispatch.planner: no planner labelled '" + b.planner + "'");
    if (d.contains("cruise_speed_kmh")) b.cruise_speed_kmh = d.at("cruise_speed_kmh").get<double>();
    if (!(b.cruise_speed_kmh > 0.0)) throw ValidationError("dispatch.cruise_speed_kmh: must be > 0");
    if (d.contains("horizon")) b.horizon = d.at("horizon").get<int>();
    if (b.horizon < 1) throw ValidationError("dispatch.horizon: must be >= 1");
    if (d.contains("irradiance")) b.irradiance = vector_from_json(d.at("irradiance"), "dispatch.irradiance");
    if (d.contains("wind")) b.wind = vector_from_json(d.at("wind"), "dispatch.wind");
    for (const auto* series : {&b.irradiance, &b.wind})
      if (series->size() != 0 && series->size() != b.horizon)
        throw ValidationError("dispatch: irradiance/wind series must have `horizon` entries");
    if (d.contains("renewable_model"))
      b.renewable = with_context("dispatch", [&] { return renewable_coefficients_from_json(d.at("renewable_model")); });
    if (d.contains("battery")) b.battery = with_context("dispatch", [&] { return battery_from_json(d.at("battery")); });
    if (d.contains("weights")) {
      const Json& w = d.at("weights");
      reject_unknown(w, {"battery", "backup"}, "dispatch.weights");
      if (w.contains("battery")) b.weights.battery = w.at("battery").get<double>();
      if (w.contains("backup")) b.weights.backup = w.at("backup").get<double>();
      if (!(b.weights.battery >= 0.0 && b.weights.backup >= 0.0))
        throw ValidationError("dispatch.weights: must be >= 0");
    }
    s.dispatch = b;
  }

  if (doc.contains("timing")) s.timing = doc.at("timing").get<bool>();
  if (doc.contains("plots")) s.plots = doc.at("plots").get<bool>();
  return s;
}

Json to_json(const ScenarioSpec& s) {
  Json env;
  if (s.environment.spec) env["spec"] = to_json(*s.environment.spec);
  if (s.environment.file) env["file"] = s.environment.file->string();
  if (s.environment.benchmark)
    env["benchmark"] = {{"variant", s.environment.benchmark->variant},
                        {"size", s.environment.benchmark->size},
                        {"cell_size_km", s.environment.benchmark->cell_size_km}};
  env["reseed"] = s.environment.reseed;

  Json out;
  out["environment"] = env;
  Json model{{"cost_floor", s.cost_floor}};
  if (s.energy_samples)
    model["samples"] = s.energy_samples->string();
  else
    model["coefficients"] = to_json(s.energy_model);
  out["energy_model"] = model;
  if (s.start) out["start"] = {s.start->col, s.start->row};
  if (s.target) out["target"] = {s.target->col, s.target->row};
  out["horizon"] = to_json(s.horizon);
  out["mpc"] = to_json(s.mpc);
  Json planners = Json::array();
  for (const auto& p : s.planners) planners.push_back(planner_to_json(p, s.horizon.horizon));
  out["planners"] = planners;
  out["seeds"] = s.seeds;
  if (s.dispatch) {
    const auto& d = *s.dispatch;
    out["dispatch"] = {{"planner", d.planner},
                       {"cruise_speed_kmh", d.cruise_speed_kmh},
                       {"horizon", d.horizon},
                       {"irradiance", vector_to_json(d.irradiance)},
                       {"wind", vector_to_json(d.wind)},
                       {"renewable_model", to_json(d.renewable)},
                       {"battery", to_json(d.battery)},
                       {"weights", {{"battery", d.weights.battery}, {"backup", d.weights.backup}}}};
  }
  out["timing"] = s.timing;
  out["plots"] = s.plots;
  return out;
}

HorizonOptimizer make_optimizer(const PlannerSpec& spec, int horizon) {
  if (spec.name == "aco")
    return [p = spec.aco](const HorizonProblem& problem, std::uint64_t seed) mutable {
      p.seed = seed;
      return aco_solve(problem, p);
    };
  if (spec.name == "exhaustive")
    return [cap = spec.enumeration_cap](const HorizonProblem& problem, std::uint64_t) {
      return exhaustive_horizon_search(problem, cap);
    };
  auto meta_call = [&spec](auto fn) -> HorizonOptimizer {
    return [p = spec.meta, fn](const HorizonProblem& problem, std::uint64_t seed) mutable {
      p.seed = seed;
      return fn(problem, p);
    };
  };
  if (spec.name == "ga") return meta_call(ga_horizon_search);
  if (spec.name == "pso") return meta_call(pso_horizon_search);
  if (spec.name == "woa") return meta_call(woa_horizon_search);
  if (spec.name == "woa-aco")
    return [p = spec.meta, a = spec.aco, rounds = spec.aco_rounds](const HorizonProblem& problem,
                                                                   std::uint64_t seed) mutable {
      p.seed = seed;
      return woa_aco_horizon_search(problem, p, a, rounds);
    };
  (void)horizon;
  throw ValidationError("no horizon optimizer named '" + spec.name + "'");
}

PlanResult run_planner(const PlannerSpec& spec, const GridEnvironment& env, GridPos start, GridPos target,
                       const HorizonCost& horizon, const MpcParams& mpc, std::uint64_t seed) {
  PlanResult r;
  if (spec.name == "direct") {
    r = fixed_plan(env, direct_path(start, target), target, spec.label);
  } else if (spec.name == "wind-first") {
    r = fixed_plan(env, wind_first_path(start, target), target, spec.label);
  } else if (spec.name == "50-50") {
    const double amp = spec.amplitude < 0.0 ? default_5050_amplitude(start, target) : spec.amplitude;
    r = fixed_plan(env, combined_5050_path(start, target, amp), target, spec.label);
  } else {
    HorizonCost cost = horizon;
    if (spec.horizon > 0) cost.horizon = spec.horizon;
    r = plan(env, start, target, cost, make_optimizer(spec, cost.horizon), mpc, seed, spec.label);
  }
  r.seed = seed;
  return r;
}

ScenarioOutcome run_scenario(const ScenarioSpec& spec, int jobs) {
  EnergyModelCoefficients model = spec.energy_model;
  if (spec.energy_samples) model = fit_energy_model(read_samples_file(spec.energy_samples->string())).coefficients;
  const bool apply_model = !(spec.environment.file && model == EnergyModelCoefficients{});

  ScenarioOutcome outcome;
  for (std::uint64_t seed : spec.seeds) {
    GridEnvironment env = [&] {
      if (spec.environment.file) return load_environment(*spec.environment.file);
      if (spec.environment.benchmark) return generate_environment(benchmark_env_spec(*spec.environment.benchmark, seed));
      EnvSpec es = *spec.environment.spec;
      if (spec.environment.reseed) es.seed = seed;
      return generate_environment(es);
    }();
    if (apply_model) env = apply_cost_model(env, model, spec.cost_floor);
    GridPos start;
    GridPos target;
    if (spec.environment.benchmark) std::tie(start, target) = benchmark_endpoints(*spec.environment.benchmark);
    if (spec.start) start = *spec.start;
    if (spec.target) target = *spec.target;
    if (!is_valid(env, start)) throw ValidationError("start: cell is out of bounds or inside an obstacle");
    if (!is_valid(env, target)) throw ValidationError("target: cell is out of bounds or inside an obstacle");
    outcome.runs.push_back(SeedRun{seed, std::move(env), start, target, {}, std::nullopt});
    outcome.runs.back().plans.resize(spec.planners.size());
  }

  const std::size_t tasks = spec.seeds.size() * spec.planners.size();
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks);
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks; k = next++) {
      const std::size_t si = k / spec.planners.size();
      const std::size_t pi = k % spec.planners.size();
      SeedRun& run = outcome.runs[si];
      try {
        run.plans[pi] = run_planner(spec.planners[pi], run.env, run.start, run.target, spec.horizon, spec.mpc, run.seed);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(tasks, 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  BenchReport& report = outcome.report;
  report.timing = spec.timing;
  std::vector<std::string> labels;
  for (const auto& p : spec.planners) labels.push_back(p.label);
  for (std::size_t pi = 0; pi < spec.planners.size(); ++pi)
    for (const auto& run : outcome.runs) {
      const PlanResult& r = run.plans[pi];
      BenchRow row;
      row.planner = spec.planners[pi].label;
      row.seed = run.seed;
      const bool arrived = !r.path.empty() && r.path.back() == run.target;
      row.energy = arrived ? evaluate_fixed_path(run.env, r.path) : kInf;
      row.steps = r.steps;
      row.status = r.terminated;
      row.wall_ms = r.wall_ms;
      report.rows.push_back(row);
    }
  for (const auto& run : outcome.runs) report.environment_digests.push_back(environment_digest(run.env));
  report.summaries = summarize(report.rows, labels);

  if (spec.dispatch) {
    const DispatchBlock& d = *spec.dispatch;
    const auto pi = static_cast<std::size_t>(
        std::find(labels.begin(), labels.end(), d.planner) - labels.begin());
    for (auto& run : outcome.runs) {
      const PlanResult& r = run.plans[pi];
      if (!std::isfinite(r.total_energy)) continue;
      const Eigen::VectorXd load = demand_from_path(r, d.cruise_speed_kmh, d.battery.dt);
      const Eigen::Index n = std::max<Eigen::Index>(d.horizon, load.size());
      DispatchProblem problem;
      problem.demand = Eigen::VectorXd::Zero(n);
      problem.demand.head(load.size()) = load;
      Eigen::VectorXd irr = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd wind = Eigen::VectorXd::Constant(n, 8.0);
      if (d.irradiance.size()) irr.head(d.irradiance.size()) = d.irradiance;
      if (d.wind.size()) wind.head(d.wind.size()) = d.wind;
      problem.renewable = renewable_series(irr, wind, d.renewable);
      problem.weights = d.weights;
      problem.battery = d.battery;
      problem.path_energy = r.total_energy;
      run.dispatch = solve_dispatch(problem);
    }
  }
  return outcome;
}

}  // namespace acompc
