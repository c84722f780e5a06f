#include "acompc/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "acompc/error.hpp"

namespace acompc {

namespace {

// Typed access to a JSON object that remembers which keys were consumed so
// that leftovers can be rejected with their full field path.
class ObjectReader {
public:
  ObjectReader(const Json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ValidationError(where() + ": expected an object");
  }

  bool has(const char* key) const { return doc_.contains(key); }

  const Json& raw(const char* key) {
    seen_.insert(key);
    return doc_.at(key);
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const char* key, double& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_number()) throw ValidationError(field(key) + ": expected a number");
    out = v.get<double>();
  }

  void integer(const char* key, int& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_number_integer()) throw ValidationError(field(key) + ": expected an integer");
    out = v.get<int>();
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ValidationError(field(key) + ": expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(const char* key, bool& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_boolean()) throw ValidationError(field(key) + ": expected true or false");
    out = v.get<bool>();
  }

  void string(const char* key, std::string& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_string()) throw ValidationError(field(key) + ": expected a string");
    out = v.get<std::string>();
  }

  void numbers(const char* key, std::vector<double>& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_array()) throw ValidationError(field(key) + ": expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ValidationError(field(key) + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(v[i].get<double>());
    }
  }

  void vector(const char* key, Eigen::VectorXd& out) {
    if (!has(key)) return;
    std::vector<double> values;
    numbers(key, values);
    out = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items())
      if (!seen_.count(key)) throw ValidationError(field(key.c_str()) + ": unknown key");
  }

private:
  std::string where() const { return path_.empty() ? "document" : path_; }

  const Json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Json vector_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number_json(v(i)));
  return arr;
}

template <typename M>
Json map_json(const M& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if constexpr (std::is_same_v<typename M::Scalar, std::uint8_t>)
        row.push_back(int{m(r, c)});
      else
        row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Field read_map(const Json& doc, const char* name, int n_x, int n_y) {
  if (!doc.contains(name)) throw ParseError(std::string("environment: missing field ") + name);
  const Json& rows = doc.at(name);
  if (!rows.is_array()) throw ParseError(std::string("environment: ") + name + " must be an array of rows");
  if (static_cast<int>(rows.size()) != n_y)
    throw ParseError(std::string("environment: ") + name + " has " + std::to_string(rows.size()) +
                     " rows, declared n_y = " + std::to_string(n_y));
  Field f(n_y, n_x);
  for (int r = 0; r < n_y; ++r) {
    const Json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n_x)
      throw ParseError(std::string("environment: ") + name + " row " + std::to_string(r) + " has " +
                       (row.is_array() ? std::to_string(row.size()) : std::string("no")) +
                       " entries, declared n_x = " + std::to_string(n_x));
    for (int c = 0; c < n_x; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number())
        throw ParseError(std::string("environment: ") + name + " row " + std::to_string(r) + ", col " +
                         std::to_string(c) + " is not a number");
      f(r, c) = v.get<double>();
    }
  }
  return f;
}

GaussianBump bump_from_json(const Json& doc, const std::string& path) {
  ObjectReader in(doc, path);
  GaussianBump b;
  in.number("col", b.center_col);
  in.number("row", b.center_row);
  in.number("amplitude", b.amplitude);
  in.number("width", b.width);
  in.finish();
  return b;
}

void range_from_json(ObjectReader& in, const char* key, double& lo, double& hi) {
  if (!in.has(key)) return;
  std::vector<double> r;
  in.numbers(key, r);
  if (r.size() != 2) throw ValidationError(in.field(key) + ": expected [min, max]");
  lo = r[0];
  hi = r[1];
}

FieldSpec field_spec_from_json(const Json& doc, const std::string& path) {
  ObjectReader in(doc, path);
  FieldSpec f;
  in.number("base", f.base);
  in.integer("random_count", f.random_count);
  range_from_json(in, "amplitude", f.amplitude_min, f.amplitude_max);
  range_from_json(in, "width", f.width_min, f.width_max);
  if (in.has("bumps")) {
    const Json& arr = in.raw("bumps");
    if (!arr.is_array()) throw ValidationError(in.field("bumps") + ": expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      f.bumps.push_back(bump_from_json(arr[i], in.field("bumps") + "[" + std::to_string(i) + "]"));
  }
  in.finish();
  return f;
}

Json to_json(const FieldSpec& f) {
  Json bumps = Json::array();
  for (const auto& b : f.bumps)
    bumps.push_back({{"col", b.center_col}, {"row", b.center_row}, {"amplitude", b.amplitude}, {"width", b.width}});
  return Json{{"base", f.base},
              {"random_count", f.random_count},
              {"amplitude", {f.amplitude_min, f.amplitude_max}},
              {"width", {f.width_min, f.width_max}},
              {"bumps", bumps}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int digits) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

Json environment_to_json(const GridEnvironment& env) {
  return Json{{"n_x", env.n_x()},
              {"n_y", env.n_y()},
              {"cell_size_km", env.cell_size()},
              {"polar", map_json(env.polar())},
              {"wind", map_json(env.wind())},
              {"obstacles", map_json(env.obstacles())},
              {"cost", map_json(env.cost())}};
}

GridEnvironment environment_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("environment: document must be an object");
  for (const auto& [key, value] : doc.items())
    if (key != "n_x" && key != "n_y" && key != "cell_size_km" && key != "polar" && key != "wind" &&
        key != "obstacles" && key != "cost")
      throw ParseError("environment: unknown key " + key);
  for (const char* key : {"n_x", "n_y"})
    if (!doc.contains(key) || !doc.at(key).is_number_integer())
      throw ParseError(std::string("environment: ") + key + " must be an integer");
  if (!doc.contains("cell_size_km") || !doc.at("cell_size_km").is_number())
    throw ParseError("environment: cell_size_km must be a number");
  const int n_x = doc.at("n_x").get<int>();
  const int n_y = doc.at("n_y").get<int>();
  if (n_x < 2 || n_y < 2) throw ValidationError("environment: n_x and n_y must be >= 2");

  Field polar = read_map(doc, "polar", n_x, n_y);
  Field wind = read_map(doc, "wind", n_x, n_y);
  Field cost = read_map(doc, "cost", n_x, n_y);
  const Field obstacle_values = read_map(doc, "obstacles", n_x, n_y);
  ObstacleMask obstacles(n_y, n_x);
  for (int r = 0; r < n_y; ++r)
    for (int c = 0; c < n_x; ++c) {
      const double v = obstacle_values(r, c);
      if (v != 0.0 && v != 1.0)
        throw ValidationError("environment: obstacles row " + std::to_string(r) + ", col " + std::to_string(c) +
                              " = " + format_number(v) + " must be 0 or 1");
      obstacles(r, c) = static_cast<std::uint8_t>(v);
    }
  return GridEnvironment(doc.at("cell_size_km").get<double>(), std::move(polar), std::move(wind),
                         std::move(obstacles), std::move(cost));
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void save_environment(const GridEnvironment& env, const std::filesystem::path& path) {
  write_text_file(path, environment_to_json(env).dump(1) + "\n");
}

GridEnvironment load_environment(const std::filesystem::path& path) {
  return environment_from_json(read_json_file(path));
}

Json to_json(const EnvSpec& spec) {
  Json obstacles = Json::array();
  for (const auto& o : spec.obstacles) obstacles.push_back({o.col0, o.row0, o.col1, o.row1});
  return Json{{"n_x", spec.n_x},
              {"n_y", spec.n_y},
              {"cell_size_km", spec.cell_size_km},
              {"seed", spec.seed},
              {"polar", to_json(spec.polar)},
              {"wind", to_json(spec.wind)},
              {"obstacles", obstacles}};
}

EnvSpec env_spec_from_json(const Json& doc) {
  ObjectReader in(doc, "environment.spec");
  EnvSpec s;
  in.integer("n_x", s.n_x);
  in.integer("n_y", s.n_y);
  in.number("cell_size_km", s.cell_size_km);
  in.unsigned64("seed", s.seed);
  if (in.has("polar")) s.polar = field_spec_from_json(in.raw("polar"), in.field("polar"));
  if (in.has("wind")) s.wind = field_spec_from_json(in.raw("wind"), in.field("wind"));
  if (in.has("obstacles")) {
    const Json& arr = in.raw("obstacles");
    if (!arr.is_array()) throw ValidationError(in.field("obstacles") + ": expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Json& r = arr[i];
      const std::string where = in.field("obstacles") + "[" + std::to_string(i) + "]";
      if (!r.is_array() || r.size() != 4)
        throw ValidationError(where + ": expected [col0, row0, col1, row1]");
      for (const auto& v : r)
        if (!v.is_number_integer()) throw ValidationError(where + ": expected integers");
      s.obstacles.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()});
    }
  }
  in.finish();
  validate(s);
  return s;
}

Json to_json(const EnergyModelCoefficients& c) {
  return Json{{"polar", c.polar}, {"wind", c.wind}, {"wind_cubed", c.wind_cubed}, {"intercept", c.intercept}};
}

EnergyModelCoefficients energy_coefficients_from_json(const Json& doc) {
  ObjectReader in(doc, "energy_model.coefficients");
  EnergyModelCoefficients c;
  in.number("polar", c.polar);
  in.number("wind", c.wind);
  in.number("wind_cubed", c.wind_cubed);
  in.number("intercept", c.intercept);
  in.finish();
  return c;
}

Json to_json(const RenewableModelCoefficients& c) {
  return Json{{"intercept", c.intercept}, {"irradiance", c.irradiance}, {"wind", c.wind}, {"wind_cubed", c.wind_cubed}};
}

RenewableModelCoefficients renewable_coefficients_from_json(const Json& doc) {
  ObjectReader in(doc, "renewable_model");
  RenewableModelCoefficients c;
  in.number("intercept", c.intercept);
  in.number("irradiance", c.irradiance);
  in.number("wind", c.wind);
  in.number("wind_cubed", c.wind_cubed);
  in.finish();
  return c;
}

Json to_json(const HorizonCost& c) {
  return Json{{"steps", c.horizon},
              {"stage_weights", c.stage_weights},
              {"infeasible", c.infeasible == InfeasibleCost::infinite ? "infinite" : "penalty"},
              {"penalty", c.penalty},
              {"length_weighted", c.length_weighted},
              {"terminal_weight", c.terminal_weight}};
}

HorizonCost horizon_cost_from_json(const Json& doc, HorizonCost c) {
  ObjectReader in(doc, "horizon");
  in.integer("steps", c.horizon);
  in.numbers("stage_weights", c.stage_weights);
  std::string mode = c.infeasible == InfeasibleCost::infinite ? "infinite" : "penalty";
  in.string("infeasible", mode);
  if (mode == "infinite")
    c.infeasible = InfeasibleCost::infinite;
  else if (mode == "penalty")
    c.infeasible = InfeasibleCost::penalty;
  else
    throw ValidationError("horizon.infeasible: expected \"infinite\" or \"penalty\"");
  in.number("penalty", c.penalty);
  in.boolean("length_weighted", c.length_weighted);
  in.number("terminal_weight", c.terminal_weight);
  in.finish();
  validate(c);
  return c;
}

Json to_json(const AcoParams& p) {
  return Json{{"ants", p.ants},
              {"generations", p.generations},
              {"initial_pheromone", p.initial_pheromone},
              {"evaporation", p.evaporation},
              {"epsilon", p.epsilon}};
}

AcoParams aco_params_from_json(const Json& doc, AcoParams p) {
  ObjectReader in(doc, "aco");
  in.integer("ants", p.ants);
  in.integer("generations", p.generations);
  in.number("initial_pheromone", p.initial_pheromone);
  in.number("evaporation", p.evaporation);
  in.number("epsilon", p.epsilon);
  in.finish();
  validate(p);
  return p;
}

Json to_json(const MetaheuristicParams& p) {
  return Json{{"population", p.population},      {"iterations", p.iterations},
              {"crossover_rate", p.ga.crossover_rate}, {"mutation_rate", p.ga.mutation_rate},
              {"tournament_size", p.ga.tournament_size}, {"inertia", p.pso.inertia},
              {"cognitive", p.pso.cognitive},    {"social", p.pso.social},
              {"max_velocity", p.pso.max_velocity}, {"spiral", p.woa.spiral}};
}

MetaheuristicParams meta_params_from_json(const Json& doc, MetaheuristicParams p) {
  ObjectReader in(doc, "meta");
  in.integer("population", p.population);
  in.integer("iterations", p.iterations);
  in.number("crossover_rate", p.ga.crossover_rate);
  in.number("mutation_rate", p.ga.mutation_rate);
  in.integer("tournament_size", p.ga.tournament_size);
  in.number("inertia", p.pso.inertia);
  in.number("cognitive", p.pso.cognitive);
  in.number("social", p.pso.social);
  in.number("max_velocity", p.pso.max_velocity);
  in.number("spiral", p.woa.spiral);
  in.finish();
  return p;
}

Json to_json(const MpcParams& p) {
  return Json{{"max_iterations", p.max_iterations},
              {"arrival_tolerance", p.arrival_tolerance},
              {"stall_window", p.stall_window},
              {"commit_length", p.commit_length}};
}

MpcParams mpc_params_from_json(const Json& doc, MpcParams p) {
  ObjectReader in(doc, "mpc");
  in.integer("max_iterations", p.max_iterations);
  in.number("arrival_tolerance", p.arrival_tolerance);
  in.integer("stall_window", p.stall_window);
  in.integer("commit_length", p.commit_length);
  in.finish();
  return p;
}

Json to_json(const BatteryParams& b) {
  return Json{{"capacity_kWh", b.capacity},     {"initial_soc_kWh", b.initial_soc},
              {"max_charge_kW", b.max_charge},   {"max_discharge_kW", b.max_discharge},
              {"efficiency", b.efficiency},      {"soc_min_kWh", b.soc_min},
              {"soc_max_kWh", b.soc_max},        {"dt_h", b.dt}};
}

BatteryParams battery_from_json(const Json& doc, BatteryParams b) {
  ObjectReader in(doc, "battery");
  in.number("capacity_kWh", b.capacity);
  in.number("initial_soc_kWh", b.initial_soc);
  in.number("max_charge_kW", b.max_charge);
  in.number("max_discharge_kW", b.max_discharge);
  in.number("efficiency", b.efficiency);
  in.number("soc_min_kWh", b.soc_min);
  in.number("soc_max_kWh", b.soc_max);
  in.number("dt_h", b.dt);
  in.finish();
  validate(b);
  return b;
}

Json to_json(const PlanResult& r) {
  Json path = Json::array();
  for (GridPos p : r.path) path.push_back({p.col, p.row});
  Json steps = Json::array();
  for (double c : r.per_step_costs) steps.push_back(number_json(c));
  return Json{{"planner", r.planner},
              {"seed", r.seed},
              {"status", std::string(to_string(r.terminated))},
              {"steps", r.steps},
              {"total_energy_kWh", number_json(r.total_energy)},
              {"cell_size_km", r.cell_size_km},
              {"wall_ms", r.wall_ms},
              {"per_step_costs_kWh", steps},
              {"path", path}};
}

Json to_json(const DispatchProblem& p) {
  return Json{{"renewable_kW", vector_json(p.renewable)},
              {"demand_kW", vector_json(p.demand)},
              {"weights", {{"battery", p.weights.battery}, {"backup", p.weights.backup}}},
              {"battery", to_json(p.battery)},
              {"path_energy_kWh", p.path_energy}};
}

Json to_json(const DispatchSchedule& s) {
  return Json{{"objective", s.objective},
              {"path_energy_kWh", s.path_energy},
              {"charge_kW", vector_json(s.charge)},
              {"discharge_kW", vector_json(s.discharge)},
              {"backup_kW", vector_json(s.backup)},
              {"curtail_kW", vector_json(s.curtail)},
              {"soc_kWh", vector_json(s.soc)}};
}

DispatchProblem dispatch_problem_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  ObjectReader in(doc, "");
  DispatchProblem p;
  if (in.has("battery")) p.battery = battery_from_json(in.raw("battery"));
  if (in.has("weights")) {
    ObjectReader w(in.raw("weights"), "weights");
    w.number("battery", p.weights.battery);
    w.number("backup", p.weights.backup);
    w.finish();
  }
  in.number("path_energy_kWh", p.path_energy);
  RenewableModelCoefficients model = kReferenceRenewableModel;
  if (in.has("renewable_model")) model = renewable_coefficients_from_json(in.raw("renewable_model"));

  Eigen::VectorXd irradiance;
  Eigen::VectorXd wind;
  in.vector("irradiance", irradiance);
  in.vector("wind", wind);
  in.vector("demand_kW", p.demand);
  if (in.has("forecast_file")) {
    std::string file;
    in.string("forecast_file", file);
    std::filesystem::path path = file;
    if (path.is_relative()) path = base_dir / path;
    const SampleSet rows = read_samples_file(path.string());
    const auto n = static_cast<Eigen::Index>(rows.size());
    irradiance.resize(n);
    wind.resize(n);
    p.demand.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      irradiance(t) = rows[static_cast<std::size_t>(t)].feature;
      wind(t) = rows[static_cast<std::size_t>(t)].wind;
      p.demand(t) = rows[static_cast<std::size_t>(t)].response;
    }
  }
  if (in.has("renewable_kW")) {
    in.vector("renewable_kW", p.renewable);
  } else {
    if (irradiance.size() != wind.size()) throw ValidationError("irradiance and wind differ in length");
    p.renewable = renewable_series(irradiance, wind, model);
  }
  in.finish();
  validate(p);
  return p;
}

void write_path_csv(std::ostream& out, const std::vector<GridPos>& path, const std::string& comment) {
  out << "# col,row";
  if (!comment.empty()) out << " " << comment;
  out << "\n";
  for (GridPos p : path) out << p.col << "," << p.row << "\n";
}

std::vector<GridPos> read_path_csv(std::istream& in) {
  std::vector<GridPos> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      out.push_back(parse_grid_pos(line));
    } catch (const ValidationError&) {
      throw ParseError("path: line " + std::to_string(line_no) + ": expected col,row");
    }
  }
  return out;
}

GridPos parse_grid_pos(const std::string& text) {
  std::string s = text;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream fields(s);
  GridPos p;
  std::string extra;
  if (!(fields >> p.col >> p.row) || (fields >> extra))
    throw ValidationError("expected a cell as col,row but got '" + text + "'");
  return p;
}

}  // namespace acompc
