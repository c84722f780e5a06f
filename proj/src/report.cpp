#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "acompc/error.hpp"
#include "acompc/harness.hpp"

namespace acompc {

double median_of(std::vector<double> values) {
  if (values.empty()) return kInf;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  const double a = values[n / 2 - 1];
  const double b = values[n / 2];
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) ? a : b;
  return 0.5 * (a + b);
}

std::vector<PlannerSummary> summarize(const std::vector<BenchRow>& rows, const std::vector<std::string>& planners) {
  std::vector<PlannerSummary> out;
  for (const auto& name : planners) {
    PlannerSummary s;
    s.planner = name;
    std::vector<double> energies;
    for (const auto& r : rows) {
      if (r.planner != name) continue;
      energies.push_back(r.energy);
      ++s.runs;
      if (std::isfinite(r.energy)) ++s.feasible;
    }
    if (!energies.empty()) {
      s.median = median_of(energies);
      s.min = *std::min_element(energies.begin(), energies.end());
      s.max = *std::max_element(energies.begin(), energies.end());
    }
    out.push_back(s);
  }
  return out;
}

std::string emit_table(const BenchReport& report) {
  std::ostringstream out;
  out << "planner,seed,energy_kWh,steps,status,wall_ms\n";
  for (const auto& r : report.rows)
    out << r.planner << ',' << r.seed << ',' << format_number(r.energy) << ',' << r.steps << ','
        << to_string(r.status) << ',' << (report.timing ? format_fixed(r.wall_ms, 3) : std::string("na")) << '\n';
  for (const auto& s : report.summaries)
    out << s.planner << ",summary," << format_number(s.median) << ",,feasible=" << s.feasible << '/' << s.runs
        << " min=" << format_number(s.min) << " max=" << format_number(s.max) << ",na\n";
  return out.str();
}

namespace {

std::string hex_color(double t) {
  // Light-yellow (low cost) to dark-red (high cost).
  static constexpr std::array<std::array<double, 3>, 3> stops{{{255, 247, 188}, {254, 153, 41}, {153, 52, 4}}};
  t = std::clamp(t, 0.0, 1.0);
  const double x = t * 2.0;
  const int i = std::min(1, static_cast<int>(x));
  const double f = x - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 9> kPalette{"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#17becf",
                                              "#e377c2", "#7f7f7f", "#bcbd22", "#000080"};

}  // namespace

std::string emit_plot(const GridEnvironment& env, const std::vector<PlotPath>& paths, const std::string& title) {
  const int px = std::max(4, 600 / std::max(env.n_x(), env.n_y()));
  const int width = env.n_x() * px;
  const int height = env.n_y() * px;
  const int top = 24;
  const int legend_w = 220;

  double lo = kInf;
  double hi = -kInf;
  for (int r = 0; r < env.n_y(); ++r)
    for (int c = 0; c < env.n_x(); ++c)
      if (!env.is_obstacle({c, r})) {
        lo = std::min(lo, env.cost()(r, c));
        hi = std::max(hi, env.cost()(r, c));
      }
  const double span = hi > lo ? hi - lo : 1.0;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + legend_w << "\" height=\"" << height + top
      << "\" viewBox=\"0 0 " << width + legend_w << ' ' << height + top << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"4\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(title) << "</text>\n";
  out << "<g transform=\"translate(0," << top << ")\" shape-rendering=\"crispEdges\">\n";
  for (int r = 0; r < env.n_y(); ++r)
    for (int c = 0; c < env.n_x(); ++c) {
      const bool blocked = env.is_obstacle({c, r});
      out << "<rect x=\"" << c * px << "\" y=\"" << r * px << "\" width=\"" << px << "\" height=\"" << px
          << "\" fill=\"" << (blocked ? std::string("#303030") : hex_color((env.cost()(r, c) - lo) / span))
          << "\"/>\n";
    }
  out << "</g>\n<g transform=\"translate(0," << top << ")\" fill=\"none\" stroke-width=\"2\">\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    out << "<polyline stroke=\"" << kPalette[i % kPalette.size()] << "\" points=\"";
    for (std::size_t k = 0; k < paths[i].positions.size(); ++k) {
      const GridPos p = paths[i].positions[k];
      out << (k ? " " : "") << format_number((p.col + 0.5) * px) << ',' << format_number((p.row + 0.5) * px);
    }
    out << "\"/>\n";
  }
  out << "</g>\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const int y = top + 16 + static_cast<int>(i) * 18;
    const std::string cost = std::isfinite(paths[i].cost) ? format_fixed(paths[i].cost, 3) : std::string("inf");
    out << "<line x1=\"" << width + 10 << "\" y1=\"" << y - 4 << "\" x2=\"" << width + 30 << "\" y2=\"" << y - 4
        << "\" stroke=\"" << kPalette[i % kPalette.size()] << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << width + 36 << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(paths[i].name) << ": " << cost << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_scenario_outputs(const ScenarioSpec& spec, const ScenarioOutcome& outcome,
                            const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const BenchReport& report = outcome.report;
  write_text_file(out_dir / "results.csv", emit_table(report));

  Json summaries = Json::array();
  for (const auto& s : report.summaries)
    summaries.push_back({{"planner", s.planner},
                         {"median_kWh", std::isfinite(s.median) ? Json(s.median) : Json("inf")},
                         {"min_kWh", std::isfinite(s.min) ? Json(s.min) : Json("inf")},
                         {"max_kWh", std::isfinite(s.max) ? Json(s.max) : Json("inf")},
                         {"feasible", s.feasible},
                         {"runs", s.runs}});
  Json runs = Json::array();
  for (std::size_t si = 0; si < outcome.runs.size(); ++si) {
    const SeedRun& run = outcome.runs[si];
    Json plans = Json::array();
    for (std::size_t pi = 0; pi < run.plans.size(); ++pi) {
      Json p = to_json(run.plans[pi]);
      if (!report.timing) p.erase("wall_ms");
      const double e = report.rows[pi * outcome.runs.size() + si].energy;
      p["reported_energy_kWh"] = std::isfinite(e) ? Json(e) : Json("inf");
      plans.push_back(p);
    }
    runs.push_back({{"seed", run.seed},
                    {"environment_digest", report.environment_digests[si]},
                    {"start", {run.start.col, run.start.row}},
                    {"target", {run.target.col, run.target.row}},
                    {"plans", plans}});
  }
  write_text_file(out_dir / "report.json",
                  Json{{"summaries", summaries}, {"runs", runs}}.dump(2) + "\n");
  write_text_file(out_dir / "resolved_config.json", to_json(spec).dump(2) + "\n");

  for (std::size_t si = 0; si < outcome.runs.size(); ++si) {
    const SeedRun& run = outcome.runs[si];
    const std::string tag = std::to_string(run.seed);
    if (spec.plots) {
      std::vector<PlotPath> paths;
      for (std::size_t pi = 0; pi < run.plans.size(); ++pi)
        paths.push_back({spec.planners[pi].label, run.plans[pi].path,
                         report.rows[pi * outcome.runs.size() + si].energy});
      write_text_file(out_dir / ("plot_seed" + tag + ".svg"), emit_plot(run.env, paths, "seed " + tag));
    }
    if (run.dispatch) write_text_file(out_dir / ("dispatch_seed" + tag + ".json"), to_json(*run.dispatch).dump(2) + "\n");
  }
}

}  // namespace acompc
