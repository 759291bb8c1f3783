#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aqmap/dataset.hpp"
#include "aqmap/errors.hpp"
#include "aqmap/metrics.hpp"
#include "aqmap/statistics.hpp"

namespace aqmap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SyntheticField world_at(const RunConfig& config, double hours) {
  FieldConfig f = config.field;
  f.time = hours;
  return generate_field(config.grid(), config.world, config.scenario, f, config.seed);
}

// Baseline model from a simulated complete pass when no model file is given.
GpmNnModel baseline_model(const RunConfig& config, const CommandOptions& opts, std::ostream& log) {
  if (opts.model_path) return parse_model(read_text(*opts.model_path));
  const auto field = world_at(config, 0.0);
  const auto src = MeasurementSource::synthetic(field, config.sensor_error, config.seed);
  SampleSet samples;
  for (std::size_t c = 0; c < field.truth.size(); ++c) samples.push_back(src.measure(c, 0));
  log << "no --model given; fitted a baseline on a simulated complete pass (" << samples.size() << " cubes)\n";
  return fit(samples, config.plume, config.fit).first;
}

std::string map_csv(const GridSpec& grid, const std::vector<double>& values) {
  std::ostringstream os;
  os.precision(10);
  os << "cube,x,y,z,aqi\n";
  for (std::size_t c = 0; c < values.size(); ++c) {
    const Vec3 p = grid.center(c);
    os << c << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << values[c] << '\n';
  }
  return os.str();
}

std::string fit_report_text(const GpmNnModel& model, const FitReport& r, std::size_t samples) {
  std::ostringstream os;
  os.precision(10);
  os << "samples          " << samples << '\n'
     << "neurons          " << model.neurons() << '\n'
     << "activation       " << to_string(model.hidden.activation) << '\n'
     << "residual_s       " << r.residual_s << '\n'
     << "iterations       " << r.iterations << '\n'
     << "converged        " << (r.converged ? "true" : "false") << '\n'
     << "h_estimate       " << r.h_estimate << '\n'
     << "convexity_check  " << r.convexity_check << '\n'
     << "newton_fallbacks " << r.newton_fallbacks << '\n'
     << "underdetermined  " << (r.underdetermined ? "true" : "false") << '\n'
     << "rank_deficient   " << (r.rank_deficient ? "true" : "false") << '\n'
     << "c_static         " << model.c_static << '\n'
     << "noise_sigma      " << model.noise_sigma << '\n'
     << "plume_weight     " << model.plume_weight() << '\n'
     << "constant_weight  " << model.constant_weight() << '\n';
  return os.str();
}

// Session state between invocations, so an external scheduler can drive one
// cycle at a time.
json state_to_json(const SessionState& s) {
  json j = {{"cycle", s.cycle},
            {"mode", to_string(s.mode)},
            {"deviation_threshold", s.deviation_threshold},
            {"incomplete", s.incomplete},
            {"baseline_map", s.baseline_map},
            {"current_map", s.current_map}};
  j["last_complete"] = s.last_complete ? json(*s.last_complete) : json(nullptr);
  j["model"] = s.model ? model_to_json(*s.model) : json(nullptr);
  return j;
}

SessionState state_from_json(const json& j, const GridSpec& grid) {
  try {
    SessionState s = SessionState::fresh(grid, j.at("deviation_threshold").get<double>());
    s.cycle = j.at("cycle").get<std::uint64_t>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode == to_string(MonitorMode::complete)) {
      s.mode = MonitorMode::complete;
    } else if (mode == to_string(MonitorMode::selective)) {
      s.mode = MonitorMode::selective;
    } else {
      throw InputError("session state: unknown mode '" + mode + "'");
    }
    s.incomplete = j.at("incomplete").get<bool>();
    s.baseline_map = j.at("baseline_map").get<std::vector<double>>();
    s.current_map = j.at("current_map").get<std::vector<double>>();
    if (!j.at("last_complete").is_null()) s.last_complete = j.at("last_complete").get<std::uint64_t>();
    if (!j.at("model").is_null()) s.model = model_from_json(j.at("model"));
    if (!s.current_map.empty() && s.current_map.size() != grid.cube_count()) {
      throw InputError("session state was written for a different grid");
    }
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("session state: ") + e.what());
  }
}

}  // namespace

int cmd_simulate(const RunConfig& config, const CommandOptions& opts, std::ostream& log) {
  ensure_dir(config.data_dir);
  const double error = opts.noiseless ? 0.0 : config.sensor_error;
  for (std::size_t d = 0; d < opts.days; ++d) {
    const auto field = world_at(config, 24.0 * static_cast<double>(d));
    const auto src = MeasurementSource::synthetic(field, error, config.seed);
    SampleSet samples;
    for (std::size_t c = 0; c < field.truth.size(); ++c) samples.push_back(src.measure(c, d));
    char name[32];
    std::snprintf(name, sizeof name, "day_%03zu.txt", d);
    write_day_file(config.data_dir / name, day_from_samples(config.scenario, "day " + std::to_string(d), samples));
  }
  log << "wrote " << opts.days << " day(s) of " << to_string(config.scenario) << " data to " << config.data_dir.string()
      << '\n';
  return 0;
}

int cmd_fit(const RunConfig& config, const CommandOptions&, std::ostream& log) {
  const auto days = load_days(config.data_dir);
  SampleSet samples;
  for (const auto& day : days) {
    for (const auto& w : day.warnings) log << "warning: " << w << '\n';
    const auto s = day.samples(config.field.wind_mean);
    samples.insert(samples.end(), s.begin(), s.end());
  }
  auto [model, report] = fit(samples, config.plume, config.fit);
  ensure_dir(config.out);
  write_text(config.out / "model.json", serialize_model(model));
  const std::string text = fit_report_text(model, report, samples.size());
  write_text(config.out / "fit_report.txt", text);
  log << text;
  return 0;
}

int cmd_plan(const RunConfig& config, const CommandOptions& opts, std::ostream& log) {
  const GridSpec grid = config.grid();
  const GpmNnModel model = baseline_model(config, opts, log);
  const WindField wind = generate_wind(grid, config.scenario, config.field, config.seed);
  const PdtField pdt = compute_pdt(model, grid, wind, config.reduction);
  const SelectionSet sel = select_cubes(pdt, config.pdt_threshold, config.delta);
  const Trajectory traj = plan_trajectory(config.algorithm, sel, config.start_cube, config.battery, pdt, grid);
  const double consumption = trajectory_cost(traj, config.battery);

  json doc = {{"algorithm", to_string(config.algorithm)},
              {"threshold", config.pdt_threshold},
              {"delta", config.delta},
              {"start", traj.start},
              {"selected", sel.members},
              {"cubes", traj.cubes},
              {"leg_distances", traj.leg_distances},
              {"leg_costs", traj.leg_costs},
              {"total_cost", traj.total_cost},
              {"consumption", consumption},
              {"budget", config.battery.budget},
              {"truncated", traj.truncated}};
  ensure_dir(config.out);
  write_text(config.out / "trajectory.json", doc.dump(2) + "\n");
  log << "selected " << sel.members.size() << " cubes, visiting " << traj.cubes.size() << "; consumption "
      << consumption << " of one charge (budget " << config.battery.budget << ")"
      << (traj.truncated ? "; budget ran out before every selected cube was visited" : "") << '\n';
  return 0;
}

int cmd_session(const RunConfig& config, const CommandOptions& opts, std::ostream& log) {
  const GridSpec grid = config.grid();
  ensure_dir(config.out);
  const fs::path state_path = config.out / "session_state.json";
  const fs::path log_path = config.out / "session.jsonl";

  SessionState state = SessionState::fresh(grid, config.deviation_threshold);
  const bool resume = !opts.fresh && fs::exists(state_path);
  if (resume) {
    state = state_from_json(json::parse(read_text(state_path)), grid);
    log << "resuming at cycle " << state.cycle << '\n';
  }
  std::ofstream out(log_path, std::ios::binary | (resume ? std::ios::app : std::ios::trunc));
  if (!out) throw InputError("cannot write '" + log_path.string() + "'");

  const SessionParams params = config.session_params();
  std::size_t rebuilds = 0;
  for (std::size_t n = 0; n < config.cycles; ++n) {
    const auto cycle = static_cast<std::size_t>(state.cycle);
    SyntheticField field = world_at(config, config.cycle_hours * static_cast<double>(cycle));
    const bool shocked = config.shock_cycle && cycle >= *config.shock_cycle;
    if (shocked) field = scaled(std::move(field), config.shock_factor);
    const auto sensors = MeasurementSource::synthetic(field, config.sensor_error, config.seed);
    const CycleRecord rec = run_session(state, sensors, params);
    json line = cycle_to_json(rec);
    if (!state.current_map.empty()) line["aea"] = aea(state.current_map, field.truth);
    line["shock"] = shocked;
    out << line.dump() << '\n';
    out.flush();
    write_text(state_path, state_to_json(state).dump() + "\n");
    if (rec.rebuild_triggered) ++rebuilds;
    log << "cycle " << rec.cycle << ' ' << to_string(rec.mode) << ": measured " << rec.measured << ", consumption "
        << rec.consumption;
    if (rec.deviation) log << ", deviation " << *rec.deviation;
    if (rec.rebuild_triggered) log << " -> rebuild";
    log << '\n';
  }
  write_text(config.out / "map.csv", map_csv(grid, state.current_map));
  log << rebuilds << " rebuild(s); log in " << log_path.string() << '\n';
  return 0;
}

int cmd_eval(const RunConfig& config, const CommandOptions&, std::ostream& log) {
  const auto results = sweep(config.sweep_config());
  ensure_dir(config.out);
  write_text(config.out / "sweep.csv", results_csv(results));
  write_text(config.out / "sweep.json", results_json(results).dump(2) + "\n");
  log << results.size() << " sweep rows written to " << (config.out / "sweep.csv").string() << '\n';
  return 0;
}

int cmd_screen(const RunConfig& config, const CommandOptions&, std::ostream& log) {
  const auto days = load_days(config.data_dir);
  DatasetDay merged = days.front();
  for (std::size_t d = 1; d < days.size(); ++d) {
    merged.rows.insert(merged.rows.end(), days[d].rows.begin(), days[d].rows.end());
  }
  const auto screen = spatial_regression_screen(screen_input_from_day(merged));
  for (const auto& w : screen.warnings) log << "warning: " << w << '\n';
  ensure_dir(config.out);
  const std::string csv = screen_csv(screen);
  write_text(config.out / "screen.csv", csv);
  log << csv;
  return 0;
}

std::vector<double> parse_thresholds(const std::string& text) {
  auto number = [&](std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw InputError("bad number '" + std::string(s) + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string::npos) throw InputError("range '" + text + "': expected start:step:stop");
    const double start = number(std::string_view(text).substr(0, a));
    const double step = number(std::string_view(text).substr(a + 1, b - a - 1));
    const double stop = number(std::string_view(text).substr(b + 1));
    if (!(step > 0.0)) throw InputError("range '" + text + "': step must be positive");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
      // round to kill accumulated binary noise (0.30000000000000004)
      out.push_back(std::round((start + step * static_cast<double>(i)) * 1e12) / 1e12);
    }
    return out;
  }
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(number(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InputError("empty threshold list");
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || p != item.data() + item.size()) throw InputError("bad count '" + std::string(item) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InputError("empty count list");
  return out;
}

}  // namespace aqmap::cli
