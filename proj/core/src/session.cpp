#include "aqmap/session.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "aqmap/errors.hpp"

namespace aqmap {

namespace {

std::vector<double> predict_map(const GpmNnModel& model, const GridSpec& grid, const WindField& wind) {
  std::vector<double> map(grid.cube_count());
  for (std::size_t c = 0; c < map.size(); ++c) map[c] = predict(model, grid.center(c), wind.raw(c));
  return map;
}

// Measures `order` in sequence; stops at the first sensor failure.
struct Gathered {
  SampleSet samples;
  std::vector<std::size_t> cubes;
  bool failed = false;
};

Gathered gather(const MeasurementSource& sensors, const std::vector<std::size_t>& order, std::uint64_t epoch) {
  Gathered g;
  for (std::size_t cube : order) {
    try {
      g.samples.push_back(sensors.measure(cube, epoch));
      g.cubes.push_back(cube);
    } catch (const InputError&) {
      g.failed = true;
      break;
    }
  }
  return g;
}

void run_complete(SessionState& state, const MeasurementSource& sensors, const SessionParams& params,
                  CycleRecord& rec) {
  const auto& grid = state.grid;
  std::vector<std::size_t> all(grid.cube_count());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  rec.selected = all.size();

  Gathered g = gather(sensors, all, state.cycle);
  rec.measured = g.samples.size();
  rec.incomplete = g.failed;
  // a complete pass may span several charges, so it is never budget-truncated
  rec.trajectory = make_trajectory(grid, params.start_cube, g.cubes, params.battery);
  rec.consumption = trajectory_cost(rec.trajectory, params.battery);

  if (g.samples.size() >= 2) {
    auto [model, report] = fit(g.samples, params.plume, params.fit);
    state.model = std::move(model);
    rec.fit = std::move(report);
    state.baseline_map = predict_map(*state.model, grid, sensors.wind());
    state.current_map = state.baseline_map;
  }
  if (!g.failed && state.has_baseline()) {
    state.last_complete = state.cycle;
    rec.next_mode = MonitorMode::selective;
  } else {
    rec.next_mode = MonitorMode::complete;
  }
}

void run_selective(SessionState& state, const MeasurementSource& sensors, const SessionParams& params,
                   CycleRecord& rec) {
  const auto& grid = state.grid;
  GpmNnModel& model = *state.model;
  const PdtField pdt = compute_pdt(model, grid, sensors.wind(), params.reduction);
  const SelectionSet selection = select_cubes(pdt, params.pdt_threshold, params.delta);
  rec.selected = selection.members.size();
  const Trajectory planned =
      plan_trajectory(params.algorithm, selection, params.start_cube, params.battery, pdt, grid);

  Gathered g = gather(sensors, planned.cubes, state.cycle);
  rec.measured = g.samples.size();
  rec.incomplete = g.failed;
  rec.trajectory = g.failed ? make_trajectory(grid, params.start_cube, g.cubes, params.battery) : planned;
  rec.trajectory.truncated = planned.truncated;
  rec.trajectory.comparisons = planned.comparisons;
  rec.consumption = trajectory_cost(rec.trajectory, params.battery);

  if (g.samples.empty()) {
    rec.next_mode = MonitorMode::selective;
    return;
  }
  const double deviation = mean_relative_deviation(state, g.cubes, g.samples);
  rec.deviation = deviation;

  refit_beta(model, g.samples);
  state.current_map = predict_map(model, grid, sensors.wind());

  rec.rebuild_triggered = deviation > state.deviation_threshold;
  rec.next_mode = rec.rebuild_triggered ? MonitorMode::complete : MonitorMode::selective;
}

}  // namespace

std::string_view to_string(MonitorMode m) noexcept { return m == MonitorMode::complete ? "complete" : "selective"; }

SessionState SessionState::fresh(const GridSpec& grid, double deviation_threshold) {
  SessionState s{.grid = grid};
  s.deviation_threshold = deviation_threshold;
  return s;
}

double mean_relative_deviation(const SessionState& state, const std::vector<std::size_t>& cubes,
                               const SampleSet& samples) {
  if (cubes.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const double previous = state.current_map.at(cubes[i]);
    const double denom = std::max(std::abs(previous), std::numeric_limits<double>::min());
    total += std::abs(samples[i].aqi - previous) / denom;
  }
  return total / static_cast<double>(cubes.size());
}

CycleRecord run_session(SessionState& state, const MeasurementSource& sensors, const SessionParams& params) {
  if (!(sensors.grid() == state.grid)) throw std::invalid_argument("run_session: sensor grid differs from session grid");
  CycleRecord rec;
  rec.cycle = state.cycle;
  if (!state.has_baseline()) state.mode = MonitorMode::complete;
  rec.mode = state.mode;

  if (state.mode == MonitorMode::complete) {
    run_complete(state, sensors, params, rec);
  } else {
    run_selective(state, sensors, params, rec);
  }

  state.incomplete = rec.incomplete;
  state.mode = rec.next_mode;
  ++state.cycle;
  return rec;
}

nlohmann::json cycle_to_json(const CycleRecord& record) {
  nlohmann::json j;
  j["cycle"] = record.cycle;
  j["mode"] = std::string(to_string(record.mode));
  j["next_mode"] = std::string(to_string(record.next_mode));
  j["selected"] = record.selected;
  j["measured"] = record.measured;
  j["trajectory"] = record.trajectory.cubes;
  j["cost"] = record.consumption;
  j["truncated"] = record.trajectory.truncated;
  j["deviation"] = record.deviation ? nlohmann::json(*record.deviation) : nlohmann::json(nullptr);
  j["rebuild"] = record.rebuild_triggered;
  j["incomplete"] = record.incomplete;
  if (record.fit) {
    j["fit"] = {{"residual_s", record.fit->residual_s},
                {"h_estimate", record.fit->h_estimate},
                {"iterations", record.fit->iterations},
                {"converged", record.fit->converged}};
  }
  return j;
}

}  // namespace aqmap
