#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aqmap/gpm_nn.hpp"
#include "aqmap/planner.hpp"
#include "aqmap/sensing.hpp"

namespace aqmap {

enum class MonitorMode { complete, selective };

std::string_view to_string(MonitorMode m) noexcept;

struct SessionParams {
  double pdt_threshold = 0.4;
  double delta = 0.05;
  double deviation_threshold = 0.2;  // mean relative deviation that forces a rebuild
  PdtReduction reduction = PdtReduction::max;
  TrajectoryAlgorithm algorithm = TrajectoryAlgorithm::pdt_greedy;
  std::size_t start_cube = 0;
  BatteryModel battery;
  PlumeParams plume;
  FitOptions fit;
};

/// Monitoring state carried between cycles. `model` and the maps are empty
/// until the first complete pass.
struct SessionState {
  GridSpec grid;
  std::optional<GpmNnModel> model{};
  std::vector<double> baseline_map{};
  std::vector<double> current_map{};
  MonitorMode mode = MonitorMode::complete;
  double deviation_threshold = 0.2;
  std::uint64_t cycle = 0;
  std::optional<std::uint64_t> last_complete{};
  bool incomplete = false;

  static SessionState fresh(const GridSpec& grid, double deviation_threshold = 0.2);
  bool has_baseline() const noexcept { return model.has_value() && !baseline_map.empty(); }
};

struct CycleRecord {
  std::uint64_t cycle = 0;
  MonitorMode mode = MonitorMode::complete;
  MonitorMode next_mode = MonitorMode::selective;
  std::size_t selected = 0;
  Trajectory trajectory;
  double consumption = 0.0;  // fraction of one charge
  std::size_t measured = 0;
  std::optional<double> deviation;
  bool rebuild_triggered = false;
  bool incomplete = false;
  std::optional<FitReport> fit;
};

/// One cycle of the monitoring loop.
///
/// Complete mode measures every cube, refits the model and stores the
/// baseline map. Selective mode ranks cubes by PDT, flies the planned tour
/// over the selection, updates beta from the new samples and regenerates
/// the map; a mean relative deviation above the threshold between the new
/// samples and the previous map schedules a complete pass next. A sensor
/// failure keeps the samples gathered so far and flags the cycle.
CycleRecord run_session(SessionState& state, const MeasurementSource& sensors, const SessionParams& params);

/// Mean of |measured - previous| / previous over the given samples.
double mean_relative_deviation(const SessionState& state, const std::vector<std::size_t>& cubes,
                               const SampleSet& samples);

/// One session-log line (no trailing newline), keys sorted.
nlohmann::json cycle_to_json(const CycleRecord& record);

}  // namespace aqmap
