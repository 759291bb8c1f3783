#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "aqmap/grid.hpp"
#include "aqmap/plume.hpp"

namespace aqmap {

enum class Scenario { planar, volumetric };  // "2D" horizontal open space, "3D" vertical enclosed space

std::string_view to_string(Scenario s) noexcept;
Scenario parse_scenario(std::string_view text);

enum class FieldKind { plume, plume_with_perturbation };

/// Knobs of the synthetic world beyond the plume itself.
struct FieldConfig {
  double c_base = 40.0;        // background AQI
  double plume_scale = 1.0;    // multiplies the plume term; x2 emulates a pollution shock
  double perturbation = 0.15;  // relative amplitude of the smooth disturbance, in [0, 1)
  double time = 0.0;           // logical hours; drifts the disturbance phases
  double wind_mean = 2.5;      // m/s
  double wind_variation = 0.1; // relative smooth variation of the wind field
  double pocket_depth = 0.9;   // relative wind drop inside the stagnation pocket
  double pocket_width = 6.0;   // m
};

struct SyntheticField {
  GridSpec grid;
  Scenario scenario = Scenario::planar;
  FieldKind kind = FieldKind::plume;
  std::vector<double> truth;  // per cube, row-major
  std::vector<double> profile;  // plume-only truth before the disturbance
  WindField wind;
  std::uint64_t seed = 0;
};

/// Deterministic ground truth: c_base + scale * plume * (1 + perturbation * phi)
/// with phi a seeded low-order trigonometric mixture normalised to |phi| <= 1.
SyntheticField generate_field(const GridSpec& grid, const PlumeParams& plume, Scenario scenario,
                              const FieldConfig& config, std::uint64_t seed);

SyntheticField generate_field(const GridSpec& grid, const PlumeParams& plume, Scenario scenario,
                              double perturbation, std::uint64_t seed);

/// Seeded wind field used by `generate_field`.
WindField generate_wind(const GridSpec& grid, Scenario scenario, const FieldConfig& config, std::uint64_t seed);

/// Scales every truth value (and profile) by `factor`.
SyntheticField scaled(SyntheticField field, double factor);

/// Time-proportional energy model, normalised so one full charge powers
/// `flight_minutes` of flight at the mean of hover and travel power.
struct BatteryModel {
  double budget = 1.0;          // charges available for one plan
  double hover_time = 10.0;     // s per measurement
  double flight_minutes = 15.0; // endurance per charge
  double speed = 5.0;           // m/s
  double hover_power = 1.0;     // energy / s
  double travel_power = 1.0;    // energy / s

  void validate() const;
  double mean_power() const noexcept { return 0.5 * (hover_power + travel_power); }
  double charge_energy() const noexcept { return flight_minutes * 60.0 * mean_power(); }
  double budget_energy() const noexcept { return budget * charge_energy(); }
  double hover_energy() const noexcept { return hover_time * hover_power; }
  double travel_energy(double distance) const noexcept { return distance / speed * travel_power; }
};

/// Ordered visit list. Leg k flies from the previous stop (or `start` for
/// k = 0) to cubes[k]; every stop hovers once.
struct Trajectory {
  std::size_t start = 0;
  std::vector<std::size_t> cubes;
  std::vector<double> leg_distances;  // m
  std::vector<double> leg_costs;      // travel energy per leg
  double total_cost = 0.0;            // travel + hover energy
  bool truncated = false;             // budget ran out before every member was visited
  std::size_t comparisons = 0;        // candidate evaluations performed by the planner
};

/// Builds legs and costs for a fixed visiting order.
Trajectory make_trajectory(const GridSpec& grid, std::size_t start, std::vector<std::size_t> order,
                           const BatteryModel& battery);

/// Consumption as a fraction of one charge. Feasible iff <= battery.budget.
double trajectory_cost(const Trajectory& traj, const BatteryModel& battery);

/// Sensor model over a synthetic field or a replayed dataset.
class MeasurementSource {
 public:
  static MeasurementSource synthetic(SyntheticField field, double sensor_error = 0.03, std::uint64_t seed = 0);

  /// Recorded values per cube (nullopt where nothing was recorded).
  static MeasurementSource replay(const GridSpec& grid, std::vector<std::optional<double>> values, WindField wind);

  const GridSpec& grid() const noexcept { return grid_; }
  const WindField& wind() const noexcept { return wind_; }
  double sensor_error() const noexcept { return sensor_error_; }
  bool is_replay() const noexcept { return replay_; }

  /// Measurement at a cube; `epoch` selects an independent noise draw
  /// (e.g. one per monitoring cycle). Pure in (seed, epoch, cube).
  Sample measure(const Cube& cube, std::uint64_t epoch = 0) const;
  Sample measure(std::size_t cube, std::uint64_t epoch = 0) const;

  /// Relative noise e in [-sensor_error, sensor_error] applied at a cube.
  double noise(std::size_t cube, std::uint64_t epoch) const;

  std::optional<double> truth(std::size_t cube) const;

 private:
  MeasurementSource(GridSpec grid, WindField wind) : grid_(std::move(grid)), wind_(std::move(wind)) {}

  GridSpec grid_;
  WindField wind_;
  std::vector<std::optional<double>> values_;
  double sensor_error_ = 0.0;
  std::uint64_t seed_ = 0;
  bool replay_ = false;
};

}  // namespace aqmap
