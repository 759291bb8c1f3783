#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aqmap/gpm_nn.hpp"
#include "aqmap/planner.hpp"
#include "aqmap/sensing.hpp"
#include "aqmap/session.hpp"
#include "aqmap/sweep.hpp"

namespace aqmap {

/// Everything a command needs. Loaded from a JSON file (any subset of keys;
/// the rest keep their defaults) and then patched by command-line flags.
struct RunConfig {
  Scenario scenario = Scenario::planar;
  GridSpec::Dims dims{10, 10, 1};
  double spacing = 5.0;
  PlumeParams plume;      // initial model plume
  PlumeParams world;      // plume of the synthetic world
  FieldConfig field;
  double sensor_error = 0.03;

  FitOptions fit;
  std::uint64_t seed = 1;

  double pdt_threshold = 0.4;
  double delta = 0.05;
  double deviation_threshold = 0.2;
  PdtReduction reduction = PdtReduction::max;
  TrajectoryAlgorithm algorithm = TrajectoryAlgorithm::pdt_greedy;
  std::size_t start_cube = 0;
  BatteryModel battery;

  // session
  std::size_t cycles = 5;
  std::optional<std::size_t> shock_cycle;  // field scaled by shock_factor from this cycle on
  double shock_factor = 2.0;
  double cycle_hours = 1.0;

  // eval
  std::vector<double> thresholds{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<std::size_t> sweep_neurons{1000};

  std::filesystem::path data_dir = "data";
  std::filesystem::path out = "out";

  GridSpec grid() const { return GridSpec::lattice(dims, spacing); }
  SessionParams session_params() const;
  SweepConfig sweep_config() const;
};

/// Scenario defaults: 10 x 10 x 1 for 2D, 4 x 4 x 10 for 3D.
RunConfig default_config(Scenario scenario = Scenario::planar);

/// Applies the keys present in `doc` on top of `base`. Unknown keys and
/// wrongly typed values throw InputError.
RunConfig apply_config(RunConfig base, const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& config);

/// "10x10x1" or "10x10" (nz = 1).
GridSpec::Dims parse_dims(const std::string& text);

}  // namespace aqmap
