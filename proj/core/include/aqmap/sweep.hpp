#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aqmap/gpm_nn.hpp"
#include "aqmap/planner.hpp"
#include "aqmap/sensing.hpp"

namespace aqmap {

enum class Estimator { gpm_nn, mlr, li };

std::string_view to_string(Estimator e) noexcept;
Estimator parse_estimator(std::string_view text);

/// One synthetic experiment: a baseline day at time 0, a drifted field
/// `drift_hours` later, and a selective pass per (threshold, algorithm).
struct SweepConfig {
  Scenario scenario = Scenario::planar;
  GridSpec grid = GridSpec::lattice({10, 10, 1});
  PlumeParams truth_plume;  // plume of the synthetic world
  PlumeParams model_plume;  // initial plume of every fitted model
  FieldConfig field;
  double drift_hours = 1.0;
  double sensor_error = 0.03;
  std::uint64_t seed = 1;

  std::vector<double> thresholds{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<std::size_t> neurons{1000};
  std::vector<Estimator> estimators{Estimator::gpm_nn, Estimator::mlr, Estimator::li};
  std::vector<TrajectoryAlgorithm> algorithms{TrajectoryAlgorithm::pdt_greedy, TrajectoryAlgorithm::nearest,
                                              TrajectoryAlgorithm::sequential};
  std::size_t planner_neurons = 1000;  // model whose derivatives rank the cubes
  double delta = 0.05;
  PdtReduction reduction = PdtReduction::max;
  BatteryModel battery;
  std::size_t start_cube = 0;
  FitOptions fit;
};

/// Defaults for the two scenarios (grid, world and battery).
SweepConfig default_sweep(Scenario scenario);

struct EvalResult {
  Scenario scenario = Scenario::planar;
  std::string model;            // "gpm-nn", "mlr", "li"
  std::size_t neurons = 0;      // gpm-nn only
  TrajectoryAlgorithm algorithm = TrajectoryAlgorithm::pdt_greedy;
  double threshold = 0.0;
  double aea = 0.0;
  double err = 0.0;
  double consumption = 0.0;           // fraction of one charge
  double complete_consumption = 0.0;  // same algorithm over every cube
  std::size_t selected = 0;
  std::size_t measured = 0;
  bool feasible = true;   // false when the budget cut the tour short
  bool aea_negative = false;
};

std::vector<EvalResult> sweep(const SweepConfig& config);

/// Header plus one row per result; column order is stable.
std::string results_csv(const std::vector<EvalResult>& results);
nlohmann::json results_json(const std::vector<EvalResult>& results);

}  // namespace aqmap
