#include "aqmap/sweep.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aqmap/errors.hpp"
#include "aqmap/metrics.hpp"

namespace aqmap {

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::gpm_nn: return "gpm-nn";
    case Estimator::mlr: return "mlr";
    case Estimator::li: return "li";
  }
  return "?";
}

Estimator parse_estimator(std::string_view text) {
  if (text == "gpm-nn" || text == "gpmnn") return Estimator::gpm_nn;
  if (text == "mlr") return Estimator::mlr;
  if (text == "li") return Estimator::li;
  throw InputError("unknown estimator '" + std::string(text) + "'");
}

SweepConfig default_sweep(Scenario scenario) {
  SweepConfig c;
  c.scenario = scenario;
  if (scenario == Scenario::planar) {
    c.grid = GridSpec::lattice({10, 10, 1});
  } else {
    c.grid = GridSpec::lattice({4, 4, 10});
  }
  // a complete pass must fit in the budget so threshold 0 is comparable
  c.battery.budget = 3.0;
  return c;
}

namespace {

std::vector<double> model_map(const GpmNnModel& model, const GridSpec& grid, const WindField& wind) {
  std::vector<double> out(grid.cube_count());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = predict(model, grid.center(c), wind.raw(c));
  return out;
}

}  // namespace

std::vector<EvalResult> sweep(const SweepConfig& config) {
  config.battery.validate();
  const SyntheticField before = generate_field(config.grid, config.truth_plume, config.scenario, config.field,
                                               config.seed);
  FieldConfig later = config.field;
  later.time += config.drift_hours;
  const SyntheticField after = generate_field(config.grid, config.truth_plume, config.scenario, later, config.seed);
  const auto day0 = MeasurementSource::synthetic(before, config.sensor_error, config.seed);
  const auto day1 = MeasurementSource::synthetic(after, config.sensor_error, config.seed);
  const std::size_t n = config.grid.cube_count();

  SampleSet complete;
  complete.reserve(n);
  for (std::size_t c = 0; c < n; ++c) complete.push_back(day0.measure(c, 0));

  // one baseline model per neuron count, plus the planner's if distinct
  std::map<std::size_t, GpmNnModel> models;
  auto fitted = [&](std::size_t k) -> const GpmNnModel& {
    auto it = models.find(k);
    if (it == models.end()) {
      FitOptions opt = config.fit;
      opt.neurons = k;
      it = models.emplace(k, fit(complete, config.model_plume, opt).first).first;
    }
    return it->second;
  };

  const PdtField pdt = compute_pdt(fitted(config.planner_neurons), config.grid, before.wind, config.reduction);
  const bool want_gpm = std::ranges::find(config.estimators, Estimator::gpm_nn) != config.estimators.end();
  if (want_gpm) {
    for (std::size_t k : config.neurons) fitted(k);
  }

  std::map<TrajectoryAlgorithm, double> complete_cost;
  for (auto alg : config.algorithms) {
    SelectionSet all;
    all.members.resize(n);
    for (std::size_t c = 0; c < n; ++c) all.members[c] = c;
    BatteryModel unlimited = config.battery;
    unlimited.budget = 1e9;
    complete_cost[alg] = trajectory_cost(plan_trajectory(alg, all, config.start_cube, unlimited, pdt, config.grid),
                                         config.battery);
  }

  std::vector<EvalResult> out;
  for (double threshold : config.thresholds) {
    const SelectionSet sel = select_cubes(pdt, threshold, config.delta);
    for (auto alg : config.algorithms) {
      EvalResult base;
      base.scenario = config.scenario;
      base.algorithm = alg;
      base.threshold = threshold;
      base.selected = sel.members.size();
      base.complete_consumption = complete_cost[alg];

      std::optional<Trajectory> traj;
      try {
        traj = plan_trajectory(alg, sel, config.start_cube, config.battery, pdt, config.grid);
      } catch (const InfeasibleError&) {
        base.feasible = false;
      }
      SampleSet samples;
      std::vector<std::optional<double>> measured(n);
      if (traj) {
        base.consumption = trajectory_cost(*traj, config.battery);
        base.feasible = !traj->truncated;
        for (std::size_t c : traj->cubes) {
          samples.push_back(day1.measure(c, 1));
          measured[c] = samples.back().aqi;
        }
      }
      base.measured = samples.size();

      auto record = [&](EvalResult r, const std::vector<double>& map) {
        r.aea = aea(map, after.truth);
        r.err = err(map, after.truth);
        r.aea_negative = r.aea < 0.0;
        out.push_back(std::move(r));
      };

      for (auto est : config.estimators) {
        EvalResult r = base;
        r.model = std::string(to_string(est));
        switch (est) {
          case Estimator::gpm_nn:
            for (std::size_t k : config.neurons) {
              GpmNnModel m = fitted(k);
              if (!samples.empty()) refit_beta(m, samples);
              EvalResult rk = r;
              rk.neurons = k;
              record(rk, model_map(m, config.grid, after.wind));
            }
            break;
          case Estimator::mlr:
            if (samples.empty()) {
              record(r, std::vector<double>(n, 0.0));
            } else {
              record(r, baseline_mlr(samples, config.grid, after.wind));
            }
            break;
          case Estimator::li:
            if (samples.empty()) {
              record(r, std::vector<double>(n, 0.0));
            } else {
              record(r, baseline_li(config.grid, measured));
            }
            break;
        }
      }
    }
  }
  return out;
}

std::string results_csv(const std::vector<EvalResult>& results) {
  std::ostringstream os;
  os.precision(10);
  os << "scenario,model,neurons,algorithm,threshold,aea,err,consumption,complete_consumption,selected,measured,"
        "feasible,aea_negative\n";
  for (const auto& r : results) {
    os << to_string(r.scenario) << ',' << r.model << ',' << r.neurons << ',' << to_string(r.algorithm) << ','
       << r.threshold << ',' << r.aea << ',' << r.err << ',' << r.consumption << ',' << r.complete_consumption << ','
       << r.selected << ',' << r.measured << ',' << (r.feasible ? 1 : 0) << ',' << (r.aea_negative ? 1 : 0) << '\n';
  }
  return os.str();
}

nlohmann::json results_json(const std::vector<EvalResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    arr.push_back({{"scenario", to_string(r.scenario)},
                   {"model", r.model},
                   {"neurons", r.neurons},
                   {"algorithm", to_string(r.algorithm)},
                   {"threshold", r.threshold},
                   {"aea", r.aea},
                   {"err", r.err},
                   {"consumption", r.consumption},
                   {"complete_consumption", r.complete_consumption},
                   {"selected", r.selected},
                   {"measured", r.measured},
                   {"feasible", r.feasible},
                   {"aea_negative", r.aea_negative}});
  }
  return arr;
}

}  // namespace aqmap
