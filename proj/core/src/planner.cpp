#include "aqmap/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "aqmap/errors.hpp"

namespace aqmap {

namespace {

[[noreturn]] void throw_budget(const BatteryModel& battery, double cheapest) {
  std::ostringstream msg;
  msg << "battery budget of " << battery.budget << " charge(s) (" << battery.budget_energy()
      << " energy units) cannot reach any selected cube; cheapest step needs " << cheapest;
  throw InfeasibleError(msg.str());
}

void require_start(const GridSpec& grid, std::size_t start) {
  if (start >= grid.cube_count()) throw std::out_of_range("trajectory start cube outside grid");
}

// Shared driver: `score(current, candidate, cost)` ranks candidates, larger
// is better, ties go to the lower cube index.
template <typename Score>
Trajectory greedy_walk(const SelectionSet& selection, std::size_t start, const BatteryModel& battery,
                       const GridSpec& grid, Score score) {
  battery.validate();
  require_start(grid, start);
  if (selection.members.empty()) throw std::invalid_argument("trajectory: selection is empty");

  Trajectory traj;
  traj.start = start;
  std::vector<std::size_t> pending = selection.members;
  std::vector<char> visited(pending.size(), 0);
  std::size_t current = start;
  double spent = 0.0;
  const double budget = battery.budget_energy();

  for (std::size_t step = 0; step < pending.size(); ++step) {
    std::size_t best = pending.size();
    double best_score = -std::numeric_limits<double>::infinity();
    double best_cost = 0.0;
    double cheapest = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < pending.size(); ++c) {
      if (visited[c]) continue;
      ++traj.comparisons;
      const double cost = step_cost(grid, current, pending[c], battery);
      cheapest = std::min(cheapest, cost);
      if (spent + cost > budget) continue;
      const double s = score(current, pending[c], cost);
      if (s > best_score) {
        best_score = s;
        best = c;
        best_cost = cost;
      }
    }
    if (best == pending.size()) {
      if (traj.cubes.empty()) throw_budget(battery, cheapest);
      traj.truncated = true;
      break;
    }
    visited[best] = 1;
    const double d = (grid.center(pending[best]) - grid.center(current)).norm();
    traj.cubes.push_back(pending[best]);
    traj.leg_distances.push_back(d);
    traj.leg_costs.push_back(battery.travel_energy(d));
    spent += best_cost;
    current = pending[best];
  }
  traj.total_cost = spent;
  return traj;
}

}  // namespace

std::string_view to_string(PdtReduction r) noexcept { return r == PdtReduction::max ? "max" : "mean"; }

PdtReduction parse_pdt_reduction(std::string_view text) {
  if (text == "max") return PdtReduction::max;
  if (text == "mean") return PdtReduction::mean;
  throw InputError("unknown PDT reduction '" + std::string(text) + "'");
}

PdtField pdt_from_magnitudes(Eigen::MatrixXd magnitude, PdtReduction reduction) {
  PdtField f;
  f.reduction = reduction;
  const Eigen::Index n = magnitude.rows();
  const Eigen::Index m = magnitude.cols();
  f.magnitude = magnitude.cwiseAbs();
  f.normalized = Eigen::MatrixXd::Zero(n, m);
  f.min_magnitude = Eigen::VectorXd::Zero(m);
  f.max_magnitude = Eigen::VectorXd::Zero(m);
  if (n == 0) return f;
  for (Eigen::Index v = 0; v < m; ++v) {
    const double lo = f.magnitude.col(v).minCoeff();
    const double hi = f.magnitude.col(v).maxCoeff();
    f.min_magnitude(v) = lo;
    f.max_magnitude(v) = hi;
    const double range = hi - lo;
    // Rounding noise on an analytically constant derivative is not signal.
    if (!(range > 1e-12 * std::max(hi, std::numeric_limits<double>::min()))) continue;
    f.normalized.col(v) = ((f.magnitude.col(v).array() - lo) / range).min(1.0).max(0.0).matrix();
  }
  f.pdt.resize(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    f.pdt[static_cast<std::size_t>(c)] =
        reduction == PdtReduction::max ? f.normalized.row(c).maxCoeff() : f.normalized.row(c).mean();
  }
  return f;
}

PdtField compute_pdt(const GpmNnModel& model, const GridSpec& grid, const WindField& wind, PdtReduction reduction) {
  if (wind.size() != grid.cube_count()) throw std::invalid_argument("compute_pdt: wind field size differs from grid");
  const auto n = static_cast<Eigen::Index>(grid.cube_count());
  Eigen::MatrixXd magnitude(n, 4);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto cube = static_cast<std::size_t>(c);
    magnitude.row(c) = predict_gradient(model, grid.center(cube), wind.raw(cube)).cwiseAbs().transpose();
  }
  return pdt_from_magnitudes(std::move(magnitude), reduction);
}

double magnitude_from_pdt(const PdtField& field, std::size_t variable, double pdt) {
  const auto v = static_cast<Eigen::Index>(variable);
  return pdt * (field.max_magnitude(v) - field.min_magnitude(v)) + field.min_magnitude(v);
}

SelectionSet select_cubes(const std::vector<double>& pdt, double threshold, double delta) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("PDT threshold must lie in [0, 1]");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
  if (threshold > 0.0 && delta >= threshold) {
    throw std::invalid_argument("delta must be below the PDT threshold; use complete monitoring instead");
  }
  SelectionSet sel{threshold, delta, {}};
  for (std::size_t c = 0; c < pdt.size(); ++c) {
    if (pdt[c] >= threshold || pdt[c] <= delta) sel.members.push_back(c);
  }
  return sel;
}

std::string_view to_string(TrajectoryAlgorithm a) noexcept {
  switch (a) {
    case TrajectoryAlgorithm::pdt_greedy: return "pdt-greedy";
    case TrajectoryAlgorithm::nearest: return "nearest";
    case TrajectoryAlgorithm::sequential: return "sequential";
  }
  return "pdt-greedy";
}

TrajectoryAlgorithm parse_trajectory_algorithm(std::string_view text) {
  if (text == "pdt-greedy" || text == "adaptive") return TrajectoryAlgorithm::pdt_greedy;
  if (text == "nearest" || text == "greedy") return TrajectoryAlgorithm::nearest;
  if (text == "sequential") return TrajectoryAlgorithm::sequential;
  throw InputError("unknown trajectory algorithm '" + std::string(text) + "'");
}

double step_cost(const GridSpec& grid, std::size_t from, std::size_t to, const BatteryModel& battery) {
  return battery.travel_energy((grid.center(to) - grid.center(from)).norm()) + battery.hover_energy();
}

Trajectory greedy_trajectory(const SelectionSet& selection, std::size_t start, const BatteryModel& battery,
                             const PdtField& pdt, const GridSpec& grid) {
  if (pdt.cube_count() != grid.cube_count()) throw std::invalid_argument("greedy_trajectory: PDT field size differs");
  return greedy_walk(selection, start, battery, grid, [&](std::size_t, std::size_t cand, double cost) {
    return std::abs(pdt.pdt[cand] / cost);
  });
}

Trajectory nearest_trajectory(const SelectionSet& selection, std::size_t start, const BatteryModel& battery,
                              const GridSpec& grid) {
  return greedy_walk(selection, start, battery, grid, [&](std::size_t from, std::size_t cand, double) {
    return -(grid.center(cand) - grid.center(from)).norm();
  });
}

Trajectory sequential_trajectory(const SelectionSet& selection, std::size_t start, const BatteryModel& battery,
                                 const GridSpec& grid) {
  battery.validate();
  require_start(grid, start);
  if (selection.members.empty()) throw std::invalid_argument("trajectory: selection is empty");
  std::vector<std::size_t> order = selection.members;
  std::sort(order.begin(), order.end());
  Trajectory traj;
  traj.start = start;
  std::size_t current = start;
  double spent = 0.0;
  for (std::size_t cube : order) {
    ++traj.comparisons;
    const double cost = step_cost(grid, current, cube, battery);
    if (spent + cost > battery.budget_energy()) {
      if (traj.cubes.empty()) throw_budget(battery, cost);
      traj.truncated = true;
      break;
    }
    const double d = (grid.center(cube) - grid.center(current)).norm();
    traj.cubes.push_back(cube);
    traj.leg_distances.push_back(d);
    traj.leg_costs.push_back(battery.travel_energy(d));
    spent += cost;
    current = cube;
  }
  traj.total_cost = spent;
  return traj;
}

Trajectory plan_trajectory(TrajectoryAlgorithm algorithm, const SelectionSet& selection, std::size_t start,
                           const BatteryModel& battery, const PdtField& pdt, const GridSpec& grid) {
  switch (algorithm) {
    case TrajectoryAlgorithm::pdt_greedy: return greedy_trajectory(selection, start, battery, pdt, grid);
    case TrajectoryAlgorithm::nearest: return nearest_trajectory(selection, start, battery, grid);
    case TrajectoryAlgorithm::sequential: return sequential_trajectory(selection, start, battery, grid);
  }
  throw std::invalid_argument("unknown trajectory algorithm");
}

}  // namespace aqmap
