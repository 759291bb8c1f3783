#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "aqmap/gpm_nn.hpp"
#include "aqmap/grid.hpp"
#include "aqmap/sensing.hpp"

namespace aqmap {

/// How the per-variable PDT values collapse to one value per cube.
enum class PdtReduction { max, mean };

std::string_view to_string(PdtReduction r) noexcept;
PdtReduction parse_pdt_reduction(std::string_view text);

/// Partial-derivative threshold field. Each variable's |dCf/dx_i| is
/// min-max normalised across the cubes; a variable whose magnitude is the
/// same everywhere normalises to 0.
struct PdtField {
  Eigen::MatrixXd magnitude;   // cubes x variables, |dCf/dx_i|
  Eigen::MatrixXd normalized;  // cubes x variables, in [0, 1]
  Eigen::VectorXd min_magnitude;
  Eigen::VectorXd max_magnitude;
  std::vector<double> pdt;     // per cube
  PdtReduction reduction = PdtReduction::max;

  std::size_t cube_count() const noexcept { return pdt.size(); }
};

PdtField pdt_from_magnitudes(Eigen::MatrixXd magnitude, PdtReduction reduction = PdtReduction::max);

/// Model derivatives at every cube center with the cube's wind speed.
PdtField compute_pdt(const GpmNnModel& model, const GridSpec& grid, const WindField& wind,
                     PdtReduction reduction = PdtReduction::max);

/// Inverse of the normalisation: the derivative magnitude a PDT value
/// stands for on `variable`.
double magnitude_from_pdt(const PdtField& field, std::size_t variable, double pdt);

struct SelectionSet {
  double threshold = 0.0;
  double delta = 0.0;
  std::vector<std::size_t> members;  // ascending cube indices
};

/// Cubes with pdt >= threshold or pdt <= delta. Requires threshold in
/// [0, 1] and, for a positive threshold, 0 <= delta < threshold.
SelectionSet select_cubes(const std::vector<double>& pdt, double threshold, double delta);
inline SelectionSet select_cubes(const PdtField& field, double threshold, double delta) {
  return select_cubes(field.pdt, threshold, delta);
}

enum class TrajectoryAlgorithm {
  pdt_greedy,  // argmax |PDT_i / cost(i)| at every step
  nearest,     // nearest unvisited member
  sequential,  // ascending cube index (bottom/left to top/right)
};

std::string_view to_string(TrajectoryAlgorithm a) noexcept;
TrajectoryAlgorithm parse_trajectory_algorithm(std::string_view text);

/// Energy of one step from `from` to `to`: flight plus the hover at `to`.
double step_cost(const GridSpec& grid, std::size_t from, std::size_t to, const BatteryModel& battery);

/// Greedy PDT-per-energy tour over the selection. Each step picks the
/// unvisited member with the largest |PDT_i / cost(i)| among those the
/// remaining budget still covers (ties: lowest index) and stops when none
/// is left. O(n^2) candidate evaluations, counted in `comparisons`.
/// Throws InfeasibleError when the budget cannot reach any member.
Trajectory greedy_trajectory(const SelectionSet& selection, std::size_t start, const BatteryModel& battery,
                             const PdtField& pdt, const GridSpec& grid);

Trajectory nearest_trajectory(const SelectionSet& selection, std::size_t start, const BatteryModel& battery,
                              const GridSpec& grid);

Trajectory sequential_trajectory(const SelectionSet& selection, std::size_t start, const BatteryModel& battery,
                                 const GridSpec& grid);

Trajectory plan_trajectory(TrajectoryAlgorithm algorithm, const SelectionSet& selection, std::size_t start,
                           const BatteryModel& battery, const PdtField& pdt, const GridSpec& grid);

}  // namespace aqmap
