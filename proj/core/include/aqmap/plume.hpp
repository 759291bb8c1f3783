#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "aqmap/grid.hpp"

namespace aqmap {

/// Physical parameters of the line-source plume.
///
/// The source is a line of length `length` aligned with the y axis at height
/// `height`; integrating the point-source plume along it removes any x/y
/// dependence, so the concentration is a function of height and wind only.
struct PlumeParams {
  double lambda = 5.0e4;     // source particle density (AQI m/s per unit length)
  double length = 100.0;     // source line length (m)
  double sigma_y = 50.0;     // horizontal diffusion (m)
  double sigma_z = 75.0;     // vertical diffusion (m)
  double height = 25.0;      // effective source height H (m), fitted
  double height_max = 50.0;  // upper bound H0 (m)
  double wind_floor = WindField::kDefaultFloor;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  friend bool operator==(const PlumeParams&, const PlumeParams&) = default;
};

/// Standard normal upper tail probability Q(t) = P(Z > t).
double gaussian_q(double t);

/// Bracket 1 - 2 Q(L / (2 sigma_y)): fraction of the line source seen at y = 0.
double line_source_factor(const PlumeParams& params);

/// Classic point-source Gaussian plume. Throws std::invalid_argument for a
/// non-positive wind speed.
double classic_gpm(const Vec3& pos, const PlumeParams& params, double source_strength, double wind);

/// Line-source plume concentration. Wind below the floor is clamped.
double revised_gpm(const Vec3& pos, double wind, const PlumeParams& params);

/// Partials (dC/dx, dC/dy, dC/dz, dC/du). The x and y partials are
/// identically zero; dC/du is zero when the wind is clamped.
Eigen::Vector4d revised_gpm_grad(const Vec3& pos, double wind, const PlumeParams& params);

/// dC/dH and d2C/dH2 at fixed position and wind.
double revised_gpm_dh(const Vec3& pos, double wind, const PlumeParams& params);
double revised_gpm_dh2(const Vec3& pos, double wind, const PlumeParams& params);

inline bool wind_clamped(double wind, const PlumeParams& params) noexcept { return wind < params.wind_floor; }

/// Checks sigma_z^2 > max(2 z_max^2, 2 H0^2), which keeps the fit residual
/// well behaved in H. Returns a message naming the violated inequality, or
/// nullopt when it holds.
std::optional<std::string> convexity_guard_violation(const PlumeParams& params, double z_max);

/// Throws GuardViolation when `convexity_guard_violation` reports a problem.
void require_convexity_guard(const PlumeParams& params, double z_max);

}  // namespace aqmap
