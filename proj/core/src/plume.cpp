#include "aqmap/plume.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "aqmap/errors.hpp"

namespace aqmap {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("plume parameter ") + name + " must be positive and finite");
  }
}

// exp(-(z-H)^2 / (2 sigma_z^2))
double vertical_profile(double z, const PlumeParams& p) {
  const double d = z - p.height;
  return std::exp(-d * d / (2.0 * p.sigma_z * p.sigma_z));
}

}  // namespace

void PlumeParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("plume parameter lambda must be non-negative and finite");
  }
  require_positive(length, "length");
  require_positive(sigma_y, "sigma_y");
  require_positive(sigma_z, "sigma_z");
  require_positive(height_max, "height_max");
  require_positive(wind_floor, "wind_floor");
  if (!(height >= 0.0 && height <= height_max)) {
    throw std::invalid_argument("plume height H must lie in [0, H0]");
  }
}

double gaussian_q(double t) {
  // erfc keeps full relative precision in the upper tail.
  return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

double line_source_factor(const PlumeParams& params) {
  return 1.0 - 2.0 * gaussian_q(params.length / (2.0 * params.sigma_y));
}

double classic_gpm(const Vec3& pos, const PlumeParams& params, double source_strength, double wind) {
  if (!(wind > 0.0)) throw std::invalid_argument("classic_gpm: wind speed must be positive");
  const double dz = pos.z() - params.height;
  const double y = pos.y();
  const double sy2 = params.sigma_y * params.sigma_y;
  const double sz2 = params.sigma_z * params.sigma_z;
  return source_strength / (2.0 * std::numbers::pi * params.sigma_y * params.sigma_z * wind) *
         std::exp(-dz * dz / (2.0 * sz2)) * std::exp(-y * y / (2.0 * sy2));
}

double revised_gpm(const Vec3& pos, double wind, const PlumeParams& params) {
  const double u = effective_wind(wind, params.wind_floor);
  const double amplitude = params.lambda / (std::sqrt(2.0 * std::numbers::pi) * params.sigma_z * u);
  return amplitude * vertical_profile(pos.z(), params) * line_source_factor(params);
}

Eigen::Vector4d revised_gpm_grad(const Vec3& pos, double wind, const PlumeParams& params) {
  const double c = revised_gpm(pos, wind, params);
  const double sz2 = params.sigma_z * params.sigma_z;
  const double dz = c * (params.height - pos.z()) / sz2;
  const double du = wind_clamped(wind, params) ? 0.0 : -c / wind;
  return {0.0, 0.0, dz, du};
}

double revised_gpm_dh(const Vec3& pos, double wind, const PlumeParams& params) {
  const double c = revised_gpm(pos, wind, params);
  return c * (pos.z() - params.height) / (params.sigma_z * params.sigma_z);
}

double revised_gpm_dh2(const Vec3& pos, double wind, const PlumeParams& params) {
  const double c = revised_gpm(pos, wind, params);
  const double sz2 = params.sigma_z * params.sigma_z;
  const double d = pos.z() - params.height;
  return c * (d * d - sz2) / (sz2 * sz2);
}

std::optional<std::string> convexity_guard_violation(const PlumeParams& params, double z_max) {
  const double sz2 = params.sigma_z * params.sigma_z;
  const double z_term = 2.0 * z_max * z_max;
  const double h_term = 2.0 * params.height_max * params.height_max;
  if (sz2 > z_term && sz2 > h_term) return std::nullopt;
  std::ostringstream msg;
  msg.precision(10);
  msg << "convexity guard violated: sigma_z^2 > max(2 z_max^2, 2 H0^2) requires " << sz2 << " > max(" << z_term
      << ", " << h_term << ") with sigma_z=" << params.sigma_z << ", z_max=" << z_max
      << ", H0=" << params.height_max;
  return msg.str();
}

void require_convexity_guard(const PlumeParams& params, double z_max) {
  if (auto violation = convexity_guard_violation(params, z_max)) throw GuardViolation(*violation);
}

}  // namespace aqmap
