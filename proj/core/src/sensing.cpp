#include "aqmap/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "aqmap/errors.hpp"
#include "aqmap/rng.hpp"

namespace aqmap {

namespace {

struct Mode {
  double amplitude;
  Vec3 wavevector;
  double omega;
  double phase;
};

double extent(const GridSpec& grid, int axis) { return grid.spacing() * static_cast<double>(grid.dims()[axis]); }

// Random plane-wave mixture; planar scenarios vary over x/y only, volumetric
// ones mostly over z.
std::vector<Mode> draw_modes(const GridSpec& grid, Scenario scenario, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Mode> modes;
  modes.reserve(count);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t m = 0; m < count; ++m) {
    Mode mode{};
    mode.amplitude = rng.uniform(0.5, 1.0);
    auto cycles = [&](double lo, double hi) { return (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(lo, hi); };
    if (scenario == Scenario::planar) {
      mode.wavevector = Vec3(two_pi * cycles(0.2, 1.0) / extent(grid, 0), two_pi * cycles(0.2, 1.0) / extent(grid, 1), 0.0);
    } else {
      mode.wavevector = Vec3(two_pi * cycles(0.0, 0.25) / extent(grid, 0), two_pi * cycles(0.0, 0.25) / extent(grid, 1),
                             two_pi * cycles(0.3, 1.2) / extent(grid, 2));
    }
    mode.omega = rng.uniform(0.2, 0.6);
    mode.phase = rng.uniform(0.0, two_pi);
    modes.push_back(mode);
  }
  return modes;
}

// Mixture evaluated on every cube center, rescaled so max |value| = 1.
std::vector<double> normalized_mixture(const GridSpec& grid, const std::vector<Mode>& modes, double time) {
  std::vector<double> out(grid.cube_count(), 0.0);
  double peak = 0.0;
  for (std::size_t c = 0; c < out.size(); ++c) {
    const Vec3 x = grid.center(c);
    double v = 0.0;
    for (const auto& m : modes) v += m.amplitude * std::sin(m.wavevector.dot(x) + m.omega * time + m.phase);
    out[c] = v;
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 0.0) {
    for (double& v : out) v /= peak;
  }
  return out;
}

}  // namespace

std::string_view to_string(Scenario s) noexcept { return s == Scenario::planar ? "2D" : "3D"; }

Scenario parse_scenario(std::string_view text) {
  if (text == "2D" || text == "2d" || text == "planar") return Scenario::planar;
  if (text == "3D" || text == "3d" || text == "volumetric") return Scenario::volumetric;
  throw InputError("unknown scenario '" + std::string(text) + "' (expected 2D or 3D)");
}

WindField generate_wind(const GridSpec& grid, Scenario scenario, const FieldConfig& config, std::uint64_t seed) {
  const auto modes = draw_modes(grid, scenario, 3, mix_seed(seed, 2));
  const auto psi = normalized_mixture(grid, modes, 0.0);

  Rng pocket_rng(mix_seed(seed, 3));
  const Vec3 lo = grid.center(std::size_t{0});
  const Vec3 hi = grid.center(grid.cube_count() - 1);
  Vec3 pocket;
  for (int a = 0; a < 3; ++a) pocket[a] = pocket_rng.uniform(lo[a], hi[a]);

  std::vector<double> speeds(grid.cube_count());
  for (std::size_t c = 0; c < speeds.size(); ++c) {
    const Vec3 x = grid.center(c);
    double u = config.wind_mean * (1.0 + config.wind_variation * psi[c]);
    if (scenario == Scenario::volumetric) u *= std::pow((std::max(x.z(), 0.0) + 5.0) / 25.0, 0.25);
    Vec3 r = x - pocket;
    if (scenario == Scenario::planar) r.z() = 0.0;
    const double w = config.pocket_width;
    u *= 1.0 - config.pocket_depth * std::exp(-r.squaredNorm() / (2.0 * w * w));
    speeds[c] = std::max(u, 0.0);
  }
  return WindField(std::move(speeds));
}

SyntheticField generate_field(const GridSpec& grid, const PlumeParams& plume, Scenario scenario,
                              const FieldConfig& config, std::uint64_t seed) {
  plume.validate();
  if (!(config.perturbation >= 0.0 && config.perturbation < 1.0)) {
    throw std::invalid_argument("perturbation amplitude must lie in [0, 1)");
  }
  if (!(config.c_base >= 0.0) || !(config.plume_scale >= 0.0)) {
    throw std::invalid_argument("c_base and plume_scale must be non-negative");
  }
  if (scenario == Scenario::planar && !grid.planar()) {
    throw std::invalid_argument("planar scenario needs a grid with nz = 1");
  }

  SyntheticField field{grid, scenario, config.perturbation > 0.0 ? FieldKind::plume_with_perturbation : FieldKind::plume,
                       {}, {}, generate_wind(grid, scenario, config, seed), seed};
  field.profile.resize(grid.cube_count());
  std::vector<double> plume_part(grid.cube_count());
  for (std::size_t c = 0; c < grid.cube_count(); ++c) {
    plume_part[c] = config.plume_scale * revised_gpm(grid.center(c), field.wind.raw(c), plume);
    field.profile[c] = config.c_base + plume_part[c];
  }
  field.truth = field.profile;
  if (config.perturbation > 0.0) {
    // the disturbance rides on the plume contribution; the background stays put
    const auto modes = draw_modes(grid, scenario, 6, mix_seed(seed, 1));
    const auto phi = normalized_mixture(grid, modes, config.time);
    for (std::size_t c = 0; c < field.truth.size(); ++c) field.truth[c] += config.perturbation * phi[c] * plume_part[c];
  }
  return field;
}

SyntheticField generate_field(const GridSpec& grid, const PlumeParams& plume, Scenario scenario, double perturbation,
                              std::uint64_t seed) {
  FieldConfig config;
  config.perturbation = perturbation;
  return generate_field(grid, plume, scenario, config, seed);
}

SyntheticField scaled(SyntheticField field, double factor) {
  for (double& v : field.truth) v *= factor;
  for (double& v : field.profile) v *= factor;
  return field;
}

void BatteryModel::validate() const {
  if (!(budget > 0.0)) throw std::invalid_argument("battery budget must be positive");
  if (!(hover_time >= 0.0) || !(flight_minutes > 0.0) || !(speed > 0.0)) {
    throw std::invalid_argument("battery hover_time, flight_minutes and speed must be positive");
  }
  if (!(hover_power >= 0.0) || !(travel_power >= 0.0) || !(mean_power() > 0.0)) {
    throw std::invalid_argument("battery powers must be non-negative and not both zero");
  }
  if (hover_energy() > budget_energy()) {
    std::ostringstream os;
    os << "battery budget " << budget << " charge(s) (" << budget_energy() << " energy units) cannot cover a single "
       << hover_time << " s hover (" << hover_energy() << ")";
    throw InfeasibleError(os.str());
  }
}

Trajectory make_trajectory(const GridSpec& grid, std::size_t start, std::vector<std::size_t> order,
                           const BatteryModel& battery) {
  Trajectory t;
  t.start = start;
  Vec3 at = grid.center(start);
  t.total_cost = 0.0;
  for (std::size_t c : order) {
    const Vec3 next = grid.center(c);
    const double d = (next - at).norm();
    t.leg_distances.push_back(d);
    t.leg_costs.push_back(battery.travel_energy(d));
    t.total_cost += t.leg_costs.back() + battery.hover_energy();
    at = next;
  }
  t.cubes = std::move(order);
  return t;
}

double trajectory_cost(const Trajectory& traj, const BatteryModel& battery) {
  double travel = 0.0;
  for (double d : traj.leg_distances) travel += d / battery.speed * battery.travel_power;
  const double hover = static_cast<double>(traj.cubes.size()) * battery.hover_time * battery.hover_power;
  return (travel + hover) / battery.charge_energy();
}

MeasurementSource MeasurementSource::synthetic(SyntheticField field, double sensor_error, std::uint64_t seed) {
  if (!(sensor_error >= 0.0 && sensor_error < 1.0)) throw std::invalid_argument("sensor_error must lie in [0, 1)");
  MeasurementSource src(field.grid, field.wind);
  src.values_.assign(field.truth.begin(), field.truth.end());
  src.sensor_error_ = sensor_error;
  src.seed_ = seed;
  return src;
}

MeasurementSource MeasurementSource::replay(const GridSpec& grid, std::vector<std::optional<double>> values,
                                            WindField wind) {
  if (values.size() != grid.cube_count() || wind.size() != grid.cube_count()) {
    throw std::invalid_argument("replay source: value and wind counts must equal the cube count");
  }
  MeasurementSource src(grid, std::move(wind));
  src.values_ = std::move(values);
  src.replay_ = true;
  return src;
}

double MeasurementSource::noise(std::size_t cube, std::uint64_t epoch) const {
  if (sensor_error_ == 0.0) return 0.0;
  Rng rng(mix_seed(mix_seed(seed_, epoch), cube));
  return sensor_error_ * rng.uniform(-1.0, 1.0);
}

Sample MeasurementSource::measure(std::size_t cube, std::uint64_t epoch) const {
  if (cube >= grid_.cube_count()) throw std::out_of_range("measure: cube outside grid");
  const auto& value = values_[cube];
  if (!value) {
    const auto idx = grid_.index(cube);
    throw InputError("no recorded value at cube (" + std::to_string(idx.i) + "," + std::to_string(idx.j) + "," +
                     std::to_string(idx.k) + ")");
  }
  Sample s;
  s.position = grid_.center(cube);
  s.wind = wind_.raw(cube);
  s.aqi = *value * (1.0 + noise(cube, epoch));
  return s;
}

Sample MeasurementSource::measure(const Cube& cube, std::uint64_t epoch) const {
  return measure(grid_.linear(cube.index), epoch);
}

std::optional<double> MeasurementSource::truth(std::size_t cube) const { return values_.at(cube); }

}  // namespace aqmap
