#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace aqmap {

using Vec3 = Eigen::Vector3d;

struct CubeIndex {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  friend auto operator<=>(const CubeIndex&, const CubeIndex&) = default;
};

/// Regular cube lattice over the monitored volume.
///
/// Cubes are addressed either by a 3-index or by a linear index in row-major
/// order with x varying fastest: `linear = i + nx * (j + ny * k)`. Every
/// matrix, map and dataset in the library uses this ordering.
class GridSpec {
 public:
  using Dims = std::array<std::size_t, 3>;

  GridSpec(const Vec3& origin, double spacing, const Dims& dims);

  /// Grid whose cube centers sit on multiples of `spacing`, i.e. the first
  /// center is (0, 0, 0). This matches the coordinates of recorded datasets,
  /// where a planar scenario lives on the z = 0 plane.
  static GridSpec lattice(const Dims& dims, double spacing = 5.0);

  const Vec3& origin() const noexcept { return origin_; }
  double spacing() const noexcept { return spacing_; }
  const Dims& dims() const noexcept { return dims_; }
  std::size_t nx() const noexcept { return dims_[0]; }
  std::size_t ny() const noexcept { return dims_[1]; }
  std::size_t nz() const noexcept { return dims_[2]; }
  std::size_t cube_count() const noexcept { return dims_[0] * dims_[1] * dims_[2]; }
  bool planar() const noexcept { return dims_[2] == 1; }

  bool contains(const CubeIndex& idx) const noexcept;
  std::size_t linear(const CubeIndex& idx) const;
  CubeIndex index(std::size_t linear) const;

  Vec3 center(const CubeIndex& idx) const;
  Vec3 center(std::size_t linear) const { return center(index(linear)); }

  /// Cube containing `position`, or nullopt when it lies outside the grid.
  std::optional<CubeIndex> locate(const Vec3& position) const;

  /// Height of the topmost cube centers.
  double top_center_z() const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  Vec3 origin_;
  double spacing_;
  Dims dims_;
};

std::vector<Vec3> cube_centers(const GridSpec& grid);

/// 6-connected in-bounds neighbours. Throws std::out_of_range for an index
/// outside the grid.
std::vector<CubeIndex> neighbors(const GridSpec& grid, const CubeIndex& cube);

struct Cube {
  CubeIndex index;
  Vec3 center = Vec3::Zero();
  std::optional<double> aqi;
  std::optional<double> pdt;
};

Cube make_cube(const GridSpec& grid, const CubeIndex& index);

/// Per-cube wind speed with a lower clamp. The plume model divides by the
/// speed, so every evaluated speed is at least `floor`.
class WindField {
 public:
  static constexpr double kDefaultFloor = 0.1;

  WindField() = default;
  explicit WindField(std::vector<double> speeds, double floor = kDefaultFloor);
  static WindField uniform(std::size_t cubes, double speed, double floor = kDefaultFloor);

  std::size_t size() const noexcept { return speeds_.size(); }
  double floor() const noexcept { return floor_; }
  double raw(std::size_t cube) const { return speeds_.at(cube); }
  double effective(std::size_t cube) const;
  const std::vector<double>& speeds() const noexcept { return speeds_; }

 private:
  std::vector<double> speeds_;
  double floor_ = kDefaultFloor;
};

/// Clamps a raw speed to the floor.
inline double effective_wind(double raw, double floor) noexcept { return raw < floor ? floor : raw; }

struct Sample {
  Vec3 position = Vec3::Zero();
  double wind = 0.0;
  double aqi = 0.0;
};

using SampleSet = std::vector<Sample>;

}  // namespace aqmap
