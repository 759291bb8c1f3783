#include "aqmap/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aqmap {

GridSpec::GridSpec(const Vec3& origin, double spacing, const Dims& dims)
    : origin_(origin), spacing_(spacing), dims_(dims) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("grid spacing must be positive and finite");
  }
  if (!origin.allFinite()) throw std::invalid_argument("grid origin must be finite");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("grid dimensions must all be at least 1");
  }
}

GridSpec GridSpec::lattice(const Dims& dims, double spacing) {
  const double half = 0.5 * spacing;
  return GridSpec(Vec3(-half, -half, -half), spacing, dims);
}

bool GridSpec::contains(const CubeIndex& idx) const noexcept {
  return idx.i < dims_[0] && idx.j < dims_[1] && idx.k < dims_[2];
}

std::size_t GridSpec::linear(const CubeIndex& idx) const {
  if (!contains(idx)) {
    throw std::out_of_range("cube index (" + std::to_string(idx.i) + "," + std::to_string(idx.j) +
                            "," + std::to_string(idx.k) + ") outside grid");
  }
  return idx.i + dims_[0] * (idx.j + dims_[1] * idx.k);
}

CubeIndex GridSpec::index(std::size_t linear) const {
  if (linear >= cube_count()) throw std::out_of_range("linear cube index outside grid");
  const std::size_t plane = dims_[0] * dims_[1];
  return {linear % dims_[0], (linear % plane) / dims_[0], linear / plane};
}

Vec3 GridSpec::center(const CubeIndex& idx) const {
  if (!contains(idx)) throw std::out_of_range("cube index outside grid");
  return origin_ + spacing_ * Vec3(static_cast<double>(idx.i) + 0.5, static_cast<double>(idx.j) + 0.5,
                                   static_cast<double>(idx.k) + 0.5);
}

std::optional<CubeIndex> GridSpec::locate(const Vec3& position) const {
  std::array<std::size_t, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double t = std::floor((position[a] - origin_[a]) / spacing_);
    if (!(t >= 0.0) || t >= static_cast<double>(dims_[a])) return std::nullopt;
    idx[a] = static_cast<std::size_t>(t);
  }
  return CubeIndex{idx[0], idx[1], idx[2]};
}

double GridSpec::top_center_z() const noexcept {
  return origin_.z() + spacing_ * (static_cast<double>(dims_[2]) - 0.5);
}

std::vector<Vec3> cube_centers(const GridSpec& grid) {
  std::vector<Vec3> centers;
  centers.reserve(grid.cube_count());
  for (std::size_t n = 0; n < grid.cube_count(); ++n) centers.push_back(grid.center(n));
  return centers;
}

std::vector<CubeIndex> neighbors(const GridSpec& grid, const CubeIndex& cube) {
  if (!grid.contains(cube)) throw std::out_of_range("neighbors: cube index outside grid");
  std::vector<CubeIndex> out;
  const auto& dims = grid.dims();
  std::array<std::size_t, 3> c{cube.i, cube.j, cube.k};
  for (int axis = 0; axis < 3; ++axis) {
    if (c[axis] > 0) {
      auto n = c;
      --n[axis];
      out.push_back({n[0], n[1], n[2]});
    }
    if (c[axis] + 1 < dims[axis]) {
      auto n = c;
      ++n[axis];
      out.push_back({n[0], n[1], n[2]});
    }
  }
  return out;
}

Cube make_cube(const GridSpec& grid, const CubeIndex& index) {
  return Cube{index, grid.center(index), std::nullopt, std::nullopt};
}

WindField::WindField(std::vector<double> speeds, double floor) : speeds_(std::move(speeds)), floor_(floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("wind floor must be positive");
  for (double s : speeds_) {
    if (!std::isfinite(s) || s < 0.0) throw std::invalid_argument("wind speeds must be finite and non-negative");
  }
}

WindField WindField::uniform(std::size_t cubes, double speed, double floor) {
  return WindField(std::vector<double>(cubes, speed), floor);
}

double WindField::effective(std::size_t cube) const { return effective_wind(speeds_.at(cube), floor_); }

}  // namespace aqmap
