#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aqmap/grid.hpp"

namespace aqmap {

/// Mean of 1 - |pred - truth| / truth. Unclipped: it goes negative once the
/// relative error exceeds 1. Throws InputError for a
/// non-positive truth or mismatched lengths.
double aea(std::span<const double> predicted, std::span<const double> truth);

/// Mean of ((pred - truth) / truth)^2, same preconditions as `aea`.
double err(std::span<const double> predicted, std::span<const double> truth);

/// Linear-interpolation baseline on the grid. Measured cubes are returned
/// unchanged. Elsewhere, every axis line through the cube that has a
/// measured cube on both sides contributes the linear interpolant between
/// the nearest pair; the contributions are averaged. Cubes with no such pair
/// take the nearest measured value (ties: lowest index). Needs at least one
/// measured cube.
std::vector<double> baseline_li(const GridSpec& grid, const std::vector<std::optional<double>>& measured);

struct MlrFit {
  std::vector<std::string> covariates;  // retained, in order
  Eigen::VectorXd coefficients;          // intercept first
  std::vector<std::string> warnings;
};

/// Multiple linear regression of AQI on (x, y, z, u) plus an intercept.
/// Collinear covariates are dropped, and with fewer than p + 2 samples the
/// trailing covariates are dropped until the system is overdetermined.
MlrFit fit_mlr(const SampleSet& samples, double wind_floor = WindField::kDefaultFloor);

double predict_mlr(const MlrFit& fit, const Vec3& pos, double wind, double wind_floor = WindField::kDefaultFloor);

/// Per-cube MLR predictions over the grid.
std::vector<double> baseline_mlr(const SampleSet& samples, const GridSpec& grid, const WindField& wind);

}  // namespace aqmap
