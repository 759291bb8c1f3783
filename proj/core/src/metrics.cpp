#include "aqmap/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>

#include "aqmap/errors.hpp"

namespace aqmap {

namespace {

void check_inputs(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw InputError("metric: prediction and truth lengths differ");
  if (truth.empty()) throw InputError("metric: no cubes");
  for (double t : truth) {
    if (!(t > 0.0)) throw InputError("metric: truth values must be positive");
  }
}

constexpr std::array<const char*, 4> kMlrNames{"x", "y", "z", "u"};

Eigen::Vector4d mlr_row(const Vec3& pos, double wind, double floor) {
  return {pos.x(), pos.y(), pos.z(), effective_wind(wind, floor)};
}

}  // namespace

double aea(std::span<const double> predicted, std::span<const double> truth) {
  check_inputs(predicted, truth);
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) total += 1.0 - std::abs(predicted[i] - truth[i]) / truth[i];
  return total / static_cast<double>(truth.size());
}

double err(std::span<const double> predicted, std::span<const double> truth) {
  check_inputs(predicted, truth);
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double r = (predicted[i] - truth[i]) / truth[i];
    total += r * r;
  }
  return total / static_cast<double>(truth.size());
}

std::vector<double> baseline_li(const GridSpec& grid, const std::vector<std::optional<double>>& measured) {
  if (measured.size() != grid.cube_count()) throw std::invalid_argument("baseline_li: value count differs from grid");
  std::vector<std::size_t> known;
  for (std::size_t c = 0; c < measured.size(); ++c) {
    if (measured[c]) known.push_back(c);
  }
  if (known.empty()) throw std::invalid_argument("baseline_li: needs at least one measured cube");

  const auto& dims = grid.dims();
  std::vector<double> out(measured.size());
  for (std::size_t c = 0; c < measured.size(); ++c) {
    if (measured[c]) {
      out[c] = *measured[c];
      continue;
    }
    const CubeIndex idx = grid.index(c);
    const std::array<std::size_t, 3> at{idx.i, idx.j, idx.k};
    double sum = 0.0;
    int count = 0;
    for (int axis = 0; axis < 3; ++axis) {
      auto probe = [&](std::size_t pos) {
        auto p = at;
        p[axis] = pos;
        return measured[grid.linear({p[0], p[1], p[2]})];
      };
      std::optional<double> lo_val;
      std::optional<double> hi_val;
      std::size_t lo_dist = 0;
      std::size_t hi_dist = 0;
      for (std::size_t d = 1; d <= at[axis]; ++d) {
        if (auto v = probe(at[axis] - d)) {
          lo_val = v;
          lo_dist = d;
          break;
        }
      }
      for (std::size_t d = 1; at[axis] + d < dims[axis]; ++d) {
        if (auto v = probe(at[axis] + d)) {
          hi_val = v;
          hi_dist = d;
          break;
        }
      }
      if (lo_val && hi_val) {
        const double w = static_cast<double>(lo_dist) / static_cast<double>(lo_dist + hi_dist);
        sum += *lo_val + (*hi_val - *lo_val) * w;
        ++count;
      }
    }
    if (count > 0) {
      out[c] = sum / count;
      continue;
    }
    const Vec3 here = grid.center(c);
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = known.front();
    for (std::size_t k : known) {
      const double d = (grid.center(k) - here).squaredNorm();
      if (d < best) {
        best = d;
        nearest = k;
      }
    }
    out[c] = *measured[nearest];
  }
  return out;
}

MlrFit fit_mlr(const SampleSet& samples, double wind_floor) {
  if (samples.empty()) throw std::invalid_argument("fit_mlr: no samples");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd cov(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    cov.row(i) = mlr_row(s.position, s.wind, wind_floor).transpose();
    y(i) = s.aqi;
  }

  MlrFit fit;
  std::vector<Eigen::Index> kept;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  for (Eigen::Index c = 0; c < 4; ++c) {
    if (x.cols() + 2 > n) {
      fit.warnings.push_back(std::string("too few samples; covariate '") + kMlrNames[static_cast<std::size_t>(c)] +
                             "' dropped");
      continue;
    }
    Eigen::MatrixXd trial(n, x.cols() + 1);
    trial << x, cov.col(c);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
    qr.setThreshold(1e-10);
    if (qr.rank() == trial.cols()) {
      x = std::move(trial);
      kept.push_back(c);
    } else {
      fit.warnings.push_back(std::string("covariate '") + kMlrNames[static_cast<std::size_t>(c)] +
                             "' is collinear; dropped");
    }
  }
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  fit.coefficients = Eigen::VectorXd::Zero(5);
  fit.coefficients(0) = beta(0);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    fit.coefficients(kept[k] + 1) = beta(static_cast<Eigen::Index>(k) + 1);
    fit.covariates.emplace_back(kMlrNames[static_cast<std::size_t>(kept[k])]);
  }
  return fit;
}

double predict_mlr(const MlrFit& fit, const Vec3& pos, double wind, double wind_floor) {
  return fit.coefficients(0) + fit.coefficients.tail(4).dot(mlr_row(pos, wind, wind_floor));
}

std::vector<double> baseline_mlr(const SampleSet& samples, const GridSpec& grid, const WindField& wind) {
  const MlrFit fit = fit_mlr(samples, wind.floor());
  std::vector<double> out(grid.cube_count());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = predict_mlr(fit, grid.center(c), wind.raw(c), wind.floor());
  return out;
}

}  // namespace aqmap
