#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "aqmap/grid.hpp"
#include "aqmap/plume.hpp"

namespace aqmap {

enum class Activation { sigmoid, tanh, gaussian };

std::string_view to_string(Activation a) noexcept;
Activation parse_activation(std::string_view name);

/// Number of model inputs: x, y, z and wind speed.
inline constexpr std::size_t kModelInputs = 4;

/// Fixed random-feature hidden layer.
///
/// Inputs are mapped to roughly [-1, 1] per coordinate with
/// `(X - input_offset) .* input_scale` before the affine map `W X + b`.
struct HiddenLayer {
  Eigen::MatrixXd weights;  // K x m, unit-norm rows
  Eigen::VectorXd biases;   // K
  Activation activation = Activation::sigmoid;
  Eigen::VectorXd input_offset;
  Eigen::VectorXd input_scale;
  std::uint64_t seed = 0;

  std::size_t neurons() const noexcept { return static_cast<std::size_t>(weights.rows()); }
  std::size_t inputs() const noexcept { return static_cast<std::size_t>(weights.cols()); }

  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
  Eigen::VectorXd features(const Eigen::VectorXd& x) const;

  /// d features / d x, a K x m matrix (chain rule through the normalisation).
  Eigen::MatrixXd feature_jacobian(const Eigen::VectorXd& x) const;
};

/// Seeded hidden layer: weights uniform in [-1, 1] then row-normalised,
/// biases uniform in [-1, 1], identity input normalisation.
HiddenLayer init_hidden(std::size_t neurons, std::size_t inputs, std::uint64_t seed,
                        Activation activation = Activation::sigmoid);

/// Sets the input normalisation from the bounding box of `samples`.
void fit_input_scaling(HiddenLayer& layer, const SampleSet& samples);

/// Model input vector (x, y, z, effective wind).
Eigen::Vector4d model_input(const Vec3& pos, double wind, double wind_floor);

struct GpmNnModel {
  HiddenLayer hidden;
  Eigen::VectorXd beta;  // K hidden weights, then plume weight, then constant
  PlumeParams plume;
  double c_static = 0.0;
  double noise_sigma = 0.0;
  double rcond = 1e-6;   // relative singular-value cutoff for the pseudoinverse
  double update_rcond = 1e-2;  // cutoff for selective updates from few samples

  std::size_t neurons() const noexcept { return hidden.neurons(); }
  double plume_weight() const { return beta(static_cast<Eigen::Index>(neurons())); }
  double constant_weight() const { return beta(static_cast<Eigen::Index>(neurons()) + 1); }
};

/// Model with all output weights zero: predicts `c_static` everywhere.
GpmNnModel null_model(std::size_t neurons, const PlumeParams& plume, double c_static, std::uint64_t seed = 0);

struct FitOptions {
  std::size_t neurons = 1000;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  std::size_t max_iter = 100;
  double rcond = 1e-6;
  double update_rcond = 1e-2;
  Activation activation = Activation::sigmoid;
};

struct FitReport {
  double residual_s = 0.0;
  std::size_t iterations = 0;
  double h_estimate = 0.0;
  bool converged = false;
  double convexity_check = 0.0;
  bool underdetermined = false;
  bool rank_deficient = false;
  std::size_t newton_fallbacks = 0;
  std::vector<double> s_history;  // S after every half step (beta, then H)
};

/// N x (K+2) model output matrix: hidden activations, plume column, ones.
/// Throws InputError on non-finite sample values.
Eigen::MatrixXd design_matrix(const GpmNnModel& model, const SampleSet& samples);

struct BetaSolution {
  Eigen::VectorXd beta;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
  double condition = 0.0;  // ratio of largest to smallest retained singular value
};

/// Least-squares output weights via a truncated SVD. Rank-deficient systems
/// get the minimum-norm solution.
BetaSolution solve_beta(const Eigen::MatrixXd& J, const Eigen::VectorXd& targets, double rcond = 1e-10);

/// Full fit: fixed random hidden layer, then alternating pseudoinverse
/// (beta) and scalar Newton (H) steps. Refuses to run when the convexity
/// guard fails for the sample heights (GuardViolation).
std::pair<GpmNnModel, FitReport> fit(const SampleSet& samples, const PlumeParams& plume_init,
                                     const FitOptions& options = {});

std::pair<GpmNnModel, FitReport> fit(const SampleSet& samples, std::size_t neurons, const PlumeParams& plume_init,
                                     std::uint64_t seed, double tol = 1e-8, std::size_t max_iter = 100);

/// Re-solves beta with H, the hidden layer and c_static kept. The new beta
/// is the previous one plus the minimum-norm correction that best fits
/// `samples`, so cubes the samples say nothing about keep their old map.
/// Singular values below `update_rcond` (relative) are dropped: a handful of
/// samples cannot pin down a thousand hidden weights.
BetaSolution refit_beta(GpmNnModel& model, const SampleSet& samples);

double predict(const GpmNnModel& model, const Vec3& pos, double wind);

/// (dCf/dx, dCf/dy, dCf/dz, dCf/du) at a point.
Eigen::Vector4d predict_gradient(const GpmNnModel& model, const Vec3& pos, double wind);

/// Residual S with beta held at the model's values and source height `height`.
double residual_s(const GpmNnModel& model, const SampleSet& samples, double height);
double residual_s(const GpmNnModel& model, const SampleSet& samples);

/// Closed-form d2S/dH2 at fixed beta, written with the scaled plume weight
/// beta' = lambda beta_{K+1} (1 - 2Q) / sqrt(2 pi) as a sum of quadratics in
/// t_i = exp(-(z_i - H)^2 / (2 sigma_z^2)).
double residual_curvature_h(const GpmNnModel& model, const SampleSet& samples, double height);

/// Central second difference of S in H with step `step`.
double residual_second_difference(const GpmNnModel& model, const SampleSet& samples, double height,
                                  double step);

/// Minimum central second difference of S over a uniform grid of H values
/// spanning [0, H0]. Positive means S is numerically convex in H there.
double convexity_scan(const GpmNnModel& model, const SampleSet& samples, std::size_t grid_points = 64);

// Versioned JSON document ("aqmap.gpm-nn", version 1).
nlohmann::json model_to_json(const GpmNnModel& model);
GpmNnModel model_from_json(const nlohmann::json& doc);
std::string serialize_model(const GpmNnModel& model);
GpmNnModel parse_model(std::string_view text);

}  // namespace aqmap
