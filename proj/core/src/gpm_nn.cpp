#include "aqmap/gpm_nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/SVD>

#include "aqmap/errors.hpp"
#include "aqmap/rng.hpp"

namespace aqmap {

namespace {

double activate(Activation a, double x) {
  switch (a) {
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::tanh: return std::tanh(x);
    case Activation::gaussian: return std::exp(-x * x);
  }
  return 0.0;
}

double activate_derivative(Activation a, double x) {
  switch (a) {
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::gaussian: return -2.0 * x * std::exp(-x * x);
  }
  return 0.0;
}

Eigen::Index plume_column(const GpmNnModel& m) { return static_cast<Eigen::Index>(m.neurons()); }

void require_finite(const Sample& s) {
  if (!s.position.allFinite() || !std::isfinite(s.wind) || !std::isfinite(s.aqi)) {
    throw InputError("sample contains non-finite values");
  }
}

Eigen::MatrixXd hidden_block(const HiddenLayer& layer, const SampleSet& samples, double wind_floor) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd g(n, static_cast<Eigen::Index>(layer.neurons()));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& s = samples[static_cast<std::size_t>(r)];
    require_finite(s);
    g.row(r) = layer.features(model_input(s.position, s.wind, wind_floor)).transpose();
  }
  return g;
}

Eigen::VectorXd plume_values(const SampleSet& samples, const PlumeParams& plume) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    c(static_cast<Eigen::Index>(i)) = revised_gpm(samples[i].position, samples[i].wind, plume);
  }
  return c;
}

// S(H) with everything except the plume column folded into `rest`:
// S = sum (rest_i - w * C_i(H))^2.
struct HeightProblem {
  const SampleSet& samples;
  Eigen::VectorXd rest;
  double weight;
  PlumeParams plume;

  double value(double h) const {
    PlumeParams p = plume;
    p.height = h;
    double s = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double e = rest(static_cast<Eigen::Index>(i)) - weight * revised_gpm(samples[i].position, samples[i].wind, p);
      s += e * e;
    }
    return s;
  }

  // First and second derivative of S in H.
  std::pair<double, double> derivatives(double h) const {
    PlumeParams p = plume;
    p.height = h;
    double d1 = 0.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      const double e = rest(static_cast<Eigen::Index>(i)) - weight * revised_gpm(s.position, s.wind, p);
      const double f1 = weight * revised_gpm_dh(s.position, s.wind, p);
      const double f2 = weight * revised_gpm_dh2(s.position, s.wind, p);
      d1 += -2.0 * e * f1;
      d2 += 2.0 * (f1 * f1 - e * f2);
    }
    return {d1, d2};
  }
};

double golden_section(const HeightProblem& prob, double lo, double hi) {
  // Coarse scan to bracket the global minimum, then golden refinement.
  constexpr int kScan = 64;
  const double step = (hi - lo) / kScan;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kScan; ++k) {
    const double v = prob.value(lo + k * step);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double a = lo + std::max(0, best - 1) * step;
  double b = lo + std::min(kScan, best + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = prob.value(c);
  double fd = prob.value(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = prob.value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = prob.value(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return prob.value(mid) <= best_val ? mid : lo + best * step;
}

// Minimises S over H in [0, H0] starting from `h`. Returns the new height
// and whether the Newton iteration had to fall back to golden section.
std::pair<double, bool> minimize_height(const HeightProblem& prob, double h) {
  const double h_max = prob.plume.height_max;
  double x = h;
  bool newton_ok = true;
  for (int it = 0; it < 50; ++it) {
    const auto [d1, d2] = prob.derivatives(x);
    if (!(d2 > 0.0) || !std::isfinite(d1)) {
      newton_ok = false;
      break;
    }
    const double next = x - d1 / d2;
    if (!(next >= 0.0 && next <= h_max)) {
      newton_ok = false;
      break;
    }
    const double delta = std::abs(next - x);
    x = next;
    if (delta <= 1e-13 * (1.0 + h_max)) break;
  }
  if (newton_ok && prob.value(x) <= prob.value(h)) return {x, false};
  return {golden_section(prob, 0.0, h_max), true};
}

}  // namespace

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::gaussian: return "gaussian";
  }
  return "sigmoid";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "gaussian") return Activation::gaussian;
  throw InputError("unknown activation '" + std::string(name) + "'");
}

Eigen::VectorXd HiddenLayer::normalize(const Eigen::VectorXd& x) const {
  return (x - input_offset).cwiseProduct(input_scale);
}

Eigen::VectorXd HiddenLayer::features(const Eigen::VectorXd& x) const {
  Eigen::VectorXd pre = weights * normalize(x) + biases;
  for (Eigen::Index i = 0; i < pre.size(); ++i) pre(i) = activate(activation, pre(i));
  return pre;
}

Eigen::MatrixXd HiddenLayer::feature_jacobian(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd pre = weights * normalize(x) + biases;
  Eigen::MatrixXd jac = weights;
  for (Eigen::Index i = 0; i < pre.size(); ++i) jac.row(i) *= activate_derivative(activation, pre(i));
  return jac * input_scale.asDiagonal();
}

HiddenLayer init_hidden(std::size_t neurons, std::size_t inputs, std::uint64_t seed, Activation activation) {
  if (inputs == 0) throw std::invalid_argument("init_hidden: input dimensionality must be at least 1");
  const auto k = static_cast<Eigen::Index>(neurons);
  const auto m = static_cast<Eigen::Index>(inputs);
  HiddenLayer layer;
  layer.weights.resize(k, m);
  layer.biases.resize(k);
  layer.activation = activation;
  layer.input_offset = Eigen::VectorXd::Zero(m);
  layer.input_scale = Eigen::VectorXd::Ones(m);
  layer.seed = seed;

  Rng rng(seed);
  for (Eigen::Index r = 0; r < k; ++r) {
    double norm = 0.0;
    do {
      for (Eigen::Index c = 0; c < m; ++c) layer.weights(r, c) = rng.uniform(-1.0, 1.0);
      norm = layer.weights.row(r).norm();
    } while (norm < 1e-8);
    layer.weights.row(r) /= norm;
  }
  for (Eigen::Index r = 0; r < k; ++r) layer.biases(r) = rng.uniform(-1.0, 1.0);
  return layer;
}

void fit_input_scaling(HiddenLayer& layer, const SampleSet& samples) {
  const auto m = static_cast<Eigen::Index>(layer.inputs());
  layer.input_offset = Eigen::VectorXd::Zero(m);
  layer.input_scale = Eigen::VectorXd::Ones(m);
  if (samples.empty() || m != static_cast<Eigen::Index>(kModelInputs)) return;
  Eigen::Vector4d lo = Eigen::Vector4d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector4d hi = -lo;
  for (const auto& s : samples) {
    const Eigen::Vector4d x = model_input(s.position, s.wind, WindField::kDefaultFloor);
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  for (Eigen::Index c = 0; c < m; ++c) {
    const double range = hi(c) - lo(c);
    layer.input_offset(c) = 0.5 * (hi(c) + lo(c));
    // a coordinate the samples never vary (z in a planar day) is switched off
    layer.input_scale(c) = range > 1e-12 ? 2.0 / range : 0.0;
  }
}

Eigen::Vector4d model_input(const Vec3& pos, double wind, double wind_floor) {
  return {pos.x(), pos.y(), pos.z(), effective_wind(wind, wind_floor)};
}

GpmNnModel null_model(std::size_t neurons, const PlumeParams& plume, double c_static, std::uint64_t seed) {
  GpmNnModel m;
  m.hidden = init_hidden(neurons, kModelInputs, seed);
  m.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(neurons) + 2);
  m.plume = plume;
  m.c_static = c_static;
  return m;
}

Eigen::MatrixXd design_matrix(const GpmNnModel& model, const SampleSet& samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index k = plume_column(model);
  Eigen::MatrixXd j(n, k + 2);
  j.leftCols(k) = hidden_block(model.hidden, samples, model.plume.wind_floor);
  j.col(k) = plume_values(samples, model.plume);
  j.col(k + 1).setOnes();
  return j;
}

BetaSolution solve_beta(const Eigen::MatrixXd& J, const Eigen::VectorXd& targets, double rcond) {
  if (J.rows() != targets.size()) throw std::invalid_argument("solve_beta: row count differs from target count");
  if (!J.allFinite() || !targets.allFinite()) throw InputError("solve_beta: non-finite system");
  BetaSolution out;
  if (J.cols() == 0) {
    out.beta = Eigen::VectorXd(0);
    return out;
  }
  if (J.rows() == 0) {
    out.beta = Eigen::VectorXd::Zero(J.cols());
    out.rank_deficient = true;
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rcond);
  out.beta = svd.solve(targets);
  out.rank = svd.rank();
  out.rank_deficient = out.rank < J.cols();
  const auto& sv = svd.singularValues();
  out.condition = out.rank > 0 ? sv(0) / sv(out.rank - 1) : std::numeric_limits<double>::infinity();
  return out;
}

std::pair<GpmNnModel, FitReport> fit(const SampleSet& samples, const PlumeParams& plume_init,
                                     const FitOptions& options) {
  if (samples.size() < 2) throw InputError("fit needs at least 2 samples");
  for (const auto& s : samples) require_finite(s);
  plume_init.validate();

  double z_max = 0.0;
  for (const auto& s : samples) z_max = std::max(z_max, std::abs(s.position.z()));
  require_convexity_guard(plume_init, z_max);

  GpmNnModel model;
  model.plume = plume_init;
  model.plume.height = 0.5 * plume_init.height_max;
  model.rcond = options.rcond;
  model.update_rcond = options.update_rcond;
  model.hidden = init_hidden(options.neurons, kModelInputs, options.seed, options.activation);
  fit_input_scaling(model.hidden, samples);

  const auto n = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index k = plume_column(model);
  double mean = 0.0;
  for (const auto& s : samples) mean += s.aqi;
  model.c_static = mean / static_cast<double>(samples.size());
  Eigen::VectorXd targets(n);
  for (Eigen::Index i = 0; i < n; ++i) targets(i) = samples[static_cast<std::size_t>(i)].aqi - model.c_static;

  Eigen::MatrixXd j(n, k + 2);
  j.leftCols(k) = hidden_block(model.hidden, samples, model.plume.wind_floor);
  j.col(k + 1).setOnes();

  FitReport report;
  report.underdetermined = samples.size() < static_cast<std::size_t>(k + 2);
  const double floor = 1e-20 * (1.0 + targets.squaredNorm());

  auto beta_step = [&]() {
    j.col(k) = plume_values(samples, model.plume);
    const BetaSolution sol = solve_beta(j, targets, options.rcond);
    report.rank_deficient = sol.rank_deficient;
    model.beta = sol.beta;
    return (j * model.beta - targets).squaredNorm();
  };

  double s_prev = std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    const double s_beta = beta_step();
    report.s_history.push_back(s_beta);
    s = s_beta;

    const double w = model.beta(k);
    if (w != 0.0) {
      HeightProblem prob{samples, targets - j.leftCols(k) * model.beta.head(k) - Eigen::VectorXd::Constant(n, model.beta(k + 1)),
                         w, model.plume};
      const auto [h_new, fell_back] = minimize_height(prob, model.plume.height);
      if (fell_back) ++report.newton_fallbacks;
      const double s_h = prob.value(h_new);
      if (s_h <= s_beta) {
        model.plume.height = h_new;
        s = s_h;
      }
    }
    report.s_history.push_back(s);
    report.iterations = iter + 1;

    if (std::isfinite(s_prev) && std::abs(s_prev - s) <= options.tol * s_prev + floor) {
      report.converged = true;
      break;
    }
    s_prev = s;
  }

  // Leave beta optimal for the final height.
  s = beta_step();
  report.s_history.push_back(s);

  const Eigen::VectorXd resid = j * model.beta - targets;
  model.noise_sigma = std::sqrt((resid.array() - resid.mean()).square().sum() / static_cast<double>(n));

  report.residual_s = s;
  report.h_estimate = model.plume.height;
  report.convexity_check = convexity_scan(model, samples);
  return {std::move(model), std::move(report)};
}

std::pair<GpmNnModel, FitReport> fit(const SampleSet& samples, std::size_t neurons, const PlumeParams& plume_init,
                                     std::uint64_t seed, double tol, std::size_t max_iter) {
  FitOptions options;
  options.neurons = neurons;
  options.seed = seed;
  options.tol = tol;
  options.max_iter = max_iter;
  return fit(samples, plume_init, options);
}

BetaSolution refit_beta(GpmNnModel& model, const SampleSet& samples) {
  const Eigen::MatrixXd j = design_matrix(model, samples);
  Eigen::VectorXd targets(j.rows());
  for (Eigen::Index i = 0; i < j.rows(); ++i) targets(i) = samples[static_cast<std::size_t>(i)].aqi - model.c_static;
  BetaSolution sol = solve_beta(j, targets - j * model.beta, model.update_rcond);
  sol.beta += model.beta;
  model.beta = sol.beta;
  return sol;
}

double predict(const GpmNnModel& model, const Vec3& pos, double wind) {
  const Eigen::Index k = plume_column(model);
  double out = model.c_static + model.beta(k) * revised_gpm(pos, wind, model.plume) + model.beta(k + 1);
  if (k > 0) {
    out += model.beta.head(k).dot(model.hidden.features(model_input(pos, wind, model.plume.wind_floor)));
  }
  return out;
}

Eigen::Vector4d predict_gradient(const GpmNnModel& model, const Vec3& pos, double wind) {
  const Eigen::Index k = plume_column(model);
  Eigen::Vector4d grad = model.beta(k) * revised_gpm_grad(pos, wind, model.plume);
  if (k > 0) {
    Eigen::Vector4d hidden =
        model.hidden.feature_jacobian(model_input(pos, wind, model.plume.wind_floor)).transpose() * model.beta.head(k);
    if (wind_clamped(wind, model.plume)) hidden(3) = 0.0;
    grad += hidden;
  }
  return grad;
}

double residual_s(const GpmNnModel& model, const SampleSet& samples, double height) {
  GpmNnModel m = model;
  m.plume.height = height;
  const Eigen::MatrixXd j = design_matrix(m, samples);
  double s = 0.0;
  for (Eigen::Index i = 0; i < j.rows(); ++i) {
    const double e = samples[static_cast<std::size_t>(i)].aqi - m.c_static - j.row(i).dot(m.beta);
    s += e * e;
  }
  return s;
}

double residual_s(const GpmNnModel& model, const SampleSet& samples) {
  return residual_s(model, samples, model.plume.height);
}

double residual_curvature_h(const GpmNnModel& model, const SampleSet& samples, double height) {
  const Eigen::Index k = plume_column(model);
  const auto& p = model.plume;
  const double scaled_weight =
      p.lambda / std::sqrt(2.0 * std::numbers::pi) * model.beta(k) * line_source_factor(p);
  const double sz = p.sigma_z;
  const double sz2 = sz * sz;
  double total = 0.0;
  for (const auto& s : samples) {
    const double u = effective_wind(s.wind, p.wind_floor);
    double hidden = 0.0;
    if (k > 0) hidden = model.beta.head(k).dot(model.hidden.features(model_input(s.position, s.wind, p.wind_floor)));
    // Residual of everything except the plume term.
    const double rest = s.aqi - model.c_static - model.beta(k + 1) - hidden;
    const double d2 = (s.position.z() - height) * (s.position.z() - height);
    const double t = std::exp(-d2 / (2.0 * sz2));
    const double a = 2.0 * scaled_weight * scaled_weight * d2 / (u * u * sz2 * sz2 * sz2) -
                     scaled_weight * scaled_weight / (u * u * sz2 * sz2);
    const double b = rest * (scaled_weight / (u * sz2 * sz) - scaled_weight * d2 / (u * sz2 * sz2 * sz));
    total += a * t * t + b * t;
  }
  return 2.0 * total;
}

double residual_second_difference(const GpmNnModel& model, const SampleSet& samples, double height,
                                  double step) {
  const double lo = residual_s(model, samples, height - step);
  const double mid = residual_s(model, samples, height);
  const double hi = residual_s(model, samples, height + step);
  return (lo - 2.0 * mid + hi) / (step * step);
}

double convexity_scan(const GpmNnModel& model, const SampleSet& samples, std::size_t grid_points) {
  if (grid_points < 2) grid_points = 2;
  const double h0 = model.plume.height_max;
  const double step = h0 / static_cast<double>(grid_points - 1);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid_points; ++g) {
    worst = std::min(worst, residual_second_difference(model, samples, step * static_cast<double>(g), step));
  }
  return worst;
}

}  // namespace aqmap
