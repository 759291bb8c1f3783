#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aqmap/dataset.hpp"

namespace aqmap {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Welch unequal-variance t test of equal means, two-sided.
WelchResult welch_test(std::span<const double> a, std::span<const double> b);

/// Two-sided p value of H0: mu_a = mu_b (Welch). Each list needs >= 2 values.
double two_tailed_mean_test(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

struct ScreenInput {
  std::vector<std::string> names;  // one per covariate column
  Eigen::MatrixXd covariates;      // n x p
  Eigen::VectorXd response;        // n
};

/// OLS of the response on an intercept plus covariates, with a t test of
/// H0: beta_j = 0 per retained covariate. Covariates that are collinear
/// with earlier columns (or with the intercept) are dropped with a warning.
struct RegressionScreen {
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> p_values;
  double intercept = 0.0;
  double residual_sigma = 0.0;
  std::vector<std::string> dropped;
  std::vector<std::string> warnings;
};

RegressionScreen spatial_regression_screen(const ScreenInput& input);

/// Covariates available in a day: wind, x, y, z, plus temperature and
/// humidity when every row carries them.
ScreenInput screen_input_from_day(const DatasetDay& day);

/// Two-column CSV `parameter,p_value`.
std::string screen_csv(const RegressionScreen& screen);

}  // namespace aqmap
