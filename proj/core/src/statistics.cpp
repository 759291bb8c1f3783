#include "aqmap/statistics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/QR>
#include <boost/math/distributions/students_t.hpp>

#include "aqmap/errors.hpp"

namespace aqmap {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased
};

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size() - 1);
  return m;
}

}  // namespace

double student_t_two_sided(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  if (!(df > 0.0)) throw std::invalid_argument("student t: degrees of freedom must be positive");
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

WelchResult welch_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InputError("two_tailed_mean_test needs at least 2 values per list");
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = ma.var / na;
  const double vb = mb.var / nb;
  WelchResult r;
  const double diff = ma.mean - mb.mean;
  if (va + vb == 0.0) {
    r.t = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.df = na + nb - 2.0;
    r.p = diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p = student_t_two_sided(r.t, r.df);
  return r;
}

double two_tailed_mean_test(std::span<const double> a, std::span<const double> b) { return welch_test(a, b).p; }

RegressionScreen spatial_regression_screen(const ScreenInput& input) {
  const Eigen::Index n = input.covariates.rows();
  const Eigen::Index p = input.covariates.cols();
  if (static_cast<std::size_t>(p) != input.names.size()) throw std::invalid_argument("screen: name count differs from columns");
  if (input.response.size() != n) throw std::invalid_argument("screen: response length differs from rows");
  if (n < p + 2) throw InputError("regression screen needs at least p + 2 samples");

  RegressionScreen out;
  // Greedy column selection: keep a covariate only if it raises the rank of
  // [1, kept...].
  std::vector<Eigen::Index> kept;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  for (Eigen::Index c = 0; c < p; ++c) {
    Eigen::MatrixXd trial(n, x.cols() + 1);
    trial << x, input.covariates.col(c);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
    qr.setThreshold(1e-10);
    if (qr.rank() == trial.cols()) {
      x = std::move(trial);
      kept.push_back(c);
    } else {
      out.dropped.push_back(input.names[static_cast<std::size_t>(c)]);
      out.warnings.push_back("covariate '" + input.names[static_cast<std::size_t>(c)] + "' is collinear; dropped");
    }
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::VectorXd beta = qr.solve(input.response);
  const Eigen::VectorXd resid = input.response - x * beta;
  const double dof = static_cast<double>(n - x.cols());
  const double sigma2 = resid.squaredNorm() / dof;
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();

  out.intercept = beta(0);
  out.residual_sigma = std::sqrt(sigma2);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k + 1);
    const double coef = beta(col);
    const double se = std::sqrt(std::max(sigma2 * xtx_inv(col, col), 0.0));
    double pval = 0.0;
    if (se > 0.0) {
      pval = student_t_two_sided(coef / se, dof);
    } else {
      // A perfect fit leaves no residual variance.
      pval = coef == 0.0 ? 1.0 : 0.0;
    }
    out.names.push_back(input.names[static_cast<std::size_t>(kept[k])]);
    out.coefficients.push_back(coef);
    out.std_errors.push_back(se);
    out.p_values.push_back(pval);
  }
  return out;
}

ScreenInput screen_input_from_day(const DatasetDay& day) {
  const auto n = static_cast<Eigen::Index>(day.rows.size());
  bool all_wind = true;
  bool all_temp = true;
  bool all_hum = true;
  for (const auto& r : day.rows) {
    all_wind = all_wind && r.has_wind;
    all_temp = all_temp && r.temperature.has_value();
    all_hum = all_hum && r.humidity.has_value();
  }
  ScreenInput in;
  std::vector<Eigen::VectorXd> cols;
  auto add = [&](const std::string& name, auto getter) {
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) c(i) = getter(day.rows[static_cast<std::size_t>(i)]);
    in.names.push_back(name);
    cols.push_back(std::move(c));
  };
  if (all_wind) add("wind", [](const DayRow& r) { return r.sample.wind; });
  add("x", [](const DayRow& r) { return r.sample.position.x(); });
  add("y", [](const DayRow& r) { return r.sample.position.y(); });
  add("z", [](const DayRow& r) { return r.sample.position.z(); });
  if (all_temp) add("temperature", [](const DayRow& r) { return *r.temperature; });
  if (all_hum) add("humidity", [](const DayRow& r) { return *r.humidity; });
  in.covariates.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) in.covariates.col(static_cast<Eigen::Index>(c)) = cols[c];
  in.response.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) in.response(i) = day.rows[static_cast<std::size_t>(i)].sample.aqi;
  return in;
}

std::string screen_csv(const RegressionScreen& screen) {
  std::ostringstream out;
  out.precision(17);
  out << "parameter,p_value\n";
  for (std::size_t i = 0; i < screen.names.size(); ++i) out << screen.names[i] << ',' << screen.p_values[i] << '\n';
  return out.str();
}

}  // namespace aqmap
