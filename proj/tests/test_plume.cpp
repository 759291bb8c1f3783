#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "aqmap/errors.hpp"
#include "aqmap/plume.hpp"
#include "support/oracles.hpp"

using namespace aqmap;

TEST(GaussianQ, Values) {
  EXPECT_DOUBLE_EQ(gaussian_q(0.0), 0.5);
  EXPECT_LE(gaussian_q(8.0), 1e-15);
  EXPECT_LE(gaussian_q(INFINITY), 1e-15);
  EXPECT_NEAR(gaussian_q(1.0), 0.158655, 1e-6);
  for (double t : {-2.0, -0.3, 0.7, 1.0, 2.5, 4.0}) {
    EXPECT_NEAR(gaussian_q(t), oracle::normal_tail(t), 1e-12) << t;
  }
}

TEST(ClassicPlume, OnAxis) {
  PlumeParams p;
  p.sigma_y = 10.0;
  p.sigma_z = 20.0;
  p.height = 15.0;
  const double u = 3.0;
  EXPECT_NEAR(classic_gpm(Vec3(0, 0, 15.0), p, 7.0, u), 7.0 / (2 * std::numbers::pi * 10 * 20 * u), 1e-15);
}

TEST(ClassicPlume, DoublingWindHalves) {
  PlumeParams p;
  const Vec3 pos(3, 4, 10);
  EXPECT_NEAR(classic_gpm(pos, p, 2.0, 4.0), 0.5 * classic_gpm(pos, p, 2.0, 2.0), 1e-15);
}

TEST(ClassicPlume, OneSigmaOff) {
  PlumeParams p;
  p.sigma_y = 10.0;
  p.sigma_z = 10.0;
  p.height = 20.0;
  const double v = classic_gpm(Vec3(0, 10.0, 30.0), p, 1.0, 1.0);
  EXPECT_NEAR(v, std::exp(-1.0) / (2 * std::numbers::pi * 100), 1e-15);
  EXPECT_NEAR(v, 5.855e-4, 1e-7);
  EXPECT_THROW(classic_gpm(Vec3(0, 0, 0), p, 1.0, 0.0), std::invalid_argument);
}

TEST(RevisedPlume, LongLineLimit) {
  PlumeParams p;
  p.lambda = 1.0;
  p.sigma_z = 10.0;
  p.length = 1e6;
  p.height = 20.0;
  EXPECT_NEAR(revised_gpm(Vec3(0, 0, 20.0), 1.0, p), 1.0 / (std::sqrt(2 * std::numbers::pi) * 10.0), 1e-15);
  EXPECT_NEAR(revised_gpm(Vec3(0, 0, 20.0), 1.0, p), 0.039894, 1e-6);
}

TEST(RevisedPlume, ZeroSource) {
  PlumeParams p;
  p.lambda = 0.0;
  EXPECT_EQ(revised_gpm(Vec3(1, 2, 3), 2.0, p), 0.0);
}

TEST(RevisedPlume, MatchesLineIntegral) {
  PlumeParams p;
  p.lambda = 1.0;
  p.length = 20.0;
  p.sigma_y = 50.0;
  p.sigma_z = 75.0;
  p.height = 5.0;
  const double closed = revised_gpm(Vec3(0, 0, 10.0), 2.0, p);
  const double quad = oracle::line_plume_quadrature(10.0, 2.0, 1.0, 20.0, 50.0, 75.0, 5.0);
  EXPECT_NEAR(closed / quad, 1.0, 1e-10);
}

TEST(RevisedPlume, NoHorizontalDependence) {
  const PlumeParams p;
  EXPECT_EQ(revised_gpm(Vec3(0, 0, 10), 2.0, p), revised_gpm(Vec3(40, -7, 10), 2.0, p));
}

TEST(RevisedPlume, WindBelowFloorIsClamped) {
  const PlumeParams p;
  EXPECT_EQ(revised_gpm(Vec3(0, 0, 10), 0.0, p), revised_gpm(Vec3(0, 0, 10), p.wind_floor, p));
  EXPECT_TRUE(wind_clamped(0.01, p));
  EXPECT_EQ(revised_gpm_grad(Vec3(0, 0, 10), 0.01, p)(3), 0.0);
}

TEST(PlumeGradient, ZeroAtSourceHeight) {
  const PlumeParams p;
  EXPECT_EQ(revised_gpm_grad(Vec3(3, 3, p.height), 2.0, p)(2), 0.0);
}

TEST(PlumeGradient, WindPartialAtUnitWind) {
  const PlumeParams p;
  const Vec3 pos(1, 2, 12.0);
  EXPECT_NEAR(revised_gpm_grad(pos, 1.0, p)(3), -revised_gpm(pos, 1.0, p), 1e-12);
}

TEST(PlumeGradient, MatchesCentralDifferences) {
  oracle::Stream rng(17);
  for (int n = 0; n < 200; ++n) {
    PlumeParams p;
    p.sigma_z = rng.uniform(10.0, 90.0);
    p.height = rng.uniform(0.0, 50.0);
    const double v[4] = {rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(0.5, 6.0)};
    const Eigen::Vector4d g = revised_gpm_grad(Vec3(v[0], v[1], v[2]), v[3], p);
    for (int a = 0; a < 4; ++a) {
      auto f = [&](double x) {
        double w[4] = {v[0], v[1], v[2], v[3]};
        w[a] = x;
        return revised_gpm(Vec3(w[0], w[1], w[2]), w[3], p);
      };
      const double fd = oracle::central_difference(f, v[a], 1e-5 * std::max(1.0, std::abs(v[a])));
      const double scale = std::max({std::abs(g(a)), std::abs(fd), 1e-9 * std::abs(f(v[a]))});
      EXPECT_LE(std::abs(g(a) - fd) / scale, 1e-6) << "axis " << a;
    }
    // height derivatives
    auto fh = [&](double h) {
      PlumeParams q = p;
      q.height = h;
      return revised_gpm(Vec3(v[0], v[1], v[2]), v[3], q);
    };
    auto fdh = [&](double h) {
      PlumeParams q = p;
      q.height = h;
      return revised_gpm_dh(Vec3(v[0], v[1], v[2]), v[3], q);
    };
    const double d1 = oracle::central_difference(fh, p.height, 1e-4);
    const double d2 = oracle::central_difference(fdh, p.height, 1e-4);
    const Vec3 pos(v[0], v[1], v[2]);
    EXPECT_NEAR(revised_gpm_dh(pos, v[3], p), d1, 1e-6 * std::max(std::abs(d1), 1e-6 * fh(p.height)));
    EXPECT_NEAR(revised_gpm_dh2(pos, v[3], p), d2, 1e-5 * std::max(std::abs(d2), 1e-6 * fh(p.height)));
  }
}

TEST(ConvexityGuard, Inequality) {
  PlumeParams p;  // sigma_z 75, H0 50
  EXPECT_FALSE(convexity_guard_violation(p, 50.0));
  p.sigma_z = 5.0;
  const auto msg = convexity_guard_violation(p, 50.0);
  ASSERT_TRUE(msg);
  EXPECT_NE(msg->find("sigma_z"), std::string::npos);
  EXPECT_THROW(require_convexity_guard(p, 50.0), GuardViolation);
  PlumeParams tall;
  tall.height_max = 60.0;  // 2 * 60^2 = 7200 > 75^2
  EXPECT_TRUE(convexity_guard_violation(tall, 0.0));
}

TEST(PlumeParams, Validation) {
  PlumeParams p;
  p.sigma_z = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = PlumeParams{};
  p.height = 60.0;  // above H0
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
