#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dlnsd/dln.hpp"
#include "ode_reference.hpp"

using namespace dlnsd;

namespace {

// Direct transcription of the coefficient formulas, kept apart from the library.
struct RefCoeffs {
  double alpha[3], beta[3], lambda[3], k_hat;
};

RefCoeffs reference(double th, double k, double kp) {
  const double e = (k - kp) / (k + kp);
  const double d = (1 + e * th) * (1 + e * th);
  RefCoeffs r{};
  r.alpha[0] = (th - 1) / 2;
  r.alpha[1] = -th;
  r.alpha[2] = (th + 1) / 2;
  r.beta[2] = 0.25 * (1 + (1 - th * th) / d + e * e * th * (1 - th * th) / d + th);
  r.beta[1] = 0.5 * (1 - (1 - th * th) / d);
  r.beta[0] = 0.25 * (1 + (1 - th * th) / d - e * e * th * (1 - th * th) / d - th);
  r.lambda[1] = -std::sqrt(th * (1 - th * th)) / (std::sqrt(2.0) * (1 + e * th));
  r.lambda[2] = -(1 - e) / 2 * r.lambda[1];
  r.lambda[0] = -(1 + e) / 2 * r.lambda[1];
  r.k_hat = r.alpha[2] * k - r.alpha[0] * kp;
  return r;
}

}  // namespace

TEST(StepRatio, Examples) {
  EXPECT_DOUBLE_EQ(step_ratio_epsilon(0.1, 0.1), 0.0);
  EXPECT_NEAR(step_ratio_epsilon(0.15, 0.05), 0.5, 1e-15);
  EXPECT_NEAR(step_ratio_epsilon(0.05, 0.15), -0.5, 1e-15);
}

TEST(StepRatio, RejectsNonpositiveSteps) {
  EXPECT_THROW(step_ratio_epsilon(0.0, 1.0), std::domain_error);
  EXPECT_THROW(step_ratio_epsilon(1.0, -1.0), std::domain_error);
}

TEST(DlnCoefficients, MidpointAtThetaOne) {
  for (double kp : {0.01, 0.3, 2.0}) {
    const auto c = dln_coefficients(1.0, 0.1, kp);
    EXPECT_DOUBLE_EQ(c.alpha[0], 0.0);
    EXPECT_DOUBLE_EQ(c.alpha[1], -1.0);
    EXPECT_DOUBLE_EQ(c.alpha[2], 1.0);
    EXPECT_NEAR(c.beta[0], 0.0, 1e-15);
    EXPECT_NEAR(c.beta[1], 0.5, 1e-15);
    EXPECT_NEAR(c.beta[2], 0.5, 1e-15);
    for (double l : c.lambda) EXPECT_EQ(l, 0.0);
  }
}

TEST(DlnCoefficients, HalfThetaEqualSteps) {
  const auto c = dln_coefficients(0.5, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(c.alpha[0], -0.25);
  EXPECT_DOUBLE_EQ(c.alpha[1], -0.5);
  EXPECT_DOUBLE_EQ(c.alpha[2], 0.75);
  EXPECT_NEAR(c.beta[0], 0.3125, 1e-15);
  EXPECT_NEAR(c.beta[1], 0.125, 1e-15);
  EXPECT_NEAR(c.beta[2], 0.5625, 1e-15);
  EXPECT_NEAR(c.lambda[0], 0.21651, 1e-5);
  EXPECT_NEAR(c.lambda[1], -0.43301, 1e-5);
  EXPECT_NEAR(c.lambda[2], 0.21651, 1e-5);
  EXPECT_NEAR(c.k_hat, 1.0, 1e-15);
  EXPECT_NEAR(c.beta[0] + c.beta[1] + c.beta[2], 1.0, 1e-15);
}

TEST(DlnCoefficients, HalfThetaUnequalSteps) {
  const auto c = dln_coefficients(0.5, 0.15, 0.05);
  EXPECT_NEAR(c.eps, 0.5, 1e-15);
  EXPECT_NEAR(c.beta[0], 0.23, 1e-15);
  EXPECT_NEAR(c.beta[1], 0.26, 1e-15);
  EXPECT_NEAR(c.beta[2], 0.51, 1e-15);
  EXPECT_NEAR(c.k_hat, 0.125, 1e-15);
  const double lhs = c.alpha[2] * 0.15 * 0.15 + c.alpha[0] * 0.05 * 0.05;
  const double rhs = 2 * c.k_hat * (c.beta[2] * 0.15 - c.beta[0] * 0.05);
  EXPECT_NEAR(lhs, 0.01625, 1e-15);
  EXPECT_NEAR(lhs - rhs, 0.0, 1e-15);
  EXPECT_NEAR(c.t_beta_offset, c.beta[2] * 0.15 - c.beta[0] * 0.05, 1e-16);
}

TEST(DlnCoefficients, RejectsInvalidInputs) {
  EXPECT_THROW(dln_coefficients(-0.1, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(dln_coefficients(1.1, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(dln_coefficients(0.5, 0.0, 1.0), std::domain_error);
  EXPECT_THROW(dln_coefficients(0.5, 1.0, -2.0), std::domain_error);
}

TEST(DlnCoefficients, MatchesReferenceFormulas) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> th(0.0, 1.0), lk(-6.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double t = th(rng), k = std::pow(10.0, lk(rng)), kp = std::pow(10.0, lk(rng));
    const auto c = dln_coefficients(t, k, kp);
    const auto r = reference(t, k, kp);
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(c.alpha[j], r.alpha[j], 1e-14);
      EXPECT_NEAR(c.beta[j], r.beta[j], 1e-14);
      EXPECT_NEAR(c.lambda[j], r.lambda[j], 1e-14);
    }
    EXPECT_NEAR(c.k_hat, r.k_hat, 1e-13 * r.k_hat);
  }
}

TEST(DlnCoefficients, InvariantsOverRandomDraws) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> th(0.0, 1.0), lk(-6.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const double t = th(rng), k = std::pow(10.0, lk(rng)), kp = std::pow(10.0, lk(rng));
    const auto c = dln_coefficients(t, k, kp);
    EXPECT_LE(std::abs(c.alpha[0] + c.alpha[1] + c.alpha[2]), 1e-12);
    EXPECT_LE(std::abs(c.beta[0] + c.beta[1] + c.beta[2] - 1.0), 1e-12);
    const double kh = ((1 + t) * k + (1 - t) * kp) / 2;
    EXPECT_LE(std::abs(c.k_hat - kh), 1e-12 * kh);
    const double lhs = c.alpha[2] * k * k + c.alpha[0] * kp * kp;
    const double rhs = 2 * c.k_hat * (c.beta[2] * k - c.beta[0] * kp);
    const double scale = std::max({std::abs(lhs), c.alpha[2] * k * k, std::abs(c.alpha[0]) * kp * kp});
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * scale);
    EXPECT_LE(std::abs(c.lambda[2] + (1 - c.eps) / 2 * c.lambda[1]), 1e-12);
    EXPECT_LE(std::abs(c.lambda[0] + (1 + c.eps) / 2 * c.lambda[1]), 1e-12);
    EXPECT_GE(c.k_hat, (1 - t) * (k + kp) / 2 * (1 - 1e-12));
    EXPECT_LE(c.k_hat, (1 + t) * (k + kp) / 2 * (1 + 1e-12));
    EXPECT_GT(c.beta[2], 0.0);
    EXPECT_GT(c.eps, -1.0);
    EXPECT_LT(c.eps, 1.0);
  }
}

TEST(DlnCoefficients, PolynomialExactness) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.0, 1.0), k(0.01, 2.0), a(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = th(rng), kn = k(rng), kp = k(rng);
    const double t0 = a(rng), t1 = t0 + kp, t2 = t1 + kn;
    const auto c = dln_coefficients(t, kn, kp);
    const double tb = one_leg_point(t0, t1, t2, c);
    const double q0 = a(rng), q1 = a(rng), q2 = a(rng);
    auto y = [&](double s) { return q0 + q1 * s + q2 * s * s; };
    auto dy = [&](double s) { return q1 + 2 * q2 * s; };
    const double d = (c.alpha[0] * y(t0) + c.alpha[1] * y(t1) + c.alpha[2] * y(t2)) / c.k_hat;
    EXPECT_NEAR(d, dy(tb), 1e-10 * (1 + std::abs(dy(tb))));
    auto lin = [&](double s) { return q0 + q1 * s; };
    const double b = c.beta[0] * lin(t0) + c.beta[1] * lin(t1) + c.beta[2] * lin(t2);
    EXPECT_NEAR(b, lin(tb), 1e-12 * (1 + std::abs(lin(tb))));
  }
}

TEST(GNorm, Examples) {
  const std::vector<double> zero{0.0, 0.0}, two{2.0}, one{1.0};
  EXPECT_EQ(g_norm_sq(zero, zero, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(g_norm_sq(two, two, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(g_norm_sq(one, one, 1.0), 0.5);
}

TEST(GNorm, Weights) {
  for (double t : {0.0, 0.2, 0.5, 1.0}) {
    const GNormWeights w(t);
    EXPECT_GE(w.w_new, 0.25);
    EXPECT_GE(0.25, w.w_old);
    EXPECT_GE(w.w_old, 0.0);
    EXPECT_DOUBLE_EQ(w.w_new + w.w_old, 0.5);
  }
}

TEST(GNorm, DimensionMismatchThrows) {
  const std::vector<double> a{1.0, 2.0}, b{1.0};
  EXPECT_THROW(g_norm_sq(a, b, 0.5), std::invalid_argument);
  const auto c = dln_coefficients(0.5, 1.0, 1.0);
  EXPECT_THROW(g_identity_residual(a, a, b, c), std::invalid_argument);
}

TEST(GIdentity, LinearSequence) {
  const auto c = dln_coefficients(0.5, 1.0, 1.0);
  const std::vector<double> x0{1.0}, x1{2.0}, x2{3.0};
  const auto sa = combine(c.alpha, x0, x1, x2), sb = combine(c.beta, x0, x1, x2);
  EXPECT_NEAR(sa[0] * sb[0], 2.25, 1e-15);
  EXPECT_NEAR(g_norm_sq(x2, x1, 0.5), 3.875, 1e-15);
  EXPECT_NEAR(g_norm_sq(x1, x0, 0.5), 1.625, 1e-15);
  const auto sl = combine(c.lambda, x0, x1, x2);
  EXPECT_NEAR(sl[0], 0.0, 1e-15);
  EXPECT_NEAR(g_identity_residual(x0, x1, x2, c), 0.0, 1e-15);
}

TEST(GIdentity, CurvedSequence) {
  const auto c = dln_coefficients(0.5, 1.0, 1.0);
  const std::vector<double> x0{1.0}, x1{2.0}, x2{4.0};
  const auto sa = combine(c.alpha, x0, x1, x2), sb = combine(c.beta, x0, x1, x2);
  EXPECT_NEAR(sa[0] * sb[0], 4.921875, 1e-15);
  const auto sl = combine(c.lambda, x0, x1, x2);
  EXPECT_NEAR(sl[0] * sl[0], 0.046875, 1e-15);
  EXPECT_NEAR(g_norm_sq(x2, x1, 0.5) - g_norm_sq(x1, x0, 0.5), 4.875, 1e-15);
  EXPECT_NEAR(g_identity_residual(x0, x1, x2, c), 0.0, 1e-14);
}

TEST(GIdentity, RandomTrialsWithWeightedInner) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> th(0.0, 1.0), lk(-3.0, 1.0), v(-5.0, 5.0), w(0.1, 3.0);
  std::uniform_int_distribution<int> dim(1, 50);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng);
    std::vector<double> a(n), b(n), c(n), weights(n);
    for (int i = 0; i < n; ++i) {
      a[i] = v(rng);
      b[i] = v(rng);
      c[i] = v(rng);
      weights[i] = w(rng);
    }
    const InnerProduct inner = [&](std::span<const double> x, std::span<const double> y) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i] * y[i];
      return s;
    };
    const auto co = dln_coefficients(trial % 10 == 0 ? 1.0 : th(rng), std::pow(10.0, lk(rng)),
                                     std::pow(10.0, lk(rng)));
    const double r = g_identity_residual(a, b, c, co, inner);
    EXPECT_LE(std::abs(r), 1e-12 * g_identity_scale(a, b, c, co, inner));
  }
}

TEST(OneLegPoint, Examples) {
  EXPECT_NEAR(one_leg_point(0.0, 1.0, 3.0, dln_coefficients(1.0, 2.0, 1.0)), 2.0, 1e-15);
  EXPECT_NEAR(one_leg_point(0.0, 1.0, 2.0, dln_coefficients(0.5, 1.0, 1.0)), 1.25, 1e-15);
  EXPECT_NEAR(one_leg_point(0.0, 1.0, 2.0, dln_coefficients(0.0, 1.0, 1.0)), 1.0, 1e-15);
}

TEST(OneLegPoint, InsideInterval) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(0.0, 1.0), k(0.001, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double kp = k(rng), kn = k(rng);
    const double tb = one_leg_point(0.0, kp, kp + kn, dln_coefficients(th(rng), kn, kp));
    EXPECT_GT(tb, 0.0);
    EXPECT_LE(tb, kp + kn);
  }
}

TEST(OneLegPoint, InconsistentGridThrows) {
  const auto c = dln_coefficients(0.5, 1.0, 1.0);
  EXPECT_THROW(one_leg_point(0.0, 1.0, 2.5, c), std::invalid_argument);
  EXPECT_THROW(one_leg_point(1.0, 0.0, 2.0, c), std::invalid_argument);
}

TEST(Bdf2, Weights) {
  const auto a = bdf2_coefficients(1.0);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], -2.0);
  EXPECT_DOUBLE_EQ(a[2], 1.5);
  const auto b = bdf2_coefficients(0.5);
  EXPECT_DOUBLE_EQ(b[0], 1.0);
  EXPECT_DOUBLE_EQ(b[1], -4.0);
  EXPECT_DOUBLE_EQ(b[2], 3.0);
  EXPECT_THROW(bdf2_coefficients(0.0), std::domain_error);
}

TEST(Bdf2, ExactOnQuadratics) {
  const auto a = bdf2_coefficients(1.0);
  EXPECT_DOUBLE_EQ(a[0] * 0.0 + a[1] * 1.0 + a[2] * 4.0, 4.0);
}

TEST(StepSchedule, TimesAndValidation) {
  const StepSchedule s(1.0, {0.5, 0.25, 0.25});
  EXPECT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s.time(0), 1.0);
  EXPECT_DOUBLE_EQ(s.time(2), 1.75);
  EXPECT_DOUBLE_EQ(s.t_end(), 2.0);
  EXPECT_DOUBLE_EQ(s.max_step(), 0.5);
  EXPECT_THROW(StepSchedule(0.0, {0.1, 0.0}), std::domain_error);
  const auto c = StepSchedule::constant(0.0, 1.0, 7);
  EXPECT_EQ(c.size(), 7u);
  EXPECT_EQ(c.t_end(), 1.0);
  for (double k : c.steps()) EXPECT_EQ(k, c.steps().front());
}

TEST(OdeConvergence, SecondOrderOnRandomSchedules) {
  for (double th : {0.2, 0.5, 0.7}) {
    const double order = testref::observed_dln_order(th, 17, 3, 6);
    EXPECT_NEAR(order, 2.0, 0.1) << "theta " << th;
  }
}
