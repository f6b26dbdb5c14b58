#include "dlnsd/dln.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dlnsd {

namespace {

void require_positive_step(double k, const char* what) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << k;
    throw std::domain_error(os.str());
  }
}

void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    std::ostringstream os;
    os << "theta must lie in [0,1], got " << theta;
    throw std::domain_error(os.str());
  }
}

void require_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
}

}  // namespace

double euclidean_inner(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

GNormWeights::GNormWeights(double th) : theta(th) {
  require_theta(th);
  w_new = 0.25 * (1.0 + th);
  w_old = 0.25 * (1.0 - th);
}

StepSchedule::StepSchedule(double t0, std::vector<double> steps)
    : t0_(t0), steps_(std::move(steps)) {
  times_.assign(steps_.size() + 1, t0_);
  for (std::size_t n = 0; n < steps_.size(); ++n) {
    require_positive_step(steps_[n], "time step");
    times_[n + 1] = times_[n] + steps_[n];
  }
}

StepSchedule StepSchedule::constant(double t0, double t_end, int count) {
  if (count < 1 || !(t_end > t0)) throw std::invalid_argument("invalid constant schedule");
  const double k = (t_end - t0) / count;
  StepSchedule s(t0, std::vector<double>(static_cast<std::size_t>(count), k));
  // Land exactly on t_end regardless of accumulated rounding.
  s.times_.back() = t_end;
  return s;
}

double StepSchedule::max_step() const {
  return steps_.empty() ? 0.0 : *std::max_element(steps_.begin(), steps_.end());
}

double step_ratio_epsilon(double k_n, double k_prev) {
  require_positive_step(k_n, "k_n");
  require_positive_step(k_prev, "k_prev");
  return (k_n - k_prev) / (k_n + k_prev);
}

DlnCoefficients dln_coefficients(double theta, double k_n, double k_prev) {
  require_theta(theta);
  const double eps = step_ratio_epsilon(k_n, k_prev);

  DlnCoefficients c;
  c.theta = theta;
  c.eps = eps;
  c.k_n = k_n;
  c.k_prev = k_prev;
  c.alpha = {(theta - 1.0) / 2.0, -theta, (theta + 1.0) / 2.0};

  const double one_m_t2 = 1.0 - theta * theta;
  const double denom = (1.0 + eps * theta) * (1.0 + eps * theta);
  const double q = one_m_t2 / denom;
  const double r = eps * eps * theta * one_m_t2 / denom;
  c.beta[2] = 0.25 * (1.0 + q + r + theta);
  c.beta[1] = 0.5 * (1.0 - q);
  c.beta[0] = 0.25 * (1.0 + q - r - theta);

  if (c.beta[2] <= 1e-10) {
    std::ostringstream os;
    os << "degenerate DLN stage: beta_2 = " << c.beta[2] << " for theta = " << theta
       << ", eps = " << eps;
    throw std::domain_error(os.str());
  }

  const double l1 = -std::sqrt(theta * one_m_t2) / (std::sqrt(2.0) * (1.0 + eps * theta));
  c.lambda = {-(1.0 + eps) / 2.0 * l1, l1, -(1.0 - eps) / 2.0 * l1};

  c.k_hat = c.alpha[2] * k_n - c.alpha[0] * k_prev;
  c.t_beta_offset = c.beta[2] * k_n - c.beta[0] * k_prev;
  return c;
}

double g_norm_sq(std::span<const double> y, std::span<const double> z, double theta,
                 const InnerProduct& inner) {
  require_same_size(y, z);
  const GNormWeights w(theta);
  return w.w_new * inner(y, y) + w.w_old * inner(z, z);
}

std::vector<double> combine(const std::array<double, 3>& w, std::span<const double> x_prev,
                            std::span<const double> x_cur, std::span<const double> x_next) {
  require_same_size(x_prev, x_cur);
  require_same_size(x_cur, x_next);
  std::vector<double> out(x_cur.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = w[0] * x_prev[i] + w[1] * x_cur[i] + w[2] * x_next[i];
  return out;
}

namespace {

struct IdentityTerms {
  double lhs, g_new, g_old, dissipation;
};

IdentityTerms identity_terms(std::span<const double> x_prev, std::span<const double> x_cur,
                             std::span<const double> x_next, const DlnCoefficients& c,
                             const InnerProduct& inner) {
  const auto a = combine(c.alpha, x_prev, x_cur, x_next);
  const auto b = combine(c.beta, x_prev, x_cur, x_next);
  const auto l = combine(c.lambda, x_prev, x_cur, x_next);
  return {inner(a, b), g_norm_sq(x_next, x_cur, c.theta, inner),
          g_norm_sq(x_cur, x_prev, c.theta, inner), inner(l, l)};
}

}  // namespace

double g_identity_residual(std::span<const double> x_prev, std::span<const double> x_cur,
                           std::span<const double> x_next, const DlnCoefficients& c,
                           const InnerProduct& inner) {
  const auto t = identity_terms(x_prev, x_cur, x_next, c, inner);
  return t.lhs - (t.g_new - t.g_old + t.dissipation);
}

double g_identity_scale(std::span<const double> x_prev, std::span<const double> x_cur,
                        std::span<const double> x_next, const DlnCoefficients& c,
                        const InnerProduct& inner) {
  const auto t = identity_terms(x_prev, x_cur, x_next, c, inner);
  return std::max({std::abs(t.lhs), t.g_new, t.g_old, t.dissipation});
}

double one_leg_point(double t_prev, double t_cur, double t_next, const DlnCoefficients& c) {
  const double k_n = t_next - t_cur;
  const double k_prev = t_cur - t_prev;
  const double tol = 1e-12 * std::max({1.0, std::abs(t_prev), std::abs(t_next)});
  if (!(k_n > 0.0) || !(k_prev > 0.0) || std::abs(k_n - c.k_n) > tol ||
      std::abs(k_prev - c.k_prev) > tol)
    throw std::invalid_argument("time grid inconsistent with DLN coefficients");
  return c.beta[2] * t_next + c.beta[1] * t_cur + c.beta[0] * t_prev;
}

std::array<double, 3> bdf2_coefficients(double k) {
  require_positive_step(k, "BDF2 step");
  return {0.5 / k, -2.0 / k, 1.5 / k};
}

}  // namespace dlnsd
