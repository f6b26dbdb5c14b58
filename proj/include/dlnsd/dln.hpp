#pragma once

// Variable-step DLN(theta) one-leg coefficients, G(theta)-norms and the
// constant-step BDF2 baseline.
//
// Index convention for every three-element array: [0] multiplies the oldest
// level x_{n-1}, [1] the current level x_n and [2] the new level x_{n+1}.

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace dlnsd {

/// Inner product used by the G-norm helpers. Must be symmetric positive
/// semi-definite.
using InnerProduct = std::function<double(std::span<const double>, std::span<const double>)>;

double euclidean_inner(std::span<const double> a, std::span<const double> b);

struct DlnCoefficients {
  double theta = 0.0;
  double eps = 0.0;
  std::array<double, 3> alpha{};
  std::array<double, 3> beta{};
  std::array<double, 3> lambda{};
  double k_n = 0.0;
  double k_prev = 0.0;
  /// alpha_2 k_n - alpha_0 k_{n-1}
  double k_hat = 0.0;
  /// t_{n,beta} - t_n
  double t_beta_offset = 0.0;
};

struct GNormWeights {
  double theta = 0.0;
  double w_new = 0.25;
  double w_old = 0.25;

  explicit GNormWeights(double theta);
};

/// Positive step sizes k_0..k_{N-1} starting at t0.
class StepSchedule {
 public:
  StepSchedule() = default;
  StepSchedule(double t0, std::vector<double> steps);

  static StepSchedule constant(double t0, double t_end, int count);

  double t0() const { return t0_; }
  const std::vector<double>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  double step(std::size_t n) const { return steps_.at(n); }
  /// t_n = t0 + sum_{j<n} k_j, for n in [0, size()].
  double time(std::size_t n) const { return times_.at(n); }
  const std::vector<double>& times() const { return times_; }
  double t_end() const { return times_.back(); }
  double max_step() const;

 private:
  double t0_ = 0.0;
  std::vector<double> steps_;
  std::vector<double> times_{0.0};
};

double step_ratio_epsilon(double k_n, double k_prev);

DlnCoefficients dln_coefficients(double theta, double k_n, double k_prev);

double g_norm_sq(std::span<const double> y, std::span<const double> z, double theta,
                 const InnerProduct& inner = euclidean_inner);

/// <sum alpha x, sum beta x> - (|(x_next,x_cur)|_G^2 - |(x_cur,x_prev)|_G^2 + |sum lambda x|^2).
double g_identity_residual(std::span<const double> x_prev, std::span<const double> x_cur,
                           std::span<const double> x_next, const DlnCoefficients& c,
                           const InnerProduct& inner = euclidean_inner);

/// Magnitude of the largest term in the G-identity, for relative residuals.
double g_identity_scale(std::span<const double> x_prev, std::span<const double> x_cur,
                        std::span<const double> x_next, const DlnCoefficients& c,
                        const InnerProduct& inner = euclidean_inner);

double one_leg_point(double t_prev, double t_cur, double t_next, const DlnCoefficients& c);

/// Difference-quotient weights of (3u^{n+1} - 4u^n + u^{n-1}) / (2k).
std::array<double, 3> bdf2_coefficients(double k);

/// sum_j w[j] * x_j over the three levels.
std::vector<double> combine(const std::array<double, 3>& w, std::span<const double> x_prev,
                            std::span<const double> x_cur, std::span<const double> x_next);

}  // namespace dlnsd
