#pragma once

// Experiment driver: convergence studies on the unit-stack problem, the
// variable-step stability run on the pi-channel problem, error/rate
// bookkeeping and report emission.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlnsd/fem.hpp"
#include "dlnsd/sd_model.hpp"

namespace dlnsd {

struct ExperimentConfig {
  std::string experiment = "convergence";  // convergence | varstep | coeffs
  std::vector<double> thetas{0.2, 0.5, 0.7};
  ElementPair elements = ElementPair::mini();
  ViscousForm viscous = ViscousForm::Symmetric;
  std::vector<int> resolutions{10, 16, 22};
  std::vector<Scheme> schemes{Scheme::DLN};
  std::filesystem::path out_dir = "out";
  // varstep
  int mesh_divisions = 100;
  int computed_steps = 40;
  int sample_count = 101;
  bool write_vtk = true;

  /// Flat "key = value" text; '#' starts a comment. Unknown keys throw.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& file);
  /// Presets: convergence (MINI, n in {10,16,22}) or varstep (Taylor-Hood, 40 steps).
  static ExperimentConfig defaults_for(const std::string& experiment);

  void set(const std::string& key, const std::string& value);
  void validate() const;
};

/// (sum_n k_n e_{n+1}^2)^{1/2}; errors[n] is the spatial error at the end of step n.
double discrete_space_time_norm(std::span<const double> errors, std::span<const double> steps);

/// ln(e1/e2) / ln(dt1/dt2).
double convergence_rate(double e1, double e2, double dt1, double dt2);

constexpr std::size_t kErrorColumns = 5;
inline constexpr std::array<const char*, kErrorColumns> kErrorNames{
    "u_l2", "u_h1", "phi_l2", "phi_h1", "p_l2"};

struct ErrorRow {
  Scheme scheme = Scheme::DLN;
  double theta = 0.0;
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  std::array<double, kErrorColumns> err{};  // space-time norms, columns as kErrorNames
  double max_divergence = 0.0;
  double max_stage_residual = 0.0;
  int factorizations = 0;
  std::size_t dofs = 0;
  double wall_seconds = 0.0;  // not written to files
};

struct ErrorReport {
  std::vector<ErrorRow> rows;

  /// Rates against the previous row of the same (scheme, theta) series.
  std::vector<std::optional<std::array<double, kErrorColumns>>> rates() const;
  /// Rows of one series, in resolution order.
  std::vector<ErrorRow> series(Scheme s, double theta) const;
};

/// One convergence row: unit-stack problem on [0,1] with h = dt = 1/n.
ErrorRow run_convergence_case(Scheme scheme, double theta, int n, ElementPair elements,
                              ViscousForm viscous = ViscousForm::Symmetric);

ErrorReport run_convergence(const ExperimentConfig& cfg);

/// Step law for t beyond the constant start: 0.1 + 0.05 sin(10 t).
double varstep_law(double t);

/// k_n = 0.1 for n <= 10 and varstep_law(t_n) afterwards; the first step is
/// the start-up interval, so `computed_steps` DLN steps follow it.
StepSchedule varstep_schedule(int computed_steps, double t0 = 0.0);

struct VarstepRun {
  double theta = 0.0;
  EnergyLog energy;
  StabilityVerdict verdict;
  int factorizations = 0;
  double max_divergence = 0.0;
  double max_stage_residual = 0.0;
  double final_time = 0.0;
  double final_relative_error = 0.0;  // combined velocity + head L2, relative
  FieldErrors final_errors;
  double min_state_norm = 0.0, max_state_norm = 0.0;
  bool all_finite = true;
  std::size_t dofs = 0;
  double wall_seconds = 0.0;
};

struct VarstepReport {
  StepSchedule schedule;
  std::vector<VarstepRun> runs;
};

/// Runs the variable-step experiment; writes energy logs, line samples and
/// VTK snapshots below cfg.out_dir when `emit` is set.
VarstepReport run_varstep(const ExperimentConfig& cfg, bool emit = true);

// --- reports -----------------------------------------------------------------

/// theta,n,h,dt,err_*,rate_* with blank rates for the first row of a series
/// and a blank theta for BDF2 rows.
void write_convergence_csv(std::ostream& os, const ErrorReport& report);
void write_convergence_table(std::ostream& os, const ErrorReport& report, bool with_timing = false);
void write_varstep_summary_csv(std::ostream& os, const VarstepReport& report);
void write_schedule_csv(std::ostream& os, const StepSchedule& s);
/// DLN coefficients along a schedule, one row per computed step.
void write_coefficients_csv(std::ostream& os, const StepSchedule& s, std::span<const double> thetas);

/// Writes one convergence CSV and one aligned table per scheme into dir.
/// Throws std::runtime_error when dir cannot be created or written.
std::vector<std::filesystem::path> emit_outputs(const ErrorReport& report,
                                                const std::filesystem::path& dir);

}  // namespace dlnsd
