#pragma once

// Transient coupled Stokes/Darcy solver: stage systems for the variable-step
// DLN(theta) scheme and the constant-step BDF2 baseline, the time loop, and
// the per-step energy accounting.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dlnsd/dln.hpp"
#include "dlnsd/fem.hpp"
#include "dlnsd/mesh.hpp"
#include "dlnsd/problems.hpp"
#include "dlnsd/solver.hpp"
#include "dlnsd/sparse.hpp"

namespace dlnsd {

/// Assembled time-independent blocks over the full index space.
struct CoupledSystem {
  TriMesh mesh;
  DofMap dofs;
  PhysicalParams params;
  SparseMatrix M;        // (u,v)_f + g S0 (phi,psi)_p
  SparseMatrix A_sym;    // viscous + BJS + Darcy
  SparseMatrix A_skew;   // interface coupling
  SparseMatrix A;        // A_sym + A_skew
  SparseMatrix B;        // pressure rows, velocity columns
  SparseMatrix Bt;
  SparseMatrix A_Bt;     // A + B^T

  std::size_t size() const { return dofs.total; }
  /// a(x, y) with the pressure block of x, y ignored.
  double a_form(std::span<const double> x, std::span<const double> y) const;
  /// <x, y>_0 = x^T M y.
  double inner0(std::span<const double> x, std::span<const double> y) const;
};

CoupledSystem assemble_coupled_system(TriMesh mesh, ElementPair pair, const PhysicalParams& params,
                                      const QuadratureRule& q = default_quadrature());

/// Full coefficient vector x = [u_x | u_y | phi | p] at time t.
struct CoupledState {
  double t = 0.0;
  std::vector<double> x;

  std::span<const double> u(const DofMap& d) const { return {x.data() + d.u_offset, d.n_velocity()}; }
  std::span<const double> phi(const DofMap& d) const { return {x.data() + d.phi_offset, d.head.n_dofs}; }
  std::span<const double> p(const DofMap& d) const { return {x.data() + d.p_offset, d.pressure.n_dofs}; }
};

enum class Scheme { DLN, BDF2 };
const char* to_string(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Three-level stage weights: the time derivative sum_j a_j x_j and the
/// implicit evaluation sum_j b_j x_j (index 0 = oldest level).
struct StageWeights {
  std::array<double, 3> a{};
  std::array<double, 3> b{};
  double k_eff = 0.0;  // k_hat for DLN, k for BDF2
  double t_eval = 0.0;
};

StageWeights dln_stage_weights(const DlnCoefficients& c, double t_prev, double t_cur, double t_next);
StageWeights bdf2_stage_weights(double k, double t_next);

/// Boundary data and load for the stage: any member may be empty, in which
/// case homogeneous data is used.
struct StageData {
  LoadData load;
  FieldSet boundary;
};

/// Factorizes a2 M + b2 (A + B^T) + B with essential rows/columns eliminated;
/// refactorizes only when (a2, b2) changes.
class StageSolver {
 public:
  explicit StageSolver(const CoupledSystem& sys) : sys_(&sys) {}

  /// Solves the stage for the new level. `loads` are F(t_j) at the three
  /// levels with essential entries zeroed; `boundary_values` holds the
  /// new-level essential values (other entries ignored).
  std::vector<double> solve(const StageWeights& w, std::span<const double> x_prev,
                            std::span<const double> x_cur,
                            const std::array<const std::vector<double>*, 3>& loads,
                            std::span<const double> boundary_values);

  int factorization_count() const { return factorizations_; }
  /// Relative residual of the last linear solve.
  double last_residual() const { return last_residual_; }
  const SparseMatrix& full_matrix() const { return full_; }

 private:
  const CoupledSystem* sys_;
  std::array<double, 2> key_{0.0, 0.0};
  bool have_key_ = false;
  SparseMatrix full_;
  SparseMatrix reduced_;
  std::unique_ptr<Factorization> lu_;
  int factorizations_ = 0;
  double last_residual_ = 0.0;
};

/// Right side of the stage before boundary lifting:
/// sum_j b_j F_j - M (a_0 x_0 + a_1 x_1) - (A + B^T)(b_0 x_0 + b_1 x_1), zero on pressure rows.
std::vector<double> stage_rhs(const CoupledSystem& sys, const StageWeights& w,
                              std::span<const double> x_prev, std::span<const double> x_cur,
                              const std::array<const std::vector<double>*, 3>& loads);

struct EnergyEntry {
  std::size_t step = 0;       // index of the new level
  double t = 0.0;
  double k_eff = 0.0;
  double g_new = 0.0;         // |(x^{n+1}, x^n)|_G^2
  double g_old = 0.0;         // |(x^n, x^{n-1})|_G^2
  double dissipation = 0.0;   // |sum lambda_j x_j|_0^2
  double time_term = 0.0;     // <sum alpha x, sum beta x>_0
  double viscous_work = 0.0;  // k_hat a(x_beta, x_beta)
  double interface_work = 0.0;// k_hat a_Gamma(x_beta, x_beta)
  double forcing_work = 0.0;  // k_hat <F_beta, x_beta>
  double boundary_work = 0.0; // k_hat sum over essential dofs of residual * x_beta
  double pressure_work = 0.0; // k_hat p_beta^T B x_beta
  double divergence = 0.0;    // |B x^{n+1}|_inf
  double stage_residual = 0.0;

  /// time_term vs g_new - g_old + dissipation, relative.
  double identity_residual() const;
  /// Full balance of the stage equation tested with x_beta, relative.
  double budget_residual() const;
};

struct EnergyLog {
  double theta = 0.0;
  Scheme scheme = Scheme::DLN;
  double g_initial = 0.0;
  std::vector<EnergyEntry> entries;
};

struct StabilityVerdict {
  bool ok = true;
  double max_identity_residual = 0.0;
  double max_budget_residual = 0.0;
  double max_interface_ratio = 0.0;  // |interface_work| / viscous_work
  double min_dissipation = 0.0;
  bool energy_bounded = true;        // G_n <= G_1 + cumulative external work
  bool all_finite = true;
  std::vector<std::string> violations;
};

StabilityVerdict energy_budget(const EnergyLog& log, double tolerance = 1e-8);

struct TransientOptions {
  double theta = 0.5;
  Scheme scheme = Scheme::DLN;
  bool keep_trajectory = true;
  bool log_energy = true;
};

struct TransientResult {
  std::vector<CoupledState> states;  // all levels, or just the last two
  EnergyLog energy;
  int factorizations = 0;
  double max_divergence = 0.0;       // over computed levels
  double max_stage_residual = 0.0;
};

/// Observer called after each level is available (including the two start levels).
using LevelObserver = std::function<void(std::size_t level, const CoupledState& s)>;

/// Runs the schedule from two given start levels at schedule.time(0) and
/// schedule.time(1); computes levels 2..N.
TransientResult run_transient(const CoupledSystem& sys, const StageData& data,
                              const StepSchedule& schedule, const CoupledState& start0,
                              const CoupledState& start1, const TransientOptions& opt,
                              const LevelObserver& observer = {});

/// Same, with both start levels interpolated from the problem's exact solution
/// and the problem's load and boundary traces as stage data.
TransientResult run_transient(const CoupledSystem& sys, const ManufacturedProblem& prob,
                              const StepSchedule& schedule, const TransientOptions& opt,
                              const LevelObserver& observer = {});

/// Single DLN step from (prev2, prev) onto t_next.
CoupledState dln_step(const CoupledSystem& sys, const StageData& data, const CoupledState& prev2,
                      const CoupledState& prev, double theta, double t_next, StageSolver& solver);

/// Single BDF2 step; requires equal spacing of prev2, prev, t_next.
CoupledState bdf2_step(const CoupledSystem& sys, const StageData& data, const CoupledState& prev2,
                       const CoupledState& prev, double t_next, StageSolver& solver);

/// Steady coupled solve (no time derivative) with the given data at time t.
CoupledState solve_steady(const CoupledSystem& sys, const StageData& data, double t);

CoupledState interpolate_state(const CoupledSystem& sys, const FieldSet& f, double t);

// --- output ------------------------------------------------------------------

/// Legacy VTK with vertex values of velocity (fluid), head (porous) and pressure.
void write_state_vtk(std::ostream& os, const CoupledSystem& sys, const CoupledState& s,
                     const FieldSet* exact = nullptr);

/// CSV samples of discrete and exact fields along the vertical line x = x0.
void write_line_samples_csv(std::ostream& os, const CoupledSystem& sys, const CoupledState& s,
                            const FieldSet& exact, double x0, int count);

void write_energy_csv(std::ostream& os, const EnergyLog& log);

}  // namespace dlnsd
