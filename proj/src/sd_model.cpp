#include "dlnsd/sd_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dlnsd {

double CoupledSystem::a_form(std::span<const double> x, std::span<const double> y) const {
  return A.quadratic_form(x, y);
}

double CoupledSystem::inner0(std::span<const double> x, std::span<const double> y) const {
  return M.quadratic_form(x, y);
}

CoupledSystem assemble_coupled_system(TriMesh mesh, ElementPair pair, const PhysicalParams& params,
                                      const QuadratureRule& q) {
  params.validate();
  pair.validate();
  CoupledSystem sys;
  sys.mesh = std::move(mesh);
  sys.params = params;
  sys.dofs = build_dofmap(sys.mesh, pair);
  const auto& m = sys.mesh;
  const auto& d = sys.dofs;

  sys.M = assemble_mass(m, d, 1.0, params.g * params.S0, q);
  const SparseMatrix visc = params.viscous == ViscousForm::Symmetric
                                ? assemble_stokes_viscous(m, d, 2.0 * params.nu, q)
                                : assemble_vector_laplacian(m, d, params.nu, q);
  const SparseMatrix bjs = assemble_bjs(m, d, params.bjs_coefficient(), q);
  const SparseMatrix darcy = assemble_darcy(m, d, params.g, params.K, q);
  sys.A_skew = assemble_interface_coupling(m, d, params.g, q);
  {
    const std::array<const SparseMatrix*, 3> parts{&visc, &bjs, &darcy};
    const std::array<double, 3> ones{1.0, 1.0, 1.0};
    sys.A_sym = linear_combination(parts, ones);
  }
  {
    const std::array<const SparseMatrix*, 2> parts{&sys.A_sym, &sys.A_skew};
    const std::array<double, 2> ones{1.0, 1.0};
    sys.A = linear_combination(parts, ones);
  }
  sys.B = assemble_divergence(m, d, q);
  sys.Bt = sys.B.transposed();
  {
    const std::array<const SparseMatrix*, 2> parts{&sys.A, &sys.Bt};
    const std::array<double, 2> ones{1.0, 1.0};
    sys.A_Bt = linear_combination(parts, ones);
  }
  return sys;
}

const char* to_string(Scheme s) { return s == Scheme::DLN ? "dln" : "bdf2"; }

Scheme scheme_from_name(const std::string& name) {
  if (name == "dln" || name == "DLN") return Scheme::DLN;
  if (name == "bdf2" || name == "BDF2") return Scheme::BDF2;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected dln or bdf2)");
}

StageWeights dln_stage_weights(const DlnCoefficients& c, double t_prev, double t_cur, double t_next) {
  StageWeights w;
  for (int j = 0; j < 3; ++j) {
    w.a[j] = c.alpha[j] / c.k_hat;
    w.b[j] = c.beta[j];
  }
  w.k_eff = c.k_hat;
  w.t_eval = c.beta[0] * t_prev + c.beta[1] * t_cur + c.beta[2] * t_next;
  return w;
}

StageWeights bdf2_stage_weights(double k, double t_next) {
  StageWeights w;
  w.a = bdf2_coefficients(k);
  w.b = {0.0, 0.0, 1.0};
  w.k_eff = k;
  w.t_eval = t_next;
  return w;
}

std::vector<double> stage_rhs(const CoupledSystem& sys, const StageWeights& w,
                              std::span<const double> x_prev, std::span<const double> x_cur,
                              const std::array<const std::vector<double>*, 3>& loads) {
  const std::size_t n = sys.size();
  std::vector<double> rhs(n, 0.0), hist_a(n), hist_b(n);
  for (int j = 0; j < 3; ++j) {
    if (w.b[j] == 0.0) continue;
    if (!loads[j] || loads[j]->size() != n) throw std::invalid_argument("stage loads missing or mis-sized");
    for (std::size_t i = 0; i < n; ++i) rhs[i] += w.b[j] * (*loads[j])[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    hist_a[i] = w.a[0] * x_prev[i] + w.a[1] * x_cur[i];
    hist_b[i] = w.b[0] * x_prev[i] + w.b[1] * x_cur[i];
  }
  sys.M.multiply_add(hist_a, rhs, -1.0);
  sys.A_Bt.multiply_add(hist_b, rhs, -1.0);
  for (std::size_t i = sys.dofs.p_offset; i < n; ++i) rhs[i] = 0.0;
  return rhs;
}

namespace {

SparseMatrix eliminate_essential(const SparseMatrix& s, const std::vector<bool>& essential) {
  const auto& rp = s.row_ptr();
  const auto& ci = s.col_idx();
  const auto& va = s.values();
  std::vector<std::size_t> row_ptr(s.rows() + 1, 0), cols;
  std::vector<double> vals;
  cols.reserve(ci.size());
  vals.reserve(ci.size());
  for (std::size_t r = 0; r < s.rows(); ++r) {
    if (essential[r]) {
      cols.push_back(r);
      vals.push_back(1.0);
    } else {
      for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
        if (essential[ci[k]]) continue;
        cols.push_back(ci[k]);
        vals.push_back(va[k]);
      }
    }
    row_ptr[r + 1] = cols.size();
  }
  return SparseMatrix(s.rows(), s.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

}  // namespace

std::vector<double> StageSolver::solve(const StageWeights& w, std::span<const double> x_prev,
                                       std::span<const double> x_cur,
                                       const std::array<const std::vector<double>*, 3>& loads,
                                       std::span<const double> boundary_values) {
  const CoupledSystem& sys = *sys_;
  const std::size_t n = sys.size();
  if (x_prev.size() != n || x_cur.size() != n || boundary_values.size() != n)
    throw std::invalid_argument("stage state size does not match the system");
  if (!(w.b[2] > 0.0) && w.a[2] == 0.0) throw std::invalid_argument("degenerate stage weights");

  const std::array<double, 2> key{w.a[2], w.b[2]};
  if (!have_key_ || key != key_) {
    const std::array<const SparseMatrix*, 3> parts{&sys.M, &sys.A_Bt, &sys.B};
    const std::array<double, 3> scales{w.a[2], w.b[2], 1.0};
    full_ = linear_combination(parts, scales);
    reduced_ = eliminate_essential(full_, sys.dofs.essential);
    lu_ = std::make_unique<Factorization>(factorize(reduced_));
    key_ = key;
    have_key_ = true;
    ++factorizations_;
  }

  std::vector<double> rhs = stage_rhs(sys, w, x_prev, x_cur, loads);
  std::vector<double> g(n, 0.0);
  for (std::size_t i : sys.dofs.essential_dofs) g[i] = boundary_values[i];
  full_.multiply_add(g, rhs, -1.0);
  for (std::size_t i : sys.dofs.essential_dofs) rhs[i] = g[i];

  std::vector<double> x = lu_->solve(rhs);
  last_residual_ = relative_residual(reduced_, x, rhs);
  return x;
}

// --- energy ------------------------------------------------------------------

namespace {

double rel(double defect, std::initializer_list<double> terms) {
  double scale = 0.0;
  for (double t : terms) scale = std::max(scale, std::abs(t));
  return scale > 0.0 ? std::abs(defect) / scale : std::abs(defect);
}

}  // namespace

double EnergyEntry::identity_residual() const {
  return rel(time_term - (g_new - g_old + dissipation), {time_term, g_new, g_old, dissipation});
}

double EnergyEntry::budget_residual() const {
  const double defect = time_term + viscous_work + pressure_work - forcing_work - boundary_work;
  return rel(defect, {time_term, viscous_work, pressure_work, forcing_work, boundary_work, g_new, g_old});
}

StabilityVerdict energy_budget(const EnergyLog& log, double tolerance) {
  StabilityVerdict v;
  double bound = log.g_initial;
  double scale = std::abs(log.g_initial);
  for (const auto& e : log.entries) {
    const double vals[] = {e.g_new, e.g_old, e.dissipation, e.time_term, e.viscous_work,
                           e.interface_work, e.forcing_work, e.boundary_work, e.pressure_work};
    for (double x : vals)
      if (!std::isfinite(x)) v.all_finite = false;
    v.max_identity_residual = std::max(v.max_identity_residual, e.identity_residual());
    v.max_budget_residual = std::max(v.max_budget_residual, e.budget_residual());
    v.min_dissipation = std::min(v.min_dissipation, e.dissipation);
    if (e.viscous_work > 0.0)
      v.max_interface_ratio = std::max(v.max_interface_ratio, std::abs(e.interface_work) / e.viscous_work);
    bound += e.forcing_work + e.boundary_work - e.pressure_work;
    scale = std::max({scale, std::abs(e.forcing_work), std::abs(e.boundary_work),
                      std::abs(e.pressure_work), e.g_new});
    if (e.g_new > bound + tolerance * scale) {
      if (v.energy_bounded) {
        std::ostringstream os;
        os << "G-energy exceeds initial energy plus external work at level " << e.step;
        v.violations.push_back(os.str());
      }
      v.energy_bounded = false;
    }
  }
  if (!v.all_finite) v.violations.emplace_back("non-finite energy term");
  if (v.max_identity_residual > tolerance) v.violations.emplace_back("G-identity residual above tolerance");
  if (v.max_budget_residual > tolerance) v.violations.emplace_back("energy budget residual above tolerance");
  if (v.min_dissipation < 0.0) v.violations.emplace_back("negative numerical dissipation");
  v.ok = v.violations.empty();
  return v;
}

namespace {

struct Levels {
  std::span<const double> x0, x1, x2;
};

EnergyEntry energy_entry(const CoupledSystem& sys, Scheme scheme, double theta,
                         const DlnCoefficients* c, const StageWeights& w, Levels lv,
                         const std::array<const std::vector<double>*, 3>& loads) {
  const std::size_t n = sys.size();
  EnergyEntry e;
  e.k_eff = w.k_eff;

  std::vector<double> xb(n, 0.0), xa(n, 0.0), fb(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    xb[i] = w.b[0] * lv.x0[i] + w.b[1] * lv.x1[i] + w.b[2] * lv.x2[i];
    xa[i] = w.a[0] * lv.x0[i] + w.a[1] * lv.x1[i] + w.a[2] * lv.x2[i];
  }
  for (int j = 0; j < 3; ++j)
    if (w.b[j] != 0.0)
      for (std::size_t i = 0; i < n; ++i) fb[i] += w.b[j] * (*loads[j])[i];

  const auto M = [&](std::span<const double> a, std::span<const double> b) { return sys.inner0(a, b); };
  if (scheme == Scheme::DLN) {
    const GNormWeights gw(theta);
    e.g_new = gw.w_new * M(lv.x2, lv.x2) + gw.w_old * M(lv.x1, lv.x1);
    e.g_old = gw.w_new * M(lv.x1, lv.x1) + gw.w_old * M(lv.x0, lv.x0);
    const auto xl = combine(c->lambda, lv.x0, lv.x1, lv.x2);
    e.dissipation = M(xl, xl);
  } else {
    // 2<3a-4b+c, a> = |a|^2 + |2a-b|^2 - |b|^2 - |2b-c|^2 + |a-2b+c|^2
    const auto d2 = combine({0.0, -1.0, 2.0}, lv.x0, lv.x1, lv.x2);
    const auto d1 = combine({-1.0, 2.0, 0.0}, lv.x0, lv.x1, lv.x2);
    const auto dd = combine({1.0, -2.0, 1.0}, lv.x0, lv.x1, lv.x2);
    e.g_new = 0.25 * (M(lv.x2, lv.x2) + M(d2, d2));
    e.g_old = 0.25 * (M(lv.x1, lv.x1) + M(d1, d1));
    e.dissipation = 0.25 * M(dd, dd);
  }
  e.time_term = w.k_eff * M(xa, xb);
  e.viscous_work = w.k_eff * sys.A.quadratic_form(xb, xb);
  e.interface_work = w.k_eff * sys.A_skew.quadratic_form(xb, xb);
  e.forcing_work = w.k_eff * dot(fb, xb);
  e.pressure_work = w.k_eff * sys.B.quadratic_form(xb, xb);

  // Stage residual on essential rows: r = M xa + (A + B^T) xb - F_beta.
  std::vector<double> r(n, 0.0);
  sys.M.multiply_add(xa, r);
  sys.A_Bt.multiply_add(xb, r);
  double bw = 0.0;
  for (std::size_t i : sys.dofs.essential_dofs) bw += (r[i] - fb[i]) * xb[i];
  e.boundary_work = w.k_eff * bw;

  const auto div = sys.B.multiply(lv.x2);
  e.divergence = norm_inf(div);
  return e;
}

void check_state(const CoupledSystem& sys, const CoupledState& s, const char* what) {
  if (s.x.size() != sys.size())
    throw std::invalid_argument(std::string(what) + ": state size does not match the system");
}

std::vector<double> boundary_vector(const CoupledSystem& sys, const FieldSet& f, double t) {
  std::vector<double> g(sys.size(), 0.0);
  apply_essential_values(sys.mesh, sys.dofs, f, t, g);
  return g;
}

}  // namespace

CoupledState interpolate_state(const CoupledSystem& sys, const FieldSet& f, double t) {
  return {t, interpolate(sys.mesh, sys.dofs, f, t)};
}

CoupledState dln_step(const CoupledSystem& sys, const StageData& data, const CoupledState& prev2,
                      const CoupledState& prev, double theta, double t_next, StageSolver& solver) {
  check_state(sys, prev2, "dln_step");
  check_state(sys, prev, "dln_step");
  const double k_prev = prev.t - prev2.t, k = t_next - prev.t;
  if (!(k > 0.0) || !(k_prev > 0.0)) throw std::invalid_argument("dln_step: levels must increase in time");
  const auto c = dln_coefficients(theta, k, k_prev);
  const auto w = dln_stage_weights(c, prev2.t, prev.t, t_next);
  const auto f0 = assemble_load(sys.mesh, sys.dofs, prev2.t, data.load);
  const auto f1 = assemble_load(sys.mesh, sys.dofs, prev.t, data.load);
  const auto f2 = assemble_load(sys.mesh, sys.dofs, t_next, data.load);
  const auto g = boundary_vector(sys, data.boundary, t_next);
  return {t_next, solver.solve(w, prev2.x, prev.x, {&f0, &f1, &f2}, g)};
}

CoupledState bdf2_step(const CoupledSystem& sys, const StageData& data, const CoupledState& prev2,
                       const CoupledState& prev, double t_next, StageSolver& solver) {
  check_state(sys, prev2, "bdf2_step");
  check_state(sys, prev, "bdf2_step");
  const double k_prev = prev.t - prev2.t, k = t_next - prev.t;
  if (!(k > 0.0) || std::abs(k - k_prev) > 1e-12 * std::max(k, k_prev))
    throw std::invalid_argument("bdf2_step: requires a constant positive step");
  const auto w = bdf2_stage_weights(k, t_next);
  const auto f2 = assemble_load(sys.mesh, sys.dofs, t_next, data.load);
  const auto g = boundary_vector(sys, data.boundary, t_next);
  return {t_next, solver.solve(w, prev2.x, prev.x, {nullptr, nullptr, &f2}, g)};
}

CoupledState solve_steady(const CoupledSystem& sys, const StageData& data, double t) {
  StageSolver solver(sys);
  StageWeights w;
  w.b = {0.0, 0.0, 1.0};
  w.k_eff = 1.0;
  w.t_eval = t;
  const auto f = assemble_load(sys.mesh, sys.dofs, t, data.load);
  const auto g = boundary_vector(sys, data.boundary, t);
  const std::vector<double> zero(sys.size(), 0.0);
  return {t, solver.solve(w, zero, zero, {nullptr, nullptr, &f}, g)};
}

TransientResult run_transient(const CoupledSystem& sys, const StageData& data,
                              const StepSchedule& schedule, const CoupledState& start0,
                              const CoupledState& start1, const TransientOptions& opt,
                              const LevelObserver& observer) {
  check_state(sys, start0, "run_transient");
  check_state(sys, start1, "run_transient");
  if (schedule.size() < 1) throw std::invalid_argument("run_transient: empty schedule");
  if (opt.scheme == Scheme::DLN && !(opt.theta >= 0.0 && opt.theta <= 1.0))
    throw std::domain_error("run_transient: theta must lie in [0,1]");

  TransientResult res;
  res.energy.theta = opt.theta;
  res.energy.scheme = opt.scheme;
  StageSolver solver(sys);

  std::vector<CoupledState> window{start0, start1};
  window[0].t = schedule.time(0);
  window[1].t = schedule.time(1);
  if (opt.keep_trajectory) res.states = window;
  if (observer) {
    observer(0, window[0]);
    observer(1, window[1]);
  }

  std::array<std::vector<double>, 3> loads;
  loads[0] = assemble_load(sys.mesh, sys.dofs, window[0].t, data.load);
  loads[1] = assemble_load(sys.mesh, sys.dofs, window[1].t, data.load);
  bool first = true;

  for (std::size_t n = 1; n < schedule.size(); ++n) {
    const double t_prev = schedule.time(n - 1), t_cur = schedule.time(n), t_next = schedule.time(n + 1);
    StageWeights w;
    DlnCoefficients c;
    if (opt.scheme == Scheme::DLN) {
      c = dln_coefficients(opt.theta, schedule.step(n), schedule.step(n - 1));
      w = dln_stage_weights(c, t_prev, t_cur, t_next);
    } else {
      if (std::abs(schedule.step(n) - schedule.step(n - 1)) > 1e-12 * schedule.step(n))
        throw std::invalid_argument("run_transient: BDF2 requires a constant schedule (step " +
                                    std::to_string(n) + ")");
      w = bdf2_stage_weights(schedule.step(n), t_next);
    }
    loads[2] = assemble_load(sys.mesh, sys.dofs, t_next, data.load);
    const auto g = boundary_vector(sys, data.boundary, t_next);
    const std::array<const std::vector<double>*, 3> lp{&loads[0], &loads[1], &loads[2]};

    CoupledState next;
    try {
      next = {t_next, solver.solve(w, window[0].x, window[1].x, lp, g)};
    } catch (const std::exception& ex) {
      throw std::runtime_error("step " + std::to_string(n) + " (t = " + std::to_string(t_next) +
                               "): " + ex.what());
    }
    res.max_stage_residual = std::max(res.max_stage_residual, solver.last_residual());

    if (opt.log_energy) {
      EnergyEntry e = energy_entry(sys, opt.scheme, opt.theta, &c, w,
                                   {window[0].x, window[1].x, next.x}, lp);
      e.step = n + 1;
      e.t = t_next;
      e.stage_residual = solver.last_residual();
      if (first) res.energy.g_initial = e.g_old;
      res.energy.entries.push_back(e);
      res.max_divergence = std::max(res.max_divergence, e.divergence);
    } else {
      res.max_divergence = std::max(res.max_divergence, norm_inf(sys.B.multiply(next.x)));
    }
    first = false;

    if (observer) observer(n + 1, next);
    window[0] = std::move(window[1]);
    window[1] = next;
    loads[0] = std::move(loads[1]);
    loads[1] = std::move(loads[2]);
    if (opt.keep_trajectory) res.states.push_back(std::move(next));
  }
  if (!opt.keep_trajectory) res.states = std::move(window);
  res.factorizations = solver.factorization_count();
  return res;
}

TransientResult run_transient(const CoupledSystem& sys, const ManufacturedProblem& prob,
                              const StepSchedule& schedule, const TransientOptions& opt,
                              const LevelObserver& observer) {
  const StageData data{prob.load(true), prob.fields()};
  const auto s0 = interpolate_state(sys, data.boundary, schedule.time(0));
  const auto s1 = interpolate_state(sys, data.boundary, schedule.time(1));
  return run_transient(sys, data, schedule, s0, s1, opt, observer);
}

// --- output ------------------------------------------------------------------

namespace {

/// Scalar-space dof of each mesh vertex, or -1 when the vertex is outside the space.
std::vector<long> vertex_dofs(const TriMesh& mesh, const ScalarSpace& s) {
  std::vector<long> out(mesh.vertices.size(), -1);
  for (std::size_t c = 0; c < s.triangles.size(); ++c) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(s.triangles[c])];
    const auto cd = s.dofs_of_cell(static_cast<int>(c));
    for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(tri[k])] = cd[k];
  }
  return out;
}

}  // namespace

void write_state_vtk(std::ostream& os, const CoupledSystem& sys, const CoupledState& s,
                     const FieldSet* exact) {
  const auto& m = sys.mesh;
  const auto& d = sys.dofs;
  os << "# vtk DataFile Version 3.0\n";
  os << "coupled Stokes/Darcy state t=" << std::setprecision(12) << s.t << "\n";
  os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(15);
  os << "POINTS " << m.vertices.size() << " double\n";
  for (const auto& p : m.vertices) os << p.x << ' ' << p.y << " 0\n";
  os << "CELLS " << m.triangles.size() << ' ' << 4 * m.triangles.size() << "\n";
  for (const auto& t : m.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  os << "CELL_TYPES " << m.triangles.size() << "\n";
  for (std::size_t i = 0; i < m.triangles.size(); ++i) os << "5\n";
  os << "CELL_DATA " << m.triangles.size() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (auto r : m.region_of_triangle) os << (r == Region::Fluid ? 0 : 1) << "\n";

  const auto vu = vertex_dofs(m, d.velocity), vh = vertex_dofs(m, d.head), vp = vertex_dofs(m, d.pressure);
  os << "POINT_DATA " << m.vertices.size() << "\n";
  os << "VECTORS velocity double\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const double ux = vu[i] >= 0 ? s.x[d.u_dof(0, vu[i])] : 0.0;
    const double uy = vu[i] >= 0 ? s.x[d.u_dof(1, vu[i])] : 0.0;
    os << ux << ' ' << uy << " 0\n";
  }
  os << "SCALARS speed double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const double ux = vu[i] >= 0 ? s.x[d.u_dof(0, vu[i])] : 0.0;
    const double uy = vu[i] >= 0 ? s.x[d.u_dof(1, vu[i])] : 0.0;
    os << std::hypot(ux, uy) << "\n";
  }
  os << "SCALARS head double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    os << (vh[i] >= 0 ? s.x[d.phi_dof(vh[i])] : 0.0) << "\n";
  os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    os << (vp[i] >= 0 ? s.x[d.p_dof(vp[i])] : 0.0) << "\n";
  if (exact) {
    os << "VECTORS velocity_exact double\n";
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
      const Vec2 u = vu[i] >= 0 && exact->velocity ? exact->velocity(m.vertices[i], s.t) : Vec2{};
      os << u.x << ' ' << u.y << " 0\n";
    }
    os << "SCALARS head_exact double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
      os << (vh[i] >= 0 && exact->head ? exact->head(m.vertices[i], s.t) : 0.0) << "\n";
  }
}

void write_line_samples_csv(std::ostream& os, const CoupledSystem& sys, const CoupledState& s,
                            const FieldSet& exact, double x0, int count) {
  if (count < 2) throw std::invalid_argument("line sampling needs at least two points");
  const auto& dom = sys.mesh.domain;
  const double y0 = dom.porous.y0, y1 = dom.fluid.y1;
  os << "t,x,y,region,u_x,u_y,u_x_exact,u_y_exact,phi,phi_exact,p,p_exact\n";
  os << std::setprecision(12);
  for (int i = 0; i < count; ++i) {
    const double y = y0 + (y1 - y0) * i / (count - 1);
    const auto hit = sys.mesh.locate({x0, y});
    if (!hit) continue;
    const auto [tri, bary] = *hit;
    const Region r = sys.mesh.region_of_triangle[static_cast<std::size_t>(tri)];
    const Point p{x0, y};
    os << s.t << ',' << x0 << ',' << y << ',' << to_string(r) << ',';
    if (r == Region::Fluid) {
      const Vec2 u = eval_velocity(sys.mesh, sys.dofs, s.x, tri, bary);
      const Vec2 ue = exact.velocity ? exact.velocity(p, s.t) : Vec2{};
      const double ph = eval_pressure(sys.mesh, sys.dofs, s.x, tri, bary);
      const double pe = exact.pressure ? exact.pressure(p, s.t) : 0.0;
      os << u.x << ',' << u.y << ',' << ue.x << ',' << ue.y << ",,," << ph << ',' << pe << "\n";
    } else {
      const double h = eval_head(sys.mesh, sys.dofs, s.x, tri, bary);
      const double he = exact.head ? exact.head(p, s.t) : 0.0;
      os << ",,,," << h << ',' << he << ",,\n";
    }
  }
}

void write_energy_csv(std::ostream& os, const EnergyLog& log) {
  os << "scheme,theta,level,t,k_eff,g_new,g_old,dissipation,time_term,viscous_work,interface_work,"
        "forcing_work,boundary_work,pressure_work,identity_residual,budget_residual,divergence\n";
  os << std::setprecision(12);
  for (const auto& e : log.entries) {
    os << to_string(log.scheme) << ',' << log.theta << ',' << e.step << ',' << e.t << ',' << e.k_eff
       << ',' << e.g_new << ',' << e.g_old << ',' << e.dissipation << ',' << e.time_term << ','
       << e.viscous_work << ',' << e.interface_work << ',' << e.forcing_work << ','
       << e.boundary_work << ',' << e.pressure_work << ',' << e.identity_residual() << ','
       << e.budget_residual() << ',' << e.divergence << "\n";
  }
}

}  // namespace dlnsd
