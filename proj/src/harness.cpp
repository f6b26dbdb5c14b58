#include "dlnsd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dlnsd/problems.hpp"

namespace dlnsd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw std::invalid_argument("config key '" + key + "': not a number: '" + v + "'");
  return d;
}

int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d)) throw std::invalid_argument("config key '" + key + "': not an integer: '" + v + "'");
  return static_cast<int>(d);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': not a boolean: '" + v + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults_for(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "varstep") {
    c.elements = ElementPair::taylor_hood();
    c.resolutions = {};
  } else if (experiment != "convergence" && experiment != "coeffs") {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  return c;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "experiment") {
    *this = [&] {
      ExperimentConfig d = defaults_for(v);
      d.out_dir = out_dir;
      return d;
    }();
  } else if (key == "theta") {
    thetas.clear();
    for (const auto& s : split_list(v)) thetas.push_back(parse_double(key, s));
  } else if (key == "elements") {
    elements = ElementPair::from_name(v);
  } else if (key == "viscous") {
    viscous = viscous_form_from_name(v);
  } else if (key == "n") {
    resolutions.clear();
    for (const auto& s : split_list(v)) resolutions.push_back(parse_int(key, s));
  } else if (key == "scheme") {
    schemes.clear();
    for (const auto& s : split_list(v)) {
      if (s == "both") {
        schemes = {Scheme::DLN, Scheme::BDF2};
      } else {
        schemes.push_back(scheme_from_name(s));
      }
    }
  } else if (key == "out") {
    out_dir = v;
  } else if (key == "mesh_divisions") {
    mesh_divisions = parse_int(key, v);
  } else if (key == "steps") {
    computed_steps = parse_int(key, v);
  } else if (key == "samples") {
    sample_count = parse_int(key, v);
  } else if (key == "vtk") {
    write_vtk = parse_bool(key, v);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::validate() const {
  for (double t : thetas)
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("theta must lie in [0,1]");
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    if (resolutions[i] < 1) throw std::invalid_argument("resolutions must be positive");
    if (i > 0 && resolutions[i] <= resolutions[i - 1])
      throw std::invalid_argument("resolutions must be strictly increasing");
  }
  if (schemes.empty()) throw std::invalid_argument("no scheme selected");
  if (mesh_divisions < 1 || computed_steps < 1 || sample_count < 2)
    throw std::invalid_argument("varstep sizes must be positive");
  elements.validate();
}

double discrete_space_time_norm(std::span<const double> errors, std::span<const double> steps) {
  if (errors.size() != steps.size())
    throw std::invalid_argument("space-time norm: one error per step is required");
  double s = 0.0;
  for (std::size_t n = 0; n < steps.size(); ++n) s += steps[n] * errors[n] * errors[n];
  return std::sqrt(s);
}

double convergence_rate(double e1, double e2, double dt1, double dt2) {
  if (!(e1 > 0.0) || !(e2 > 0.0) || !(dt1 > 0.0) || !(dt2 > 0.0))
    throw std::domain_error("convergence rate needs positive errors and steps");
  if (dt1 == dt2) throw std::domain_error("convergence rate needs distinct steps");
  return std::log(e1 / e2) / std::log(dt1 / dt2);
}

std::vector<std::optional<std::array<double, kErrorColumns>>> ErrorReport::rates() const {
  std::vector<std::optional<std::array<double, kErrorColumns>>> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i; j-- > 0;) {
      const auto& a = rows[j];
      const auto& b = rows[i];
      if (a.scheme != b.scheme || a.theta != b.theta) continue;
      std::array<double, kErrorColumns> r{};
      for (std::size_t c = 0; c < kErrorColumns; ++c) r[c] = convergence_rate(a.err[c], b.err[c], a.dt, b.dt);
      out[i] = r;
      break;
    }
  }
  return out;
}

std::vector<ErrorRow> ErrorReport::series(Scheme s, double theta) const {
  std::vector<ErrorRow> out;
  for (const auto& r : rows)
    if (r.scheme == s && (s == Scheme::BDF2 || r.theta == theta)) out.push_back(r);
  std::sort(out.begin(), out.end(), [](const ErrorRow& a, const ErrorRow& b) { return a.n < b.n; });
  return out;
}

ErrorRow run_convergence_case(Scheme scheme, double theta, int n, ElementPair elements,
                              ViscousForm viscous) {
  const auto start = std::chrono::steady_clock::now();
  ManufacturedProblem prob = unit_stack_problem();
  prob.params.viscous = viscous;
  const CoupledSystem sys =
      assemble_coupled_system(build_coupled_mesh(prob.domain, n), elements, prob.params);
  const StepSchedule schedule = StepSchedule::constant(0.0, prob.t_end, n);
  const ExactFields exact = prob.exact();

  std::vector<std::array<double, kErrorColumns>> level_err(schedule.size() + 1);
  TransientOptions opt;
  opt.theta = theta;
  opt.scheme = scheme;
  opt.keep_trajectory = false;
  const auto res = run_transient(sys, prob, schedule, opt, [&](std::size_t level, const CoupledState& s) {
    if (level == 0) return;
    const FieldErrors e = field_error_norms(sys.mesh, sys.dofs, s.x, exact, s.t);
    level_err[level] = {e.velocity.l2, e.velocity.h1(), e.head.l2, e.head.h1(), e.pressure.l2};
  });

  ErrorRow row;
  row.scheme = scheme;
  row.theta = scheme == Scheme::DLN ? theta : 0.0;
  row.n = n;
  row.h = 1.0 / n;
  row.dt = schedule.step(0);
  for (std::size_t c = 0; c < kErrorColumns; ++c) {
    std::vector<double> e(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) e[k] = level_err[k + 1][c];
    row.err[c] = discrete_space_time_norm(e, schedule.steps());
  }
  row.max_divergence = res.max_divergence;
  row.max_stage_residual = res.max_stage_residual;
  row.factorizations = res.factorizations;
  row.dofs = sys.size();
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

ErrorReport run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  ErrorReport rep;
  for (Scheme s : cfg.schemes) {
    const std::vector<double> thetas = s == Scheme::DLN ? cfg.thetas : std::vector<double>{0.0};
    for (double th : thetas) {
      for (int n : cfg.resolutions) {
        try {
          rep.rows.push_back(run_convergence_case(s, th, n, cfg.elements, cfg.viscous));
        } catch (const std::exception& ex) {
          std::ostringstream os;
          os << "convergence run (" << to_string(s) << ", theta=" << th << ", n=" << n << "): " << ex.what();
          throw std::runtime_error(os.str());
        }
      }
    }
  }
  return rep;
}

double varstep_law(double t) { return 0.1 + 0.05 * std::sin(10.0 * t); }

StepSchedule varstep_schedule(int computed_steps, double t0) {
  if (computed_steps < 1) throw std::invalid_argument("varstep schedule needs at least one step");
  std::vector<double> k;
  double t = t0;
  for (int n = 0; n <= computed_steps; ++n) {
    const double step = n <= 10 ? 0.1 : varstep_law(t);
    k.push_back(step);
    t += step;
  }
  return StepSchedule(t0, std::move(k));
}

namespace {

double theta_tag(double th) { return std::round(th * 1000.0) / 1000.0; }

std::string theta_suffix(double th) {
  std::ostringstream os;
  os << "theta" << std::fixed << std::setprecision(2) << theta_tag(th);
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string());
}

}  // namespace

VarstepReport run_varstep(const ExperimentConfig& cfg, bool emit) {
  cfg.validate();
  VarstepReport rep;
  rep.schedule = varstep_schedule(cfg.computed_steps);
  ManufacturedProblem prob = pi_channel_problem();
  prob.params.viscous = cfg.viscous;
  const CoupledSystem sys = assemble_coupled_system(build_coupled_mesh(prob.domain, cfg.mesh_divisions),
                                                    cfg.elements, prob.params);
  const ExactFields exact = prob.exact();
  const FieldSet exact_set = prob.fields();
  const std::vector<double> zero(sys.size(), 0.0);
  if (emit) ensure_dir(cfg.out_dir);

  for (double th : cfg.thetas) {
    const auto start = std::chrono::steady_clock::now();
    VarstepRun run;
    run.theta = th;
    run.dofs = sys.size();
    run.min_state_norm = std::numeric_limits<double>::infinity();
    TransientOptions opt;
    opt.theta = th;
    opt.keep_trajectory = false;
    std::ofstream samples;
    if (emit) samples = open_out(cfg.out_dir / ("samples_" + theta_suffix(th) + ".csv"));
    bool header = true;
    const std::size_t last = rep.schedule.size();
    const auto res = run_transient(sys, prob, rep.schedule, opt, [&](std::size_t level, const CoupledState& s) {
      const double nrm = norm2(s.x);
      if (!std::isfinite(nrm)) run.all_finite = false;
      run.min_state_norm = std::min(run.min_state_norm, nrm);
      run.max_state_norm = std::max(run.max_state_norm, nrm);
      if (!emit) return;
      if (level % 10 == 0 || level == last) {
        std::ostringstream block;
        write_line_samples_csv(block, sys, s, exact_set, 0.5 * (prob.domain.fluid.x0 + prob.domain.fluid.x1),
                               cfg.sample_count);
        std::string text = block.str();
        if (!header) text.erase(0, text.find('\n') + 1);
        header = false;
        samples << text;
      }
      if (cfg.write_vtk && (level == 0 || level == last)) {
        auto f = open_out(cfg.out_dir / ("state_" + theta_suffix(th) + "_level" + std::to_string(level) + ".vtk"));
        write_state_vtk(f, sys, s, &exact_set);
      }
    });
    const CoupledState& fin = res.states.back();
    run.energy = res.energy;
    run.verdict = energy_budget(res.energy);
    run.factorizations = res.factorizations;
    run.max_divergence = res.max_divergence;
    run.max_stage_residual = res.max_stage_residual;
    run.final_time = fin.t;
    run.final_errors = field_error_norms(sys.mesh, sys.dofs, fin.x, exact, fin.t);
    const FieldErrors ref = field_error_norms(sys.mesh, sys.dofs, zero, exact, fin.t);
    const double num = std::hypot(run.final_errors.velocity.l2, run.final_errors.head.l2);
    const double den = std::hypot(ref.velocity.l2, ref.head.l2);
    run.final_relative_error = den > 0.0 ? num / den : num;
    run.all_finite = run.all_finite && run.verdict.all_finite && std::isfinite(run.final_relative_error);
    run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (emit) {
      auto f = open_out(cfg.out_dir / ("energy_" + theta_suffix(th) + ".csv"));
      write_energy_csv(f, run.energy);
    }
    rep.runs.push_back(std::move(run));
  }
  if (emit) {
    auto f = open_out(cfg.out_dir / "varstep_summary.csv");
    write_varstep_summary_csv(f, rep);
    auto g = open_out(cfg.out_dir / "schedule.csv");
    write_schedule_csv(g, rep.schedule);
  }
  return rep;
}

// --- reports -----------------------------------------------------------------

void write_convergence_csv(std::ostream& os, const ErrorReport& report) {
  os << "theta,n,h,dt";
  for (auto* name : kErrorNames) os << ",err_" << name;
  for (auto* name : kErrorNames) os << ",rate_" << name;
  os << "\n";
  const auto rates = report.rates();
  os << std::setprecision(10);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    if (r.scheme == Scheme::DLN) os << r.theta;
    os << ',' << r.n << ',' << r.h << ',' << r.dt;
    for (double e : r.err) os << ',' << e;
    for (std::size_t c = 0; c < kErrorColumns; ++c) {
      os << ',';
      if (rates[i]) os << (*rates[i])[c];
    }
    os << "\n";
  }
}

void write_convergence_table(std::ostream& os, const ErrorReport& report, bool with_timing) {
  const auto rates = report.rates();
  std::ostringstream head;
  head << std::left << std::setw(6) << "scheme" << std::right << std::setw(7) << "theta" << std::setw(5) << "n";
  for (auto* name : kErrorNames) head << std::setw(13) << name;
  for (auto* name : kErrorNames) head << std::setw(9) << (std::string("r_") + name);
  if (with_timing) head << std::setw(10) << "seconds";
  os << head.str() << "\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    os << std::left << std::setw(6) << to_string(r.scheme) << std::right << std::setw(7);
    if (r.scheme == Scheme::DLN) {
      os << std::fixed << std::setprecision(2) << r.theta;
    } else {
      os << "-";
    }
    os << std::setw(5) << r.n << std::scientific << std::setprecision(5);
    for (double e : r.err) os << std::setw(13) << e;
    os << std::fixed << std::setprecision(4);
    for (std::size_t c = 0; c < kErrorColumns; ++c) {
      if (rates[i]) {
        os << std::setw(9) << (*rates[i])[c];
      } else {
        os << std::setw(9) << "-";
      }
    }
    if (with_timing) os << std::setw(10) << std::setprecision(2) << r.wall_seconds;
    os << std::defaultfloat << "\n";
  }
}

void write_varstep_summary_csv(std::ostream& os, const VarstepReport& report) {
  os << "theta,final_time,final_relative_error,err_u_l2,err_phi_l2,err_p_l2,max_identity_residual,"
        "max_budget_residual,max_interface_ratio,max_divergence,factorizations,energy_bounded\n";
  os << std::setprecision(10);
  for (const auto& r : report.runs) {
    os << r.theta << ',' << r.final_time << ',' << r.final_relative_error << ','
       << r.final_errors.velocity.l2 << ',' << r.final_errors.head.l2 << ','
       << r.final_errors.pressure.l2 << ',' << r.verdict.max_identity_residual << ','
       << r.verdict.max_budget_residual << ',' << r.verdict.max_interface_ratio << ','
       << r.max_divergence << ',' << r.factorizations << ',' << (r.verdict.energy_bounded ? 1 : 0)
       << "\n";
  }
}

void write_schedule_csv(std::ostream& os, const StepSchedule& s) {
  os << "n,t_n,k_n\n" << std::setprecision(12);
  for (std::size_t n = 0; n < s.size(); ++n) os << n << ',' << s.time(n) << ',' << s.step(n) << "\n";
}

void write_coefficients_csv(std::ostream& os, const StepSchedule& s, std::span<const double> thetas) {
  os << "theta,n,t_n,k_n,k_prev,eps,alpha0,alpha1,alpha2,beta0,beta1,beta2,lambda0,lambda1,lambda2,k_hat,t_beta\n";
  os << std::setprecision(12);
  for (double th : thetas) {
    for (std::size_t n = 1; n < s.size(); ++n) {
      const auto c = dln_coefficients(th, s.step(n), s.step(n - 1));
      os << th << ',' << n << ',' << s.time(n) << ',' << c.k_n << ',' << c.k_prev << ',' << c.eps;
      for (double v : c.alpha) os << ',' << v;
      for (double v : c.beta) os << ',' << v;
      for (double v : c.lambda) os << ',' << v;
      os << ',' << c.k_hat << ',' << one_leg_point(s.time(n - 1), s.time(n), s.time(n + 1), c) << "\n";
    }
  }
}

std::vector<std::filesystem::path> emit_outputs(const ErrorReport& report, const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  for (Scheme s : {Scheme::DLN, Scheme::BDF2}) {
    ErrorReport part;
    for (const auto& r : report.rows)
      if (r.scheme == s) part.rows.push_back(r);
    if (part.rows.empty() && !(s == Scheme::DLN && report.rows.empty())) continue;
    const std::string stem = std::string("convergence_") + to_string(s);
    auto csv_path = dir / (stem + ".csv");
    auto csv = open_out(csv_path);
    write_convergence_csv(csv, part);
    if (!csv) throw std::runtime_error("write failed: " + csv_path.string());
    written.push_back(csv_path);
    auto txt_path = dir / (stem + ".txt");
    auto txt = open_out(txt_path);
    write_convergence_table(txt, part);
    written.push_back(txt_path);
  }
  return written;
}

}  // namespace dlnsd
