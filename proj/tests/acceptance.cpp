// Acceptance suite: one PASS/FAIL line per criterion, followed by property
// lines for the convergence study. Exit status is nonzero if any line fails.
//
//   acceptance [--full] [--skip-varstep]
//
// --full adds the n = 28 and n = 34 rows to the convergence checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dlnsd/dln.hpp"
#include "dlnsd/harness.hpp"
#include "dlnsd/problems.hpp"
#include "ode_reference.hpp"

using namespace dlnsd;

namespace {

class Reporter {
 public:
  void line(const std::string& id, bool pass, const std::string& detail) {
    std::printf("%s  %-4s %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    failures_ += pass ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Reference error magnitudes (u_l2, u_h1, phi_l2, phi_h1, p_l2) for h = dt = 1/n.
using RefRow = std::array<double, kErrorColumns>;
const std::map<int, RefRow> kRefTheta02{
    {10, {0.0163655, 0.599657, 0.0143625, 0.552125, 0.175753}},
    {16, {0.00657067, 0.354318, 0.00587243, 0.359717, 0.0785158}},
    {22, {0.00353871, 0.255182, 0.00317754, 0.268333, 0.0490189}},
    {28, {0.00218857, 0.191492, 0.00198363, 0.2117, 0.0306542}},
    {34, {0.00150194, 0.160602, 0.00135819, 0.177254, 0.0213342}}};
const std::map<int, RefRow> kRefTheta05{
    {10, {0.01615, 0.506002, 0.0146238, 0.551755, 0.138243}},
    {16, {0.00652393, 0.311263, 0.00599802, 0.359655, 0.0637115}},
    {22, {0.00351853, 0.22917, 0.00324735, 0.268314, 0.04083}},
    {28, {0.00218086, 0.176397, 0.00202875, 0.211693, 0.0260884}},
    {34, {0.00149633, 0.148517, 0.0013883, 0.177249, 0.0184629}}};
const std::map<int, RefRow> kRefTheta07{
    {10, {0.0161161, 0.488013, 0.0150263, 0.551591, 0.128276}},
    {16, {0.00652022, 0.30443, 0.00616699, 0.359622, 0.0604363}},
    {22, {0.00351759, 0.225303, 0.00333733, 0.268301, 0.0393132}},
    {28, {0.00218125, 0.174198, 0.00208573, 0.211687, 0.0252779}},
    {34, {0.00149674, 0.14679, 0.00142616, 0.177246, 0.0179642}}};
const std::map<int, RefRow> kRefBdf2{
    {10, {0.0160291, 0.450396, 0.0165148, 0.551278, 0.116047}},
    {16, {0.00650765, 0.290462, 0.00680715, 0.359553, 0.0561277}},
    {22, {0.00351566, 0.2176, 0.0036845, 0.268273, 0.0373131}},
    {28, {0.00218218, 0.169732, 0.00230674, 0.211677, 0.024088}},
    {34, {0.00149872, 0.143413, 0.00157485, 0.177236, 0.0171673}}};

const std::map<int, RefRow>& dln_reference(double theta) {
  if (std::abs(theta - 0.2) < 1e-12) return kRefTheta02;
  if (std::abs(theta - 0.5) < 1e-12) return kRefTheta05;
  return kRefTheta07;
}

constexpr std::size_t kUL2 = 0, kUH1 = 1, kPhiL2 = 2, kPhiH1 = 3, kPL2 = 4;

void check_g_identity(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> th(0.0, 1.0), lk(-4.0, 2.0), v(-10.0, 10.0), w(0.05, 5.0);
  std::uniform_int_distribution<int> dim(1, 64);
  double worst = 0.0;
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
    const auto co = dln_coefficients(th(rng), std::pow(10.0, lk(rng)), std::pow(10.0, lk(rng)));
    worst = std::max(worst, std::abs(g_identity_residual(a, b, c, co, inner)) / g_identity_scale(a, b, c, co, inner));
  }
  const double secs = seconds_since(t0);
  rep.line("C1", worst <= 1e-12 && secs < 1.0,
           fmt("G-stability identity: 1000 random trials, max relative residual %.2e (<= 1e-12), %.3f s", worst,
               secs));
}

void check_coefficients(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7001);
  std::uniform_real_distribution<double> th(0.0, 1.0), lk(-6.0, 3.0);
  double worst = 0.0;
  bool bounds = true;
  for (int i = 0; i < 10000; ++i) {
    const double t = th(rng), k = std::pow(10.0, lk(rng)), kp = std::pow(10.0, lk(rng));
    const auto c = dln_coefficients(t, k, kp);
    const double amax = std::max({std::abs(c.alpha[0]), std::abs(c.alpha[1]), std::abs(c.alpha[2])});
    const double bmax = std::max({std::abs(c.beta[0]), std::abs(c.beta[1]), std::abs(c.beta[2])});
    worst = std::max(worst, std::abs(c.alpha[0] + c.alpha[1] + c.alpha[2]) / amax);
    worst = std::max(worst, std::abs(c.beta[0] + c.beta[1] + c.beta[2] - 1.0) / bmax);
    const double lhs = c.alpha[2] * k * k + c.alpha[0] * kp * kp;
    const double rhs = 2.0 * c.k_hat * (c.beta[2] * k - c.beta[0] * kp);
    const double scale = std::max({std::abs(lhs), c.alpha[2] * k * k, std::abs(c.alpha[0]) * kp * kp});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
    const double kh = ((1 + t) * k + (1 - t) * kp) / 2;
    worst = std::max(worst, std::abs(c.k_hat - kh) / kh);
    // (1-theta)(k + k')/2 <= k_hat <= (1+theta)(k + k')/2
    const double mean = (k + kp) / 2;
    bounds = bounds && c.k_hat >= (1 - t) * mean * (1 - 1e-12) && c.k_hat <= (1 + t) * mean * (1 + 1e-12);
  }
  const double secs = seconds_since(t0);
  rep.line("C2", worst <= 1e-12 && bounds && secs < 1.0,
           fmt("coefficient algebra: 10^4 random draws, max relative residual %.2e (<= 1e-12), step bounds %s, "
               "%.3f s",
               worst, bounds ? "hold" : "violated", secs));
}

void check_ode_order(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail = "scalar y' = -y, random bounded-ratio steps, observed order";
  bool ok = true;
  for (double th : {0.2, 0.5, 0.7}) {
    const double p = testref::observed_dln_order(th, 17, 3, 6);
    ok = ok && std::abs(p - 2.0) <= 0.1;
    detail += fmt(" theta=%.1f:%.3f", th, p);
  }
  const double secs = seconds_since(t0);
  rep.line("C3", ok && secs < 5.0, detail + fmt(" (2.0 +- 0.1), %.3f s", secs));
}

void check_forcing(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4242);
  std::string detail = "manufactured forcing, 200 points, fd step 1e-4:";
  bool ok = true;
  for (const auto& p : {pi_channel_problem(), unit_stack_problem()}) {
    const auto r = residual_check(p, random_sample_points(p, 200, rng), 1e-4);
    ok = ok && r.max() <= 1e-5;
    detail += fmt(" %s %.2e", p.name.c_str(), r.max());
  }
  const double secs = seconds_since(t0);
  rep.line("C4", ok && secs < 5.0, detail + fmt(" (<= 1e-5), %.3f s", secs));
}

struct Divergence {
  double worst = 0.0;
  int runs = 0;
  void add(double d) {
    worst = std::max(worst, d);
    ++runs;
  }
};

double ratio_to(double value, double ref) { return value / ref; }

void check_tables(Reporter& rep, const ErrorReport& dln, const std::vector<int>& ns) {
  const auto rates = dln.rates();
  double min_l2 = 1e300, min_h1 = 1e300, max_h1 = -1e300, lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < dln.rows.size(); ++i) {
    const auto& r = dln.rows[i];
    const auto& ref = dln_reference(r.theta).at(r.n);
    for (std::size_t c = 0; c < kErrorColumns; ++c) {
      lo = std::min(lo, ratio_to(r.err[c], ref[c]));
      hi = std::max(hi, ratio_to(r.err[c], ref[c]));
    }
    if (!rates[i]) continue;
    const auto& q = *rates[i];
    min_l2 = std::min({min_l2, q[kUL2], q[kPhiL2]});
    min_h1 = std::min({min_h1, q[kUH1], q[kPhiH1]});
    max_h1 = std::max({max_h1, q[kUH1], q[kPhiH1]});
  }
  const bool a = min_l2 >= 1.8, b = min_h1 >= 0.85 && max_h1 <= 1.3, c = lo >= 0.5 && hi <= 2.0;
  std::string nlist;
  for (int n : ns) nlist += (nlist.empty() ? "" : ",") + std::to_string(n);
  rep.line("C5", a && b && c,
           fmt("DLN convergence, MINI, n={%s}: min L2 rate %.3f (>= 1.8), H1 rates [%.3f, %.3f] (in [0.85, 1.3]), "
               "error/reference ratios [%.3f, %.3f] (in [0.5, 2])",
               nlist.c_str(), min_l2, min_h1, max_h1, lo, hi));
}

void check_bdf2(Reporter& rep, const ErrorReport& dln, const ErrorReport& bdf2) {
  bool smaller = true;
  std::string cmp;
  for (int n : {10, 16}) {
    double d = NAN, b = NAN;
    for (const auto& r : dln.series(Scheme::DLN, 0.2))
      if (r.n == n) d = r.err[kPhiL2];
    for (const auto& r : bdf2.rows)
      if (r.n == n) b = r.err[kPhiL2];
    smaller = smaller && d < b;
    cmp += fmt(" n=%d: %.6g vs %.6g;", n, d, b);
  }
  double min_rate = 1e300, lo = 1e300, hi = -1e300;
  for (const auto& q : bdf2.rates())
    if (q) min_rate = std::min({min_rate, (*q)[kUL2], (*q)[kPhiL2]});
  for (const auto& r : bdf2.rows)
    for (std::size_t c = 0; c < kErrorColumns; ++c) {
      lo = std::min(lo, ratio_to(r.err[c], kRefBdf2.at(r.n)[c]));
      hi = std::max(hi, ratio_to(r.err[c], kRefBdf2.at(r.n)[c]));
    }
  rep.line("C6", smaller && min_rate >= 1.8,
           fmt("head L2 error DLN theta=0.2 < BDF2:%s BDF2 min L2 rate %.3f (>= 1.8); BDF2 error/reference "
               "ratios [%.3f, %.3f]",
               cmp.c_str(), min_rate, lo, hi));
}

void check_properties(Reporter& rep, const ErrorReport& dln, const std::vector<int>& ns) {
  const std::vector<double> thetas{0.2, 0.5, 0.7};
  bool mono = true;
  double min_p_rate = 1e300;
  for (double th : thetas) {
    const auto s = dln.series(Scheme::DLN, th);
    for (std::size_t i = 1; i < s.size(); ++i)
      for (std::size_t c = 0; c < kErrorColumns; ++c) mono = mono && s[i].err[c] < s[i - 1].err[c];
  }
  for (const auto& q : dln.rates())
    if (q) min_p_rate = std::min(min_p_rate, (*q)[kPL2]);
  rep.line("P1", mono, "every DLN error column strictly decreases as n grows");
  rep.line("P2", min_p_rate >= 1.3, fmt("pressure L2 rate min %.3f (>= 1.3)", min_p_rate));

  auto trend = [&](std::size_t col, bool decreasing) {
    bool ok = true;
    std::string vals;
    for (int n : ns) {
      std::vector<double> e;
      for (double th : thetas)
        for (const auto& r : dln.series(Scheme::DLN, th))
          if (r.n == n) e.push_back(r.err[col]);
      for (std::size_t i = 1; i < e.size(); ++i) ok = ok && (decreasing ? e[i] <= e[i - 1] : e[i] >= e[i - 1]);
      if (n == ns.front()) vals = fmt(" at n=%d: %.6g, %.6g, %.6g", n, e[0], e[1], e[2]);
    }
    return std::make_pair(ok, vals);
  };
  bool vel_ok = true, head_ok = true;
  std::string vel_vals, head_vals;
  for (std::size_t c : {kUL2, kUH1}) {
    auto [ok, v] = trend(c, true);
    vel_ok = vel_ok && ok;
    if (c == kUL2) vel_vals = v;
  }
  for (std::size_t c : {kPhiL2, kPhiH1}) {
    auto [ok, v] = trend(c, false);
    head_ok = head_ok && ok;
    if (c == kPhiL2) head_vals = v;
  }
  rep.line("P3", vel_ok, "velocity errors weakly decrease as theta grows through 0.2, 0.5, 0.7 (u L2" + vel_vals + ")");
  rep.line("P4", head_ok, "head errors weakly increase as theta grows through 0.2, 0.5, 0.7 (phi L2" + head_vals + ")");
}

void check_varstep(Reporter& rep, Divergence& div) {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = ExperimentConfig::defaults_for("varstep");
  const auto report = run_varstep(cfg, false);
  bool ok = report.schedule.size() == static_cast<std::size_t>(cfg.computed_steps) + 1;
  std::string detail = fmt("variable steps, Taylor-Hood, %d divisions, %zu steps:", cfg.mesh_divisions,
                           report.schedule.size() - 1);
  for (const auto& r : report.runs) {
    const double id = r.verdict.max_identity_residual;
    ok = ok && id <= 1e-8 && r.all_finite && r.final_relative_error <= 0.10;
    div.add(r.max_divergence);
    detail += fmt(" theta=%.1f identity %.1e, final rel err %.4f%s;", r.theta, id, r.final_relative_error,
                  r.all_finite ? "" : " NONFINITE");
  }
  detail += fmt(" (identity <= 1e-8, rel err <= 0.10), %.0f s", seconds_since(t0));
  rep.line("C7", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  bool full = false, varstep = true;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--full")) {
      full = true;
    } else if (!std::strcmp(argv[i], "--skip-varstep")) {
      varstep = false;
    } else {
      std::fprintf(stderr, "usage: %s [--full] [--skip-varstep]\n", argv[0]);
      return 2;
    }
  }
  Reporter rep;
  check_g_identity(rep);
  check_coefficients(rep);
  check_ode_order(rep);
  check_forcing(rep);

  Divergence div;
  ExperimentConfig cfg;
  if (full) cfg.resolutions = {10, 16, 22, 28, 34};
  cfg.schemes = {Scheme::DLN};
  const auto t0 = std::chrono::steady_clock::now();
  const ErrorReport dln = run_convergence(cfg);
  ExperimentConfig bcfg = cfg;
  bcfg.schemes = {Scheme::BDF2};
  const ErrorReport bdf2 = run_convergence(bcfg);
  for (const auto* r : {&dln, &bdf2})
    for (const auto& row : r->rows) div.add(row.max_divergence);
  std::printf("      convergence runs: %.1f s\n", seconds_since(t0));
  check_tables(rep, dln, cfg.resolutions);
  check_bdf2(rep, dln, bdf2);
  if (varstep) check_varstep(rep, div);
  rep.line("C8", div.worst <= 1e-9,
           fmt("discrete divergence max |B u|_inf %.2e over %d runs (<= 1e-9)%s", div.worst, div.runs,
               varstep ? "" : ", variable-step runs skipped"));
  check_properties(rep, dln, cfg.resolutions);
  std::printf("%s: %d failing line(s)\n", rep.failures() ? "FAILED" : "ALL PASSED", rep.failures());
  return rep.failures() ? 1 : 0;
}
