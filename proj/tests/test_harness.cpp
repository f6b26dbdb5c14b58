#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dlnsd/harness.hpp"

using namespace dlnsd;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("dlnsd_test_" + name);
  fs::remove_all(d);
  return d;
}

const std::string kConvergenceHeader =
    "theta,n,h,dt,err_u_l2,err_u_h1,err_phi_l2,err_phi_h1,err_p_l2,"
    "rate_u_l2,rate_u_h1,rate_phi_l2,rate_phi_h1,rate_p_l2";

ErrorReport fake_report() {
  ErrorReport r;
  for (int n : {10, 16, 22}) {
    ErrorRow row;
    row.theta = 0.5;
    row.n = n;
    row.h = row.dt = 1.0 / n;
    for (std::size_t c = 0; c < kErrorColumns; ++c) row.err[c] = (c + 1) * std::pow(row.h, 2.0);
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace

TEST(SpaceTimeNorm, Examples) {
  const std::vector<double> zeros(4, 0.0), steps(4, 0.25);
  EXPECT_EQ(discrete_space_time_norm(zeros, steps), 0.0);
  const std::vector<double> c(4, 3.0);
  EXPECT_NEAR(discrete_space_time_norm(c, steps), 3.0, 1e-15);
  const std::vector<double> c2(5, 2.0), s2(5, 0.4);
  EXPECT_NEAR(discrete_space_time_norm(c2, s2), 2.0 * std::sqrt(2.0), 1e-15);
  const std::vector<double> e{1.0, 2.0}, k{0.5, 0.5};
  EXPECT_NEAR(discrete_space_time_norm(e, k), 1.5811, 1e-4);
  EXPECT_THROW(discrete_space_time_norm(e, steps), std::invalid_argument);
}

TEST(ConvergenceRate, Examples) {
  EXPECT_NEAR(convergence_rate(0.0163655, 0.00657067, 1.0 / 10, 1.0 / 16), 1.9416, 1e-4);
  EXPECT_EQ(convergence_rate(0.3, 0.3, 0.1, 0.05), 0.0);
  EXPECT_NEAR(convergence_rate(4.0, 1.0, 0.2, 0.1), 2.0, 1e-15);
  EXPECT_THROW(convergence_rate(0.0, 1.0, 0.2, 0.1), std::domain_error);
  EXPECT_THROW(convergence_rate(1.0, 1.0, 0.1, 0.1), std::domain_error);
}

TEST(Config, ParseAndOverride) {
  const auto c = ExperimentConfig::parse(
      "# study\nexperiment = convergence\ntheta = 0.2, 0.7\nn = 4,6\nscheme = both\nelements = taylor-hood\n"
      "viscous = gradient\nout = /tmp/x  # trailing\n");
  EXPECT_EQ(c.thetas, (std::vector<double>{0.2, 0.7}));
  EXPECT_EQ(c.resolutions, (std::vector<int>{4, 6}));
  EXPECT_EQ(c.schemes.size(), 2u);
  EXPECT_EQ(c.elements.name(), "taylor-hood");
  EXPECT_EQ(c.viscous, ViscousForm::Gradient);
  EXPECT_EQ(c.out_dir, fs::path("/tmp/x"));
  const auto v = ExperimentConfig::defaults_for("varstep");
  EXPECT_EQ(v.elements.name(), "taylor-hood");
  EXPECT_EQ(v.computed_steps, 40);
  EXPECT_EQ(v.mesh_divisions, 100);
}

TEST(Config, Errors) {
  EXPECT_THROW(ExperimentConfig::parse("bogus = 1\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("theta = 1.5\n"), std::domain_error);
  EXPECT_THROW(ExperimentConfig::parse("n = 16, 10\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("n = 10, 10\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("n = ten\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("just text\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("scheme = euler\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("experiment = other\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.txt"), std::runtime_error);
}

TEST(Varstep, ScheduleLaw) {
  EXPECT_NEAR(varstep_law(1.0), 0.0728, 1e-4);
  const auto s = varstep_schedule(40);
  ASSERT_EQ(s.size(), 41u);
  for (std::size_t n = 0; n <= 10; ++n) EXPECT_DOUBLE_EQ(s.step(n), 0.1);
  EXPECT_NEAR(s.time(10), 1.0, 1e-14);
  EXPECT_NEAR(s.step(11), varstep_law(s.time(11)), 1e-15);
  for (double k : s.steps()) {
    EXPECT_GE(k, 0.05);
    EXPECT_LE(k, 0.15);
  }
  for (std::size_t n = 1; n < s.size(); ++n) EXPECT_LT(std::abs(step_ratio_epsilon(s.step(n), s.step(n - 1))), 1.0);
}

TEST(Reports, CsvLayout) {
  std::ostringstream os;
  write_convergence_csv(os, fake_report());
  const auto text = os.str();
  EXPECT_EQ(first_line(text), kConvergenceHeader);
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  std::getline(is, line);
  EXPECT_EQ(line.substr(line.size() - 5), ",,,,,");
  std::getline(is, line);
  EXPECT_NE(line.find(",2,2,2,2,2"), std::string::npos) << line;
  std::ostringstream empty;
  write_convergence_csv(empty, ErrorReport{});
  EXPECT_EQ(empty.str(), kConvergenceHeader + "\n");
  ErrorReport b = fake_report();
  for (auto& r : b.rows) r.scheme = Scheme::BDF2;
  std::ostringstream bs;
  write_convergence_csv(bs, b);
  std::istringstream bis(bs.str());
  std::getline(bis, line);
  std::getline(bis, line);
  EXPECT_EQ(line.substr(0, 4), ",10,");
}

TEST(Reports, RatesAndSeries) {
  auto r = fake_report();
  const auto rates = r.rates();
  ASSERT_EQ(rates.size(), 3u);
  EXPECT_FALSE(rates[0].has_value());
  for (std::size_t i = 1; i < 3; ++i)
    for (double v : *rates[i]) EXPECT_NEAR(v, 2.0, 1e-12);
  ErrorRow other = r.rows[0];
  other.theta = 0.2;
  r.rows.push_back(other);
  EXPECT_FALSE(r.rates()[3].has_value());
  EXPECT_EQ(r.series(Scheme::DLN, 0.5).size(), 3u);
  EXPECT_EQ(r.series(Scheme::DLN, 0.2).size(), 1u);
}

TEST(Reports, EmitOutputsDeterministic) {
  const auto dir = scratch_dir("emit");
  const auto files = emit_outputs(fake_report(), dir);
  ASSERT_EQ(files.size(), 2u);
  const std::string first = read_file(dir / "convergence_dln.csv");
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 4);
  emit_outputs(fake_report(), dir);
  EXPECT_EQ(read_file(dir / "convergence_dln.csv"), first);
  const auto edir = scratch_dir("emit_empty");
  emit_outputs(ErrorReport{}, edir);
  EXPECT_EQ(read_file(edir / "convergence_dln.csv"), kConvergenceHeader + "\n");
  fs::remove_all(dir);
  fs::remove_all(edir);
}

TEST(Reports, UnwritableDirectory) {
  const auto dir = scratch_dir("blocker");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(emit_outputs(fake_report(), dir / "file" / "sub"), std::runtime_error);
  fs::remove_all(dir);
}

TEST(Convergence, SingleResolutionHasNoRates) {
  ExperimentConfig cfg;
  cfg.thetas = {0.5};
  cfg.resolutions = {4};
  const auto rep = run_convergence(cfg);
  ASSERT_EQ(rep.rows.size(), 1u);
  for (double e : rep.rows[0].err) {
    EXPECT_TRUE(std::isfinite(e));
    EXPECT_GT(e, 0.0);
  }
  EXPECT_FALSE(rep.rates()[0].has_value());
  std::ostringstream os;
  write_convergence_csv(os, rep);
  const auto text = os.str();
  const auto second = text.substr(text.find('\n') + 1);
  EXPECT_EQ(second.substr(second.size() - 6), ",,,,,\n");
}

TEST(Convergence, CoarseStudyTrends) {
  ExperimentConfig cfg;
  cfg.resolutions = {4, 6, 8};
  cfg.schemes = {Scheme::DLN, Scheme::BDF2};
  const auto rep = run_convergence(cfg);
  ASSERT_EQ(rep.rows.size(), 12u);
  for (const auto& r : rep.rows) {
    EXPECT_LE(r.max_divergence, 1e-9);
    EXPECT_EQ(r.factorizations, 1);
  }
  for (double th : cfg.thetas) {
    const auto s = rep.series(Scheme::DLN, th);
    for (std::size_t i = 1; i < s.size(); ++i)
      for (std::size_t c = 0; c < kErrorColumns; ++c) EXPECT_LT(s[i].err[c], s[i - 1].err[c]);
  }
  std::ostringstream os;
  write_convergence_table(os, rep);
  EXPECT_NE(os.str().find("bdf2"), std::string::npos);
}

TEST(Varstep, SmallRunEmitsFiles) {
  auto cfg = ExperimentConfig::defaults_for("varstep");
  cfg.mesh_divisions = 4;
  cfg.computed_steps = 12;
  cfg.thetas = {0.5};
  cfg.sample_count = 9;
  cfg.out_dir = scratch_dir("varstep");
  const auto rep = run_varstep(cfg, true);
  ASSERT_EQ(rep.runs.size(), 1u);
  const auto& run = rep.runs[0];
  EXPECT_TRUE(run.verdict.ok);
  EXPECT_TRUE(run.all_finite);
  EXPECT_NEAR(run.final_time, rep.schedule.t_end(), 1e-12);
  EXPECT_EQ(run.energy.entries.size(), 12u);
  for (const char* f : {"energy_theta0.50.csv", "samples_theta0.50.csv", "varstep_summary.csv", "schedule.csv",
                        "state_theta0.50_level0.vtk", "state_theta0.50_level13.vtk"})
    EXPECT_TRUE(fs::exists(cfg.out_dir / f)) << f;
  const auto samples = read_file(cfg.out_dir / "samples_theta0.50.csv");
  EXPECT_EQ(std::count(samples.begin(), samples.end(), '\n'), 1 + 3 * 9);
  fs::remove_all(cfg.out_dir);
}

TEST(Coefficients, CsvRows) {
  std::ostringstream os;
  const std::vector<double> th{0.2, 0.7};
  write_coefficients_csv(os, varstep_schedule(5), th);
  const auto text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 5);
}
