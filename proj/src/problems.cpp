#include "dlnsd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace dlnsd {

using std::cos;
using std::exp;
using std::sin;
constexpr double kPi = std::numbers::pi;

const char* to_string(ViscousForm f) { return f == ViscousForm::Symmetric ? "symmetric" : "gradient"; }

ViscousForm viscous_form_from_name(const std::string& name) {
  if (name == "symmetric") return ViscousForm::Symmetric;
  if (name == "gradient") return ViscousForm::Gradient;
  throw std::invalid_argument("unknown viscous form '" + name + "' (expected symmetric or gradient)");
}

void PhysicalParams::validate() const {
  if (!(nu > 0.0) || !(g > 0.0) || !(S0 > 0.0) || !(mu_bjs > 0.0))
    throw std::domain_error("physical parameters nu, g, S0, mu_BJS must be positive");
  if (!is_spd(K)) throw std::domain_error("hydraulic conductivity K must be SPD");
}

Mat2 PhysicalParams::permeability() const {
  Mat2 pi = K;
  for (auto& row : pi)
    for (auto& v : row) v *= nu / g;
  return pi;
}

double PhysicalParams::bjs_coefficient() const {
  return mu_bjs * nu * std::sqrt(2.0) / std::sqrt(trace(permeability()));
}

Vec2 ManufacturedProblem::fluid_force(Point x, double t, bool transient) const {
  const auto h = hess_u(x, t);
  const Vec2 gp = grad_p(x, t);
  Vec2 f;
  for (int c = 0; c < 2; ++c) {
    const double lap = h[c][0][0] + h[c][1][1];
    const double grad_div =
        params.viscous == ViscousForm::Symmetric ? h[0][c][0] + h[1][c][1] : 0.0;
    const double val = -params.nu * (lap + grad_div) + gp[c];
    (c == 0 ? f.x : f.y) = val;
  }
  if (transient) f = f + u_t(x, t);
  return f;
}

double ManufacturedProblem::porous_source(Point x, double t, bool transient) const {
  const Mat2 h = hess_phi(x, t);
  const Mat2& K = params.K;
  double div_flux = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) div_flux += K[i][j] * h[i][j];
  return (transient ? params.S0 * phi_t(x, t) : 0.0) - div_flux;
}

Mat2 ManufacturedProblem::stress(Point x, double t) const {
  const Mat2 gu = grad_u(x, t);
  const double pv = p(x, t);
  const bool sym = params.viscous == ViscousForm::Symmetric;
  Mat2 T{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      T[i][j] = params.nu * (gu[i][j] + (sym ? gu[j][i] : 0.0)) - (i == j ? pv : 0.0);
  return T;
}

Vec2 ManufacturedProblem::interface_traction(Point x, double t) const {
  const Vec2 n = interface_normal();
  const Vec2 uv = u(x, t);
  const Vec2 tangential = uv - dot(uv, n) * n;
  return mat_vec(stress(x, t), n) + (params.g * phi(x, t)) * n +
         params.bjs_coefficient() * tangential;
}

double ManufacturedProblem::interface_flux(Point x, double t) const {
  const Vec2 nf = interface_normal();
  const Vec2 np = -1.0 * nf;
  return dot(mat_vec(params.K, grad_phi(x, t)), np) - dot(u(x, t), nf);
}

ExactFields ManufacturedProblem::exact() const {
  return {u, grad_u, phi, grad_phi, p, grad_p};
}

FieldSet ManufacturedProblem::fields() const { return {u, phi, p}; }

LoadData ManufacturedProblem::load(bool transient) const {
  LoadData d;
  d.g = params.g;
  // Copies keep the load valid independently of this object's lifetime.
  auto self = std::make_shared<const ManufacturedProblem>(*this);
  d.fluid_force = [self, transient](Point x, double t) { return self->fluid_force(x, t, transient); };
  d.porous_source = [self, transient](Point x, double t) { return self->porous_source(x, t, transient); };
  d.interface_traction = [self](Point x, double t) { return self->interface_traction(x, t); };
  d.interface_flux = [self](Point x, double t) { return self->interface_flux(x, t); };
  return d;
}

ManufacturedProblem ManufacturedProblem::scaled(double s) const {
  ManufacturedProblem out = *this;
  auto base = std::make_shared<const ManufacturedProblem>(*this);
  out.u = [base, s](Point x, double t) { return s * base->u(x, t); };
  out.u_t = [base, s](Point x, double t) { return s * base->u_t(x, t); };
  out.grad_u = [base, s](Point x, double t) {
    Mat2 m = base->grad_u(x, t);
    for (auto& r : m)
      for (auto& v : r) v *= s;
    return m;
  };
  out.hess_u = [base, s](Point x, double t) {
    VectorHessian h = base->hess_u(x, t);
    for (auto& m : h)
      for (auto& r : m)
        for (auto& v : r) v *= s;
    return h;
  };
  out.p = [base, s](Point x, double t) { return s * base->p(x, t); };
  out.grad_p = [base, s](Point x, double t) { return s * base->grad_p(x, t); };
  out.phi = [base, s](Point x, double t) { return s * base->phi(x, t); };
  out.phi_t = [base, s](Point x, double t) { return s * base->phi_t(x, t); };
  out.grad_phi = [base, s](Point x, double t) { return s * base->grad_phi(x, t); };
  out.hess_phi = [base, s](Point x, double t) {
    Mat2 m = base->hess_phi(x, t);
    for (auto& r : m)
      for (auto& v : r) v *= s;
    return m;
  };
  return out;
}

ManufacturedProblem pi_channel_problem() {
  ManufacturedProblem m;
  m.name = "pi-channel";
  m.domain = DomainSpec::pi_channel();
  m.t_end = 4.0;
  m.u = [](Point x, double t) {
    const double e = exp(t), sy = sin(kPi * x.y);
    return Vec2{sin(2 * kPi * x.y) * cos(x.x) * e / kPi, (-2.0 + sy * sy / (kPi * kPi)) * sin(x.x) * e};
  };
  m.u_t = m.u;
  m.grad_u = [](Point x, double t) {
    const double e = exp(t), sy = sin(kPi * x.y);
    const double s2 = sin(2 * kPi * x.y), c2 = cos(2 * kPi * x.y);
    return Mat2{{{-s2 * sin(x.x) * e / kPi, 2.0 * c2 * cos(x.x) * e},
                 {(-2.0 + sy * sy / (kPi * kPi)) * cos(x.x) * e, s2 / kPi * sin(x.x) * e}}};
  };
  m.hess_u = [](Point x, double t) {
    const double e = exp(t), sy = sin(kPi * x.y);
    const double s2 = sin(2 * kPi * x.y), c2 = cos(2 * kPi * x.y);
    const double sx = sin(x.x), cx = cos(x.x);
    const Mat2 h1{{{-s2 * cx / kPi * e, -2.0 * c2 * sx * e}, {-2.0 * c2 * sx * e, -4.0 * kPi * s2 * cx * e}}};
    const double a = -2.0 + sy * sy / (kPi * kPi);
    const Mat2 h2{{{-a * sx * e, s2 / kPi * cx * e}, {s2 / kPi * cx * e, 2.0 * c2 * sx * e}}};
    return VectorHessian{h1, h2};
  };
  m.p = [](Point, double) { return 0.0; };
  m.grad_p = [](Point, double) { return Vec2{}; };
  m.phi = [](Point x, double t) { return (exp(x.y) - exp(-x.y)) * sin(x.x) * exp(t); };
  m.phi_t = m.phi;
  m.grad_phi = [](Point x, double t) {
    const double e = exp(t);
    return Vec2{(exp(x.y) - exp(-x.y)) * cos(x.x) * e, (exp(x.y) + exp(-x.y)) * sin(x.x) * e};
  };
  m.hess_phi = [](Point x, double t) {
    const double e = exp(t), sh = exp(x.y) - exp(-x.y), ch = exp(x.y) + exp(-x.y);
    return Mat2{{{-sh * sin(x.x) * e, ch * cos(x.x) * e}, {ch * cos(x.x) * e, sh * sin(x.x) * e}}};
  };
  return m;
}

ManufacturedProblem unit_stack_problem() {
  ManufacturedProblem m;
  m.name = "unit-stack";
  m.domain = DomainSpec::unit_stack();
  m.t_end = 1.0;
  m.u = [](Point x, double t) {
    const double c = cos(t), ym = x.y - 1.0;
    return Vec2{(x.x * x.x * ym * ym + x.y) * c,
                (-2.0 / 3.0 * x.x * ym * ym * ym + 2.0 - kPi * sin(kPi * x.x)) * c};
  };
  m.u_t = [](Point x, double t) {
    const double s = -sin(t), ym = x.y - 1.0;
    return Vec2{(x.x * x.x * ym * ym + x.y) * s,
                (-2.0 / 3.0 * x.x * ym * ym * ym + 2.0 - kPi * sin(kPi * x.x)) * s};
  };
  m.grad_u = [](Point x, double t) {
    const double c = cos(t), ym = x.y - 1.0;
    return Mat2{{{2.0 * x.x * ym * ym * c, (2.0 * x.x * x.x * ym + 1.0) * c},
                 {(-2.0 / 3.0 * ym * ym * ym - kPi * kPi * cos(kPi * x.x)) * c, -2.0 * x.x * ym * ym * c}}};
  };
  m.hess_u = [](Point x, double t) {
    const double c = cos(t), ym = x.y - 1.0;
    const Mat2 h1{{{2.0 * ym * ym * c, 4.0 * x.x * ym * c}, {4.0 * x.x * ym * c, 2.0 * x.x * x.x * c}}};
    const Mat2 h2{{{kPi * kPi * kPi * sin(kPi * x.x) * c, -2.0 * ym * ym * c},
                   {-2.0 * ym * ym * c, -4.0 * x.x * ym * c}}};
    return VectorHessian{h1, h2};
  };
  m.p = [](Point x, double t) {
    return (2.0 - kPi * sin(kPi * x.x)) * sin(0.5 * kPi * x.y) * cos(t);
  };
  m.grad_p = [](Point x, double t) {
    const double c = cos(t);
    return Vec2{-kPi * kPi * cos(kPi * x.x) * sin(0.5 * kPi * x.y) * c,
                (2.0 - kPi * sin(kPi * x.x)) * 0.5 * kPi * cos(0.5 * kPi * x.y) * c};
  };
  m.phi = [](Point x, double t) {
    return (2.0 - kPi * sin(kPi * x.x)) * (1.0 - x.y - cos(kPi * x.y)) * cos(t);
  };
  m.phi_t = [](Point x, double t) {
    return -(2.0 - kPi * sin(kPi * x.x)) * (1.0 - x.y - cos(kPi * x.y)) * sin(t);
  };
  m.grad_phi = [](Point x, double t) {
    const double c = cos(t);
    return Vec2{-kPi * kPi * cos(kPi * x.x) * (1.0 - x.y - cos(kPi * x.y)) * c,
                (2.0 - kPi * sin(kPi * x.x)) * (-1.0 + kPi * sin(kPi * x.y)) * c};
  };
  m.hess_phi = [](Point x, double t) {
    const double c = cos(t);
    const double xy = -kPi * kPi * cos(kPi * x.x) * (-1.0 + kPi * sin(kPi * x.y)) * c;
    return Mat2{{{kPi * kPi * kPi * sin(kPi * x.x) * (1.0 - x.y - cos(kPi * x.y)) * c, xy},
                 {xy, (2.0 - kPi * sin(kPi * x.x)) * kPi * kPi * cos(kPi * x.y) * c}}};
  };
  return m;
}

double ResidualReport::max() const { return std::max({momentum, darcy, divergence, derivatives}); }

std::vector<SpaceTimePoint> random_sample_points(const ManufacturedProblem& prob, int count,
                                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SpaceTimePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const Region r = i % 2 == 0 ? Region::Fluid : Region::Porous;
    const Rect& rect = r == Region::Fluid ? prob.domain.fluid : prob.domain.porous;
    const Point x{rect.x0 + unit(rng) * rect.width(), rect.y0 + unit(rng) * rect.height()};
    out.push_back({x, unit(rng) * prob.t_end, r});
  }
  return out;
}

namespace {

// Fourth-order centered stencils along a direction; f takes the offset.
template <class F>
double d1(F&& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

template <class F>
double d2(F&& f, double h) {
  return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
}

/// Second derivative of g(x) along unit directions i, j (i != j uses nested d1).
template <class G>
double hess_fd(G&& g, Point x, int i, int j, double h) {
  auto along = [](Point y, int dir, double s) { return dir == 0 ? Point{y.x + s, y.y} : Point{y.x, y.y + s}; };
  if (i == j) return d2([&](double s) { return g(along(x, i, s)); }, h);
  return d1([&](double s) { return d1([&](double r) { return g(along(along(x, i, s), j, r)); }, h); }, h);
}

template <class G>
double grad_fd(G&& g, Point x, int i, double h) {
  return d1([&](double s) { return g(i == 0 ? Point{x.x + s, x.y} : Point{x.x, x.y + s}); }, h);
}

}  // namespace

ResidualReport residual_check(const ManufacturedProblem& prob,
                              const std::vector<SpaceTimePoint>& samples, double h) {
  ResidualReport rep;
  const double nu = prob.params.nu;
  const Mat2& K = prob.params.K;
  const bool sym = prob.params.viscous == ViscousForm::Symmetric;

  for (const auto& s : samples) {
    const Point x = s.x;
    const double t = s.t;
    if (s.region == Region::Fluid) {
      auto uc = [&](int c) { return [&, c](Point y) { return prob.u(y, t)[c]; }; };
      auto pt = [&](Point y) { return prob.p(y, t); };
      Mat2 du{};
      for (int c = 0; c < 2; ++c)
        for (int j = 0; j < 2; ++j) du[c][j] = grad_fd(uc(c), x, j, h);
      const Mat2 gu = prob.grad_u(x, t);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) rep.derivatives = std::max(rep.derivatives, std::abs(gu[i][j] - du[i][j]));
      rep.divergence = std::max(rep.divergence, std::abs(du[0][0] + du[1][1]));

      const Vec2 gp_fd{grad_fd(pt, x, 0, h), grad_fd(pt, x, 1, h)};
      const Vec2 gp = prob.grad_p(x, t);
      rep.derivatives = std::max({rep.derivatives, std::abs(gp.x - gp_fd.x), std::abs(gp.y - gp_fd.y)});

      const Vec2 F = prob.fluid_force(x, t);
      for (int c = 0; c < 2; ++c) {
        // (div T)_c = -dp/dx_c + nu sum_j d_j (d_j u_c [+ d_c u_j])
        double div_visc = 0.0;
        for (int j = 0; j < 2; ++j) div_visc += hess_fd(uc(c), x, j, j, h) + (sym ? hess_fd(uc(j), x, c, j, h) : 0.0);
        const double div_T = -gp_fd[c] + nu * div_visc;
        const double ut = d1([&](double r) { return prob.u(x, t + r)[c]; }, h);
        rep.momentum = std::max(rep.momentum, std::abs(ut - div_T - F[c]));
      }
    } else {
      auto f = [&](Point y) { return prob.phi(y, t); };
      const Vec2 gphi = prob.grad_phi(x, t);
      rep.derivatives = std::max({rep.derivatives, std::abs(gphi.x - grad_fd(f, x, 0, h)),
                                  std::abs(gphi.y - grad_fd(f, x, 1, h))});
      double div_flux = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) div_flux += K[i][j] * hess_fd(f, x, i, j, h);
      const double ft = d1([&](double r) { return prob.phi(x, t + r); }, h);
      rep.darcy = std::max(rep.darcy, std::abs(prob.params.S0 * ft - div_flux - prob.porous_source(x, t)));
    }
  }
  return rep;
}

}  // namespace dlnsd
