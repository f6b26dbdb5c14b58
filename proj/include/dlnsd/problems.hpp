#pragma once

// Physical parameters and manufactured exact solutions for the coupled
// Stokes/Darcy model, with forcing derived from the strong equations
//   u_t - div T(u, p) = F1,  T = -p I + 2 nu D(u),  div u = 0   (fluid)
//   S0 phi_t - div(K grad phi) = F2                              (porous)

#include <array>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dlnsd/fem.hpp"
#include "dlnsd/mesh.hpp"
#include "dlnsd/types.hpp"

namespace dlnsd {

/// Symmetric: 2 nu (D(u), D(v)) with T = -p I + 2 nu D(u).
/// Gradient: nu (grad u, grad v) with the pseudo-stress -p I + nu grad u.
enum class ViscousForm { Symmetric, Gradient };

const char* to_string(ViscousForm f);
ViscousForm viscous_form_from_name(const std::string& name);

struct PhysicalParams {
  double nu = 1.0;
  double g = 1.0;
  double S0 = 1.0;
  Mat2 K = identity2();
  double mu_bjs = 1.0;
  ViscousForm viscous = ViscousForm::Symmetric;

  void validate() const;
  /// Pi = nu K / g.
  Mat2 permeability() const;
  /// mu_BJS nu sqrt(d) / sqrt(trace Pi) with d = 2.
  double bjs_coefficient() const;
};

/// hess[c][i][j] = d^2 u_c / dx_i dx_j.
using VectorHessian = std::array<Mat2, 2>;

struct ManufacturedProblem {
  std::string name;
  DomainSpec domain;
  PhysicalParams params;
  double t_end = 1.0;

  std::function<Vec2(Point, double)> u;
  std::function<Vec2(Point, double)> u_t;
  std::function<Mat2(Point, double)> grad_u;
  std::function<VectorHessian(Point, double)> hess_u;
  std::function<double(Point, double)> p;
  std::function<Vec2(Point, double)> grad_p;
  std::function<double(Point, double)> phi;
  std::function<double(Point, double)> phi_t;
  std::function<Vec2(Point, double)> grad_phi;
  std::function<Mat2(Point, double)> hess_phi;

  /// F1 = u_t - nu (lap u + grad div u) + grad p (no grad div term for the gradient form).
  Vec2 fluid_force(Point x, double t, bool transient = true) const;
  /// F2 = S0 phi_t - K : hess phi.
  double porous_source(Point x, double t, bool transient = true) const;
  /// T(u,p) = -p I + 2 nu D(u), or -p I + nu grad u for the gradient form.
  Mat2 stress(Point x, double t) const;
  /// Fluid outward normal on the interface.
  Vec2 interface_normal() const { return {0.0, -1.0}; }
  /// Interface traction data T n_f + g phi n_f + c_BJS P_tau u; zero when the
  /// exact solution satisfies the homogeneous interface conditions.
  Vec2 interface_traction(Point x, double t) const;
  /// Interface mass-flux defect K grad phi . n_p - u . n_f.
  double interface_flux(Point x, double t) const;

  ExactFields exact() const;
  FieldSet fields() const;
  LoadData load(bool transient = true) const;

  /// Same problem with every field (and so every forcing term) scaled by s.
  ManufacturedProblem scaled(double s) const;
};

/// Omega_f = [0,pi]x[0,1], Omega_p = [0,pi]x[-1,0], unit parameters.
ManufacturedProblem pi_channel_problem();
/// Omega_f = (0,1)x(1,2), Omega_p = (0,1)x(0,1), unit parameters, T = 1.
ManufacturedProblem unit_stack_problem();

struct ResidualReport {
  double momentum = 0.0;    // |FD strong momentum residual - F1|
  double darcy = 0.0;       // |FD strong Darcy residual - F2|
  double divergence = 0.0;  // |FD div u|
  double derivatives = 0.0; // coded first derivatives against FD
  double max() const;
};

struct SpaceTimePoint {
  Point x;
  double t;
  Region region;
};

std::vector<SpaceTimePoint> random_sample_points(const ManufacturedProblem& prob, int count,
                                                 std::mt19937_64& rng);

/// Checks the coded forcing and derivatives against fourth-order centered finite
/// differences of the exact fields.
ResidualReport residual_check(const ManufacturedProblem& prob,
                              const std::vector<SpaceTimePoint>& samples, double fd_step = 1e-4);

}  // namespace dlnsd
