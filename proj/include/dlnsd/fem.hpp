#pragma once

// Lagrange spaces (P1, P2, P1 + cubic bubble) on the coupled mesh, the
// coupled degree-of-freedom layout, and assembly of every form in the
// Stokes/Darcy weak formulation.
//
// All assembled matrices are square over the full coupled index space
// [u_x | u_y | phi | p]; each form only fills its own blocks.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dlnsd/mesh.hpp"
#include "dlnsd/quadrature.hpp"
#include "dlnsd/sparse.hpp"
#include "dlnsd/types.hpp"

namespace dlnsd {

enum class ElementType { P1, P2, P1Bubble };

const char* to_string(ElementType e);
int local_dof_count(ElementType e);

struct ElementPair {
  ElementType velocity = ElementType::P2;
  ElementType pressure = ElementType::P1;
  ElementType head = ElementType::P2;

  static ElementPair taylor_hood() { return {ElementType::P2, ElementType::P1, ElementType::P2}; }
  static ElementPair mini() { return {ElementType::P1Bubble, ElementType::P1, ElementType::P1}; }
  /// "taylor-hood" or "mini".
  static ElementPair from_name(const std::string& name);
  std::string name() const;
  void validate() const;
};

enum class NodeKind { Vertex, Edge, Bubble };

/// Scalar Lagrange space restricted to one region of the mesh.
struct ScalarSpace {
  ElementType type = ElementType::P1;
  Region region = Region::Fluid;
  std::size_t n_dofs = 0;
  int dofs_per_cell = 0;
  std::vector<int> cell_of_triangle;  // -1 when the triangle is outside the region
  std::vector<int> triangles;         // region triangles, in mesh order
  std::vector<int> cell_dofs;         // triangles.size() * dofs_per_cell
  std::vector<Point> node_points;
  std::vector<NodeKind> node_kind;
  std::vector<int> node_cell;         // owning cell for bubble nodes, else -1
  std::vector<bool> on_outer_boundary;

  std::span<const int> dofs_of_cell(int cell) const {
    return {cell_dofs.data() + static_cast<std::size_t>(cell) * dofs_per_cell,
            static_cast<std::size_t>(dofs_per_cell)};
  }
};

ScalarSpace build_scalar_space(const TriMesh& mesh, ElementType type, Region region,
                               BoundaryTag outer_tag);

struct DofMap {
  ElementPair pair;
  ScalarSpace velocity;  // one component; the two components are stored blockwise
  ScalarSpace head;
  ScalarSpace pressure;
  std::size_t u_offset = 0, phi_offset = 0, p_offset = 0, total = 0;
  /// Velocity on FluidOuter and head on PorousOuter.
  std::vector<bool> essential;
  std::vector<std::size_t> essential_dofs;

  std::size_t u_dof(int comp, std::size_t scalar) const {
    return u_offset + static_cast<std::size_t>(comp) * velocity.n_dofs + scalar;
  }
  std::size_t phi_dof(std::size_t scalar) const { return phi_offset + scalar; }
  std::size_t p_dof(std::size_t scalar) const { return p_offset + scalar; }
  std::size_t n_velocity() const { return 2 * velocity.n_dofs; }
};

DofMap build_dofmap(const TriMesh& mesh, ElementPair pair);

// --- element-level helpers -------------------------------------------------

struct CellGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad_bary{};  // gradients of the barycentric coordinates
  std::array<Point, 3> vertices{};

  Point map(const std::array<double, 3>& bary) const;
};

CellGeometry cell_geometry(const TriMesh& mesh, int tri);

void eval_basis(ElementType type, const std::array<double, 3>& bary, std::span<double> values);
void eval_basis_grad(ElementType type, const std::array<double, 3>& bary,
                     const CellGeometry& geom, std::span<Vec2> grads);

/// Barycentric coordinates (in the given triangle) of the point (1-s)A + sB on
/// the mesh edge with endpoints A=v0, B=v1.
std::array<double, 3> edge_point_bary(const TriMesh& mesh, int tri, int v0, int v1, double s);

/// Unit outward normal of the fluid region on an interface edge.
Vec2 fluid_normal(const TriMesh& mesh, const BoundaryEdge& edge);

// --- assembly --------------------------------------------------------------

using ScalarField = std::function<double(Point, double)>;
using VectorField = std::function<Vec2(Point, double)>;
using GradientField = std::function<Vec2(Point, double)>;
using TensorField = std::function<Mat2(Point, double)>;

/// (u, v)_f * fluid_weight + (phi, psi)_p * porous_weight.
SparseMatrix assemble_mass(const TriMesh& mesh, const DofMap& dofs, double fluid_weight,
                           double porous_weight, const QuadratureRule& q = default_quadrature());

/// coeff * (D(u), D(v))_f with D the symmetric gradient.
SparseMatrix assemble_stokes_viscous(const TriMesh& mesh, const DofMap& dofs, double coeff,
                                     const QuadratureRule& q = default_quadrature());

/// coeff * (grad u, grad v)_f, componentwise.
SparseMatrix assemble_vector_laplacian(const TriMesh& mesh, const DofMap& dofs, double coeff,
                                       const QuadratureRule& q = default_quadrature());

/// coeff * (P_tau u, v)_Gamma.
SparseMatrix assemble_bjs(const TriMesh& mesh, const DofMap& dofs, double coeff,
                          const QuadratureRule& q = default_quadrature());

/// g * (K grad phi, grad psi)_p. Throws std::domain_error unless K is SPD.
SparseMatrix assemble_darcy(const TriMesh& mesh, const DofMap& dofs, double g, const Mat2& K,
                            const QuadratureRule& q = default_quadrature());

/// g (phi, v.n)_Gamma - g (psi, u.n)_Gamma with n the fluid outward normal.
SparseMatrix assemble_interface_coupling(const TriMesh& mesh, const DofMap& dofs, double g,
                                         const QuadratureRule& q = default_quadrature());

/// Rows in the pressure block, columns in the velocity block: -(q, div u)_f.
SparseMatrix assemble_divergence(const TriMesh& mesh, const DofMap& dofs,
                                 const QuadratureRule& q = default_quadrature());

/// Right-hand side data; any member may be empty.
struct LoadData {
  VectorField fluid_force;          // F1
  ScalarField porous_source;        // F2, weighted by g
  VectorField interface_traction;   // integrated against v on Gamma
  ScalarField interface_flux;       // integrated against g*psi on Gamma
  double g = 1.0;
};

/// Load vector at time t with essential-dof entries zeroed.
std::vector<double> assemble_load(const TriMesh& mesh, const DofMap& dofs, double t,
                                  const LoadData& data,
                                  const QuadratureRule& q = default_quadrature());

// --- interpolation and evaluation -----------------------------------------

struct FieldSet {
  VectorField velocity;
  ScalarField head;
  ScalarField pressure;
};

/// Nodal interpolant; bubble coefficients reproduce the value at the centroid.
std::vector<double> interpolate(const TriMesh& mesh, const DofMap& dofs, const FieldSet& f,
                                double t);

/// Sets essential entries of x to the interpolated boundary values.
void apply_essential_values(const TriMesh& mesh, const DofMap& dofs, const FieldSet& f, double t,
                            std::span<double> x);

Vec2 eval_velocity(const TriMesh& mesh, const DofMap& dofs, std::span<const double> x, int tri,
                   const std::array<double, 3>& bary);
double eval_head(const TriMesh& mesh, const DofMap& dofs, std::span<const double> x, int tri,
                 const std::array<double, 3>& bary);
double eval_pressure(const TriMesh& mesh, const DofMap& dofs, std::span<const double> x, int tri,
                     const std::array<double, 3>& bary);

struct ExactFields {
  VectorField velocity;
  TensorField velocity_grad;
  ScalarField head;
  GradientField head_grad;
  ScalarField pressure;
  GradientField pressure_grad;
};

struct NormPair {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1() const { return std::sqrt(l2 * l2 + h1_semi * h1_semi); }
};

struct FieldErrors {
  NormPair velocity;
  NormPair head;
  NormPair pressure;
};

/// ||x_h - exact|| per field by quadrature. Empty members of `exact` are
/// treated as zero functions.
FieldErrors field_error_norms(const TriMesh& mesh, const DofMap& dofs, std::span<const double> x,
                              const ExactFields& exact, double t,
                              const QuadratureRule& q = default_quadrature());

}  // namespace dlnsd
