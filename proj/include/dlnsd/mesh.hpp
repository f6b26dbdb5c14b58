#pragma once

// Structured conforming triangulations of a fluid rectangle stacked on top of
// a porous rectangle, with tagged outer boundaries and a shared interface.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dlnsd/types.hpp"

namespace dlnsd {

using Point = Vec2;

enum class Region : std::uint8_t { Fluid = 0, Porous = 1 };
enum class BoundaryTag : std::uint8_t { FluidOuter = 0, PorousOuter = 1, Interface = 2 };

const char* to_string(Region r);
const char* to_string(BoundaryTag t);

struct Rect {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// Fluid rectangle directly above the porous rectangle; both share the
/// horizontal edge y = porous.y1 = fluid.y0 over the same x-range.
struct DomainSpec {
  Rect fluid;
  Rect porous;

  void validate() const;
  double interface_y() const { return fluid.y0; }
  double interface_length() const { return fluid.width(); }

  /// Omega_f = [0,pi]x[0,1], Omega_p = [0,pi]x[-1,0].
  static DomainSpec pi_channel();
  /// Omega_f = (0,1)x(1,2), Omega_p = (0,1)x(0,1).
  static DomainSpec unit_stack();
};

struct BoundaryEdge {
  std::array<int, 2> v{};
  BoundaryTag tag = BoundaryTag::FluidOuter;
  int edge = -1;      // index into TriMesh::edges
  int triangle = -1;  // fluid-side triangle for Interface edges
  int porous_triangle = -1;  // porous-side triangle for Interface edges
};

struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<Region> region_of_triangle;
  std::vector<BoundaryEdge> boundary_edges;

  // Derived connectivity. Local edge k of a triangle joins local vertices k and (k+1)%3.
  std::vector<std::array<int, 2>> edges;  // (min vertex, max vertex)
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<bool> vertex_on_boundary;

  DomainSpec domain;
  int nx = 0, ny_fluid = 0, ny_porous = 0;

  double signed_area(int tri) const;
  std::vector<int> interface_edge_indices() const;
  /// Triangle containing p and its barycentric coordinates, if any.
  std::optional<std::pair<int, std::array<double, 3>>> locate(Point p) const;
};

struct MeshStatistics {
  double h_max = 0.0;
  std::size_t triangle_count = 0;
  std::size_t vertex_count = 0;
  std::size_t interface_edge_count = 0;
};

TriMesh build_coupled_mesh(const DomainSpec& spec, int n_divisions);

/// Builds edge tables and boundary tags from vertices/triangles/regions.
void finalize_connectivity(TriMesh& mesh);

MeshStatistics mesh_statistics(const TriMesh& mesh);

void write_mesh_text(std::ostream& os, const TriMesh& mesh);
void write_mesh_vtk(std::ostream& os, const TriMesh& mesh);

}  // namespace dlnsd
