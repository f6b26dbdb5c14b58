#include "dlnsd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dlnsd {

const char* to_string(Region r) { return r == Region::Fluid ? "fluid" : "porous"; }

const char* to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::FluidOuter: return "fluid_outer";
    case BoundaryTag::PorousOuter: return "porous_outer";
    case BoundaryTag::Interface: return "interface";
  }
  return "?";
}

void DomainSpec::validate() const {
  auto check_rect = [](const Rect& r, const char* name) {
    if (!(r.width() > 0.0) || !(r.height() > 0.0)) {
      std::ostringstream os;
      os << "degenerate " << name << " rectangle";
      throw std::invalid_argument(os.str());
    }
  };
  check_rect(fluid, "fluid");
  check_rect(porous, "porous");
  const double tol = 1e-12 * std::max(1.0, fluid.width());
  if (std::abs(fluid.y0 - porous.y1) > tol)
    throw std::invalid_argument("porous rectangle must lie directly below the fluid rectangle");
  if (std::abs(fluid.x0 - porous.x0) > tol || std::abs(fluid.x1 - porous.x1) > tol)
    throw std::invalid_argument("fluid and porous rectangles must share the same x-range");
}

DomainSpec DomainSpec::pi_channel() {
  return {Rect{0.0, std::numbers::pi, 0.0, 1.0}, Rect{0.0, std::numbers::pi, -1.0, 0.0}};
}

DomainSpec DomainSpec::unit_stack() {
  return {Rect{0.0, 1.0, 1.0, 2.0}, Rect{0.0, 1.0, 0.0, 1.0}};
}

double TriMesh::signed_area(int tri) const {
  const auto& t = triangles[tri];
  const Point& a = vertices[t[0]];
  const Point& b = vertices[t[1]];
  const Point& c = vertices[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::vector<int> TriMesh::interface_edge_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < boundary_edges.size(); ++i)
    if (boundary_edges[i].tag == BoundaryTag::Interface) out.push_back(static_cast<int>(i));
  return out;
}

std::optional<std::pair<int, std::array<double, 3>>> TriMesh::locate(Point p) const {
  constexpr double tol = 1e-12;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const Point& a = vertices[triangles[t][0]];
    const Point& b = vertices[triangles[t][1]];
    const Point& c = vertices[triangles[t][2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    const double l0 = 1.0 - l1 - l2;
    if (l0 >= -tol && l1 >= -tol && l2 >= -tol)
      return std::make_pair(static_cast<int>(t), std::array<double, 3>{l0, l1, l2});
  }
  return std::nullopt;
}

void finalize_connectivity(TriMesh& mesh) {
  mesh.edges.clear();
  mesh.triangle_edges.assign(mesh.triangles.size(), {-1, -1, -1});
  mesh.boundary_edges.clear();

  std::map<std::pair<int, int>, int> edge_index;
  std::vector<std::array<int, 2>> edge_tris;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      int a = mesh.triangles[t][k];
      int b = mesh.triangles[t][(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] =
          edge_index.try_emplace({key.first, key.second}, static_cast<int>(mesh.edges.size()));
      if (inserted) {
        mesh.edges.push_back({key.first, key.second});
        edge_tris.push_back({static_cast<int>(t), -1});
      } else {
        auto& slots = edge_tris[it->second];
        if (slots[1] != -1) throw std::logic_error("non-manifold edge in triangulation");
        slots[1] = static_cast<int>(t);
      }
      mesh.triangle_edges[t][k] = it->second;
    }
  }

  mesh.vertex_on_boundary.assign(mesh.vertices.size(), false);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const auto [t0, t1] = edge_tris[e];
    BoundaryEdge be;
    be.v = mesh.edges[e];
    be.edge = static_cast<int>(e);
    if (t1 == -1) {
      be.tag = mesh.region_of_triangle[t0] == Region::Fluid ? BoundaryTag::FluidOuter
                                                             : BoundaryTag::PorousOuter;
      be.triangle = t0;
      mesh.vertex_on_boundary[be.v[0]] = true;
      mesh.vertex_on_boundary[be.v[1]] = true;
    } else if (mesh.region_of_triangle[t0] != mesh.region_of_triangle[t1]) {
      be.tag = BoundaryTag::Interface;
      const bool first_fluid = mesh.region_of_triangle[t0] == Region::Fluid;
      be.triangle = first_fluid ? t0 : t1;
      be.porous_triangle = first_fluid ? t1 : t0;
    } else {
      continue;
    }
    mesh.boundary_edges.push_back(be);
  }
}

TriMesh build_coupled_mesh(const DomainSpec& spec, int n_divisions) {
  spec.validate();
  if (n_divisions < 2) throw std::invalid_argument("mesh needs at least 2 divisions");

  const double longest = std::max({spec.fluid.width(), spec.fluid.height(), spec.porous.height()});
  const double target = longest / n_divisions;
  auto cells = [target](double len) {
    return std::max(1, static_cast<int>(std::lround(len / target)));
  };

  TriMesh mesh;
  mesh.domain = spec;
  mesh.nx = cells(spec.fluid.width());
  mesh.ny_fluid = cells(spec.fluid.height());
  mesh.ny_porous = cells(spec.porous.height());

  const int nx = mesh.nx;
  const int rows = mesh.ny_porous + mesh.ny_fluid;
  const double dx = spec.fluid.width() / nx;
  mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (rows + 1)));
  for (int j = 0; j <= rows; ++j) {
    double y;
    if (j <= mesh.ny_porous)
      y = spec.porous.y0 + j * (spec.porous.height() / mesh.ny_porous);
    else
      y = spec.fluid.y0 + (j - mesh.ny_porous) * (spec.fluid.height() / mesh.ny_fluid);
    if (j == mesh.ny_porous) y = spec.interface_y();
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? spec.fluid.x1 : spec.fluid.x0 + i * dx;
      mesh.vertices.push_back({x, y});
    }
  }

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < rows; ++j) {
    const Region r = j < mesh.ny_porous ? Region::Porous : Region::Fluid;
    for (int i = 0; i < nx; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
      mesh.region_of_triangle.push_back(r);
      mesh.region_of_triangle.push_back(r);
    }
  }
  finalize_connectivity(mesh);
  return mesh;
}

MeshStatistics mesh_statistics(const TriMesh& mesh) {
  MeshStatistics s;
  for (const auto& e : mesh.edges) {
    const Point& a = mesh.vertices[e[0]];
    const Point& b = mesh.vertices[e[1]];
    s.h_max = std::max(s.h_max, std::hypot(b.x - a.x, b.y - a.y));
  }
  s.triangle_count = mesh.triangles.size();
  s.vertex_count = mesh.vertices.size();
  s.interface_edge_count = mesh.interface_edge_indices().size();
  return s;
}

void write_mesh_text(std::ostream& os, const TriMesh& mesh) {
  os << "# dlnsd-mesh 1\n" << std::setprecision(17);
  os << "vertices " << mesh.vertices.size() << "\n";
  for (const auto& p : mesh.vertices) os << p.x << ' ' << p.y << '\n';
  os << "triangles " << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << to_string(mesh.region_of_triangle[t])
       << '\n';
  }
  os << "boundary_edges " << mesh.boundary_edges.size() << "\n";
  for (const auto& be : mesh.boundary_edges)
    os << be.v[0] << ' ' << be.v[1] << ' ' << to_string(be.tag) << '\n';
}

void write_mesh_vtk(std::ostream& os, const TriMesh& mesh) {
  os << "# vtk DataFile Version 3.0\ndlnsd coupled mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(17);
  os << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto& p : mesh.vertices) os << p.x << ' ' << p.y << " 0\n";
  os << "CELLS " << mesh.triangles.size() << ' ' << 4 * mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << mesh.triangles.size() << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) os << "5\n";
  os << "CELL_DATA " << mesh.triangles.size() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (auto r : mesh.region_of_triangle) os << static_cast<int>(r) << '\n';
}

}  // namespace dlnsd
