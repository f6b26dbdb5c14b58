#include "dlnsd/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dlnsd {

const char* to_string(ElementType e) {
  switch (e) {
    case ElementType::P1: return "P1";
    case ElementType::P2: return "P2";
    case ElementType::P1Bubble: return "P1b";
  }
  return "?";
}

int local_dof_count(ElementType e) {
  switch (e) {
    case ElementType::P1: return 3;
    case ElementType::P2: return 6;
    case ElementType::P1Bubble: return 4;
  }
  return 0;
}

ElementPair ElementPair::from_name(const std::string& name) {
  if (name == "taylor-hood" || name == "th" || name == "P2-P1") return taylor_hood();
  if (name == "mini" || name == "P1b-P1") return mini();
  throw std::invalid_argument("unknown element pair '" + name + "' (expected taylor-hood or mini)");
}

std::string ElementPair::name() const {
  if (velocity == ElementType::P2) return "taylor-hood";
  return "mini";
}

void ElementPair::validate() const {
  const bool th = velocity == ElementType::P2 && pressure == ElementType::P1;
  const bool mini = velocity == ElementType::P1Bubble && pressure == ElementType::P1;
  if (!th && !mini)
    throw std::invalid_argument("velocity/pressure pair must be Taylor-Hood (P2-P1) or MINI (P1b-P1)");
  if (head == ElementType::P1Bubble) throw std::invalid_argument("head space must be P1 or P2");
}

// --- spaces ---------------------------------------------------------------

ScalarSpace build_scalar_space(const TriMesh& mesh, ElementType type, Region region,
                               BoundaryTag outer_tag) {
  ScalarSpace s;
  s.type = type;
  s.region = region;
  s.dofs_per_cell = local_dof_count(type);
  s.cell_of_triangle.assign(mesh.triangles.size(), -1);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    if (mesh.region_of_triangle[t] == region) {
      s.cell_of_triangle[t] = static_cast<int>(s.triangles.size());
      s.triangles.push_back(static_cast<int>(t));
    }

  std::vector<int> vertex_dof(mesh.vertices.size(), -1);
  std::vector<int> edge_dof(mesh.edges.size(), -1);
  for (int t : s.triangles)
    for (int k = 0; k < 3; ++k) {
      vertex_dof[mesh.triangles[t][k]] = 0;
      edge_dof[mesh.triangle_edges[t][k]] = 0;
    }
  int next = 0;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (vertex_dof[v] == 0) {
      vertex_dof[v] = next++;
      s.node_points.push_back(mesh.vertices[v]);
      s.node_kind.push_back(NodeKind::Vertex);
      s.node_cell.push_back(-1);
    }
  if (type == ElementType::P2) {
    for (std::size_t e = 0; e < mesh.edges.size(); ++e)
      if (edge_dof[e] == 0) {
        edge_dof[e] = next++;
        const Point& a = mesh.vertices[mesh.edges[e][0]];
        const Point& b = mesh.vertices[mesh.edges[e][1]];
        s.node_points.push_back(0.5 * (a + b));
        s.node_kind.push_back(NodeKind::Edge);
        s.node_cell.push_back(-1);
      }
  }

  s.cell_dofs.reserve(s.triangles.size() * static_cast<std::size_t>(s.dofs_per_cell));
  for (std::size_t c = 0; c < s.triangles.size(); ++c) {
    const int t = s.triangles[c];
    for (int k = 0; k < 3; ++k) s.cell_dofs.push_back(vertex_dof[mesh.triangles[t][k]]);
    if (type == ElementType::P2)
      for (int k = 0; k < 3; ++k) s.cell_dofs.push_back(edge_dof[mesh.triangle_edges[t][k]]);
    if (type == ElementType::P1Bubble) {
      const auto& tri = mesh.triangles[t];
      s.cell_dofs.push_back(next++);
      s.node_points.push_back((1.0 / 3.0) *
                              (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]));
      s.node_kind.push_back(NodeKind::Bubble);
      s.node_cell.push_back(static_cast<int>(c));
    }
  }
  s.n_dofs = static_cast<std::size_t>(next);

  s.on_outer_boundary.assign(s.n_dofs, false);
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != outer_tag) continue;
    s.on_outer_boundary[vertex_dof[be.v[0]]] = true;
    s.on_outer_boundary[vertex_dof[be.v[1]]] = true;
    if (type == ElementType::P2) s.on_outer_boundary[edge_dof[be.edge]] = true;
  }
  return s;
}

DofMap build_dofmap(const TriMesh& mesh, ElementPair pair) {
  pair.validate();
  DofMap d;
  d.pair = pair;
  d.velocity = build_scalar_space(mesh, pair.velocity, Region::Fluid, BoundaryTag::FluidOuter);
  d.head = build_scalar_space(mesh, pair.head, Region::Porous, BoundaryTag::PorousOuter);
  d.pressure = build_scalar_space(mesh, pair.pressure, Region::Fluid, BoundaryTag::FluidOuter);
  d.u_offset = 0;
  d.phi_offset = 2 * d.velocity.n_dofs;
  d.p_offset = d.phi_offset + d.head.n_dofs;
  d.total = d.p_offset + d.pressure.n_dofs;

  d.essential.assign(d.total, false);
  for (std::size_t i = 0; i < d.velocity.n_dofs; ++i)
    if (d.velocity.on_outer_boundary[i]) d.essential[d.u_dof(0, i)] = d.essential[d.u_dof(1, i)] = true;
  for (std::size_t i = 0; i < d.head.n_dofs; ++i)
    if (d.head.on_outer_boundary[i]) d.essential[d.phi_dof(i)] = true;
  for (std::size_t i = 0; i < d.total; ++i)
    if (d.essential[i]) d.essential_dofs.push_back(i);
  return d;
}

// --- element helpers ------------------------------------------------------

Point CellGeometry::map(const std::array<double, 3>& b) const {
  return {b[0] * vertices[0].x + b[1] * vertices[1].x + b[2] * vertices[2].x,
          b[0] * vertices[0].y + b[1] * vertices[1].y + b[2] * vertices[2].y};
}

CellGeometry cell_geometry(const TriMesh& mesh, int tri) {
  CellGeometry g;
  const auto& t = mesh.triangles[tri];
  for (int k = 0; k < 3; ++k) g.vertices[k] = mesh.vertices[t[k]];
  const Point &a = g.vertices[0], &b = g.vertices[1], &c = g.vertices[2];
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  if (!(det > 0.0)) throw std::logic_error("triangle with non-positive orientation");
  g.area = 0.5 * det;
  g.grad_bary[0] = {(b.y - c.y) / det, (c.x - b.x) / det};
  g.grad_bary[1] = {(c.y - a.y) / det, (a.x - c.x) / det};
  g.grad_bary[2] = {(a.y - b.y) / det, (b.x - a.x) / det};
  return g;
}

void eval_basis(ElementType type, const std::array<double, 3>& l, std::span<double> v) {
  switch (type) {
    case ElementType::P1:
      for (int i = 0; i < 3; ++i) v[i] = l[i];
      break;
    case ElementType::P2:
      for (int i = 0; i < 3; ++i) v[i] = l[i] * (2.0 * l[i] - 1.0);
      for (int k = 0; k < 3; ++k) v[3 + k] = 4.0 * l[k] * l[(k + 1) % 3];
      break;
    case ElementType::P1Bubble:
      for (int i = 0; i < 3; ++i) v[i] = l[i];
      v[3] = 27.0 * l[0] * l[1] * l[2];
      break;
  }
}

void eval_basis_grad(ElementType type, const std::array<double, 3>& l, const CellGeometry& g,
                     std::span<Vec2> d) {
  const auto& gl = g.grad_bary;
  switch (type) {
    case ElementType::P1:
      for (int i = 0; i < 3; ++i) d[i] = gl[i];
      break;
    case ElementType::P2:
      for (int i = 0; i < 3; ++i) d[i] = (4.0 * l[i] - 1.0) * gl[i];
      for (int k = 0; k < 3; ++k) {
        const int j = (k + 1) % 3;
        d[3 + k] = 4.0 * (l[j] * gl[k] + l[k] * gl[j]);
      }
      break;
    case ElementType::P1Bubble:
      for (int i = 0; i < 3; ++i) d[i] = gl[i];
      d[3] = 27.0 * (l[1] * l[2] * gl[0] + l[0] * l[2] * gl[1] + l[0] * l[1] * gl[2]);
      break;
  }
}

std::array<double, 3> edge_point_bary(const TriMesh& mesh, int tri, int v0, int v1, double s) {
  std::array<double, 3> b{0.0, 0.0, 0.0};
  bool found0 = false, found1 = false;
  for (int k = 0; k < 3; ++k) {
    if (mesh.triangles[tri][k] == v0) { b[k] += 1.0 - s; found0 = true; }
    if (mesh.triangles[tri][k] == v1) { b[k] += s; found1 = true; }
  }
  if (!found0 || !found1) throw std::logic_error("edge does not belong to triangle");
  return b;
}

Vec2 fluid_normal(const TriMesh& mesh, const BoundaryEdge& edge) {
  const Point a = mesh.vertices[edge.v[0]];
  const Point b = mesh.vertices[edge.v[1]];
  const auto& tri = mesh.triangles[edge.triangle];
  int opposite = tri[0];
  for (int v : tri)
    if (v != edge.v[0] && v != edge.v[1]) opposite = v;
  const Vec2 t = b - a;
  Vec2 n{t.y, -t.x};
  n = (1.0 / norm(n)) * n;
  if (dot(n, mesh.vertices[opposite] - a) > 0.0) n = -1.0 * n;
  return n;
}

namespace {

constexpr int kMaxLocal = 6;

struct Local {
  std::array<double, kMaxLocal> v{};
  std::array<Vec2, kMaxLocal> d{};
};

void eval_local(const ScalarSpace& s, const std::array<double, 3>& bary, const CellGeometry& g,
                Local& out, bool grads) {
  eval_basis(s.type, bary, out.v);
  if (grads) eval_basis_grad(s.type, bary, g, out.d);
}

template <class Fn>
void for_each_interface_edge(const TriMesh& mesh, Fn&& fn) {
  for (const auto& be : mesh.boundary_edges)
    if (be.tag == BoundaryTag::Interface) fn(be);
}

double edge_length(const TriMesh& mesh, const BoundaryEdge& be) {
  return norm(mesh.vertices[be.v[1]] - mesh.vertices[be.v[0]]);
}

}  // namespace

// --- assembly -------------------------------------------------------------

SparseMatrix assemble_mass(const TriMesh& mesh, const DofMap& dofs, double fluid_weight,
                           double porous_weight, const QuadratureRule& q) {
  TripletBuilder tb(dofs.total, dofs.total);
  Local b;
  auto scalar_mass = [&](const ScalarSpace& s, double w, auto&& global) {
    const int n = s.dofs_per_cell;
    for (std::size_t c = 0; c < s.triangles.size(); ++c) {
      const auto g = cell_geometry(mesh, s.triangles[c]);
      std::array<double, kMaxLocal * kMaxLocal> m{};
      for (std::size_t p = 0; p < q.tri_points.size(); ++p) {
        eval_local(s, q.tri_points[p], g, b, false);
        const double wq = w * q.tri_weights[p] * g.area;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) m[i * n + j] += wq * b.v[i] * b.v[j];
      }
      const auto cd = s.dofs_of_cell(static_cast<int>(c));
      global(cd, m, n);
    }
  };
  scalar_mass(dofs.velocity, fluid_weight, [&](auto cd, const auto& m, int n) {
    for (int comp = 0; comp < 2; ++comp)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tb.add(dofs.u_dof(comp, cd[i]), dofs.u_dof(comp, cd[j]), m[i * n + j]);
  });
  scalar_mass(dofs.head, porous_weight, [&](auto cd, const auto& m, int n) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tb.add(dofs.phi_dof(cd[i]), dofs.phi_dof(cd[j]), m[i * n + j]);
  });
  return tb.build();
}

namespace {

template <class Kernel>
SparseMatrix assemble_velocity_stiffness(const TriMesh& mesh, const DofMap& dofs,
                                         const QuadratureRule& q, Kernel&& kernel) {
  TripletBuilder tb(dofs.total, dofs.total);
  const auto& s = dofs.velocity;
  const int n = s.dofs_per_cell;
  Local b;
  for (std::size_t c = 0; c < s.triangles.size(); ++c) {
    const auto g = cell_geometry(mesh, s.triangles[c]);
    // local[(i*2+ci)*(2n) + j*2+cj]
    std::vector<double> m(static_cast<std::size_t>(4 * n * n), 0.0);
    for (std::size_t p = 0; p < q.tri_points.size(); ++p) {
      eval_local(s, q.tri_points[p], g, b, true);
      const double wq = q.tri_weights[p] * g.area;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int ci = 0; ci < 2; ++ci)
            for (int cj = 0; cj < 2; ++cj)
              m[static_cast<std::size_t>((i * 2 + ci) * 2 * n + j * 2 + cj)] +=
                  wq * kernel(b.d[i], ci, b.d[j], cj);
    }
    const auto cd = s.dofs_of_cell(static_cast<int>(c));
    for (int i = 0; i < n; ++i)
      for (int ci = 0; ci < 2; ++ci)
        for (int j = 0; j < n; ++j)
          for (int cj = 0; cj < 2; ++cj) {
            const double v = m[static_cast<std::size_t>((i * 2 + ci) * 2 * n + j * 2 + cj)];
            if (v != 0.0) tb.add(dofs.u_dof(ci, cd[i]), dofs.u_dof(cj, cd[j]), v);
          }
  }
  return tb.build();
}

}  // namespace

SparseMatrix assemble_stokes_viscous(const TriMesh& mesh, const DofMap& dofs, double coeff,
                                     const QuadratureRule& q) {
  // D(N_i e_ci) : D(N_j e_cj) = 1/2 (delta_{ci cj} grad N_i . grad N_j + d_cj N_i d_ci N_j)
  return assemble_velocity_stiffness(mesh, dofs, q, [coeff](Vec2 gi, int ci, Vec2 gj, int cj) {
    const double diag = ci == cj ? dot(gi, gj) : 0.0;
    return coeff * 0.5 * (diag + gi[cj] * gj[ci]);
  });
}

SparseMatrix assemble_vector_laplacian(const TriMesh& mesh, const DofMap& dofs, double coeff,
                                       const QuadratureRule& q) {
  return assemble_velocity_stiffness(mesh, dofs, q, [coeff](Vec2 gi, int ci, Vec2 gj, int cj) {
    return ci == cj ? coeff * dot(gi, gj) : 0.0;
  });
}

SparseMatrix assemble_bjs(const TriMesh& mesh, const DofMap& dofs, double coeff,
                          const QuadratureRule& q) {
  TripletBuilder tb(dofs.total, dofs.total);
  const auto& s = dofs.velocity;
  const int n = s.dofs_per_cell;
  std::array<double, kMaxLocal> v{};
  for_each_interface_edge(mesh, [&](const BoundaryEdge& be) {
    const int cell = s.cell_of_triangle[be.triangle];
    const Vec2 nf = fluid_normal(mesh, be);
    const double len = edge_length(mesh, be);
    const Mat2 proj{{{1.0 - nf.x * nf.x, -nf.x * nf.y}, {-nf.y * nf.x, 1.0 - nf.y * nf.y}}};
    const auto cd = s.dofs_of_cell(cell);
    for (std::size_t p = 0; p < q.edge_points.size(); ++p) {
      eval_basis(s.type, edge_point_bary(mesh, be.triangle, be.v[0], be.v[1], q.edge_points[p]), v);
      const double wq = coeff * q.edge_weights[p] * len;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double vv = wq * v[i] * v[j];
          if (vv == 0.0) continue;
          for (int ci = 0; ci < 2; ++ci)
            for (int cj = 0; cj < 2; ++cj)
              if (proj[ci][cj] != 0.0)
                tb.add(dofs.u_dof(ci, cd[i]), dofs.u_dof(cj, cd[j]), vv * proj[ci][cj]);
        }
    }
  });
  return tb.build();
}

SparseMatrix assemble_darcy(const TriMesh& mesh, const DofMap& dofs, double g, const Mat2& K,
                            const QuadratureRule& q) {
  if (!is_spd(K)) throw std::domain_error("hydraulic conductivity K must be symmetric positive definite");
  TripletBuilder tb(dofs.total, dofs.total);
  const auto& s = dofs.head;
  const int n = s.dofs_per_cell;
  Local b;
  for (std::size_t c = 0; c < s.triangles.size(); ++c) {
    const auto geo = cell_geometry(mesh, s.triangles[c]);
    std::array<double, kMaxLocal * kMaxLocal> m{};
    for (std::size_t p = 0; p < q.tri_points.size(); ++p) {
      eval_local(s, q.tri_points[p], geo, b, true);
      const double wq = g * q.tri_weights[p] * geo.area;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] += wq * dot(b.d[i], mat_vec(K, b.d[j]));
    }
    const auto cd = s.dofs_of_cell(static_cast<int>(c));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tb.add(dofs.phi_dof(cd[i]), dofs.phi_dof(cd[j]), m[i * n + j]);
  }
  return tb.build();
}

SparseMatrix assemble_interface_coupling(const TriMesh& mesh, const DofMap& dofs, double g,
                                         const QuadratureRule& q) {
  TripletBuilder tb(dofs.total, dofs.total);
  if (g == 0.0) return tb.build();
  const auto& us = dofs.velocity;
  const auto& hs = dofs.head;
  std::array<double, kMaxLocal> uv{}, hv{};
  for_each_interface_edge(mesh, [&](const BoundaryEdge& be) {
    const int ucell = us.cell_of_triangle[be.triangle];
    const int hcell = hs.cell_of_triangle[be.porous_triangle];
    const Vec2 nf = fluid_normal(mesh, be);
    const double len = edge_length(mesh, be);
    const auto ucd = us.dofs_of_cell(ucell);
    const auto hcd = hs.dofs_of_cell(hcell);
    for (std::size_t p = 0; p < q.edge_points.size(); ++p) {
      const double s = q.edge_points[p];
      eval_basis(us.type, edge_point_bary(mesh, be.triangle, be.v[0], be.v[1], s), uv);
      eval_basis(hs.type, edge_point_bary(mesh, be.porous_triangle, be.v[0], be.v[1], s), hv);
      const double wq = g * q.edge_weights[p] * len;
      for (int i = 0; i < us.dofs_per_cell; ++i)
        for (int j = 0; j < hs.dofs_per_cell; ++j) {
          const double vv = wq * uv[i] * hv[j];
          if (vv == 0.0) continue;
          for (int c = 0; c < 2; ++c) {
            const double nc = c == 0 ? nf.x : nf.y;
            if (nc == 0.0) continue;
            tb.add(dofs.u_dof(c, ucd[i]), dofs.phi_dof(hcd[j]), vv * nc);
            tb.add(dofs.phi_dof(hcd[j]), dofs.u_dof(c, ucd[i]), -vv * nc);
          }
        }
    }
  });
  return tb.build();
}

SparseMatrix assemble_divergence(const TriMesh& mesh, const DofMap& dofs, const QuadratureRule& q) {
  TripletBuilder tb(dofs.total, dofs.total);
  const auto& us = dofs.velocity;
  const auto& ps = dofs.pressure;
  Local ub, pb;
  for (std::size_t c = 0; c < us.triangles.size(); ++c) {
    const int tri = us.triangles[c];
    const int pc = ps.cell_of_triangle[tri];
    const auto geo = cell_geometry(mesh, tri);
    const int nu = us.dofs_per_cell, np = ps.dofs_per_cell;
    std::array<double, kMaxLocal * kMaxLocal * 2> m{};
    for (std::size_t p = 0; p < q.tri_points.size(); ++p) {
      eval_local(us, q.tri_points[p], geo, ub, true);
      eval_local(ps, q.tri_points[p], geo, pb, false);
      const double wq = q.tri_weights[p] * geo.area;
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < nu; ++j)
          for (int comp = 0; comp < 2; ++comp)
            m[(i * nu + j) * 2 + comp] -= wq * pb.v[i] * ub.d[j][comp];
    }
    const auto ucd = us.dofs_of_cell(static_cast<int>(c));
    const auto pcd = ps.dofs_of_cell(pc);
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < nu; ++j)
        for (int comp = 0; comp < 2; ++comp) {
          const double v = m[(i * nu + j) * 2 + comp];
          if (v != 0.0) tb.add(dofs.p_dof(pcd[i]), dofs.u_dof(comp, ucd[j]), v);
        }
  }
  return tb.build();
}

std::vector<double> assemble_load(const TriMesh& mesh, const DofMap& dofs, double t,
                                  const LoadData& data, const QuadratureRule& q) {
  std::vector<double> f(dofs.total, 0.0);
  Local b;
  if (data.fluid_force) {
    const auto& s = dofs.velocity;
    for (std::size_t c = 0; c < s.triangles.size(); ++c) {
      const auto geo = cell_geometry(mesh, s.triangles[c]);
      const auto cd = s.dofs_of_cell(static_cast<int>(c));
      for (std::size_t p = 0; p < q.tri_points.size(); ++p) {
        eval_local(s, q.tri_points[p], geo, b, false);
        const Vec2 F = data.fluid_force(geo.map(q.tri_points[p]), t);
        const double wq = q.tri_weights[p] * geo.area;
        for (int i = 0; i < s.dofs_per_cell; ++i) {
          f[dofs.u_dof(0, cd[i])] += wq * F.x * b.v[i];
          f[dofs.u_dof(1, cd[i])] += wq * F.y * b.v[i];
        }
      }
    }
  }
  if (data.porous_source) {
    const auto& s = dofs.head;
    for (std::size_t c = 0; c < s.triangles.size(); ++c) {
      const auto geo = cell_geometry(mesh, s.triangles[c]);
      const auto cd = s.dofs_of_cell(static_cast<int>(c));
      for (std::size_t p = 0; p < q.tri_points.size(); ++p) {
        eval_local(s, q.tri_points[p], geo, b, false);
        const double F = data.porous_source(geo.map(q.tri_points[p]), t);
        const double wq = data.g * q.tri_weights[p] * geo.area;
        for (int i = 0; i < s.dofs_per_cell; ++i) f[dofs.phi_dof(cd[i])] += wq * F * b.v[i];
      }
    }
  }
  if (data.interface_traction || data.interface_flux) {
    std::array<double, kMaxLocal> v{};
    for_each_interface_edge(mesh, [&](const BoundaryEdge& be) {
      const double len = edge_length(mesh, be);
      const Point A = mesh.vertices[be.v[0]], B = mesh.vertices[be.v[1]];
      for (std::size_t p = 0; p < q.edge_points.size(); ++p) {
        const double s = q.edge_points[p];
        const Point x = (1.0 - s) * A + s * B;
        const double wq = q.edge_weights[p] * len;
        if (data.interface_traction) {
          const auto& us = dofs.velocity;
          const auto cd = us.dofs_of_cell(us.cell_of_triangle[be.triangle]);
          eval_basis(us.type, edge_point_bary(mesh, be.triangle, be.v[0], be.v[1], s), v);
          const Vec2 tr = data.interface_traction(x, t);
          for (int i = 0; i < us.dofs_per_cell; ++i) {
            f[dofs.u_dof(0, cd[i])] += wq * tr.x * v[i];
            f[dofs.u_dof(1, cd[i])] += wq * tr.y * v[i];
          }
        }
        if (data.interface_flux) {
          const auto& hs = dofs.head;
          const auto cd = hs.dofs_of_cell(hs.cell_of_triangle[be.porous_triangle]);
          eval_basis(hs.type, edge_point_bary(mesh, be.porous_triangle, be.v[0], be.v[1], s), v);
          const double m = data.interface_flux(x, t);
          for (int i = 0; i < hs.dofs_per_cell; ++i) f[dofs.phi_dof(cd[i])] += data.g * wq * m * v[i];
        }
      }
    });
  }
  for (auto i : dofs.essential_dofs) f[i] = 0.0;
  return f;
}

// --- interpolation ----------------------------------------------------------

namespace {

template <class Fn, class Store>
void interpolate_scalar_space(const TriMesh& mesh, const ScalarSpace& s, Fn&& value, Store&& store) {
  std::vector<double> nodal(s.n_dofs, 0.0);
  for (std::size_t i = 0; i < s.n_dofs; ++i)
    if (s.node_kind[i] != NodeKind::Bubble) nodal[i] = value(s.node_points[i]);
  for (std::size_t i = 0; i < s.n_dofs; ++i) {
    if (s.node_kind[i] == NodeKind::Bubble) {
      // bubble = 1 at the centroid where each vertex function is 1/3
      const auto cd = s.dofs_of_cell(s.node_cell[i]);
      nodal[i] = value(s.node_points[i]) - (nodal[cd[0]] + nodal[cd[1]] + nodal[cd[2]]) / 3.0;
    }
    store(i, nodal[i]);
  }
  (void)mesh;
}

}  // namespace

std::vector<double> interpolate(const TriMesh& mesh, const DofMap& dofs, const FieldSet& f, double t) {
  std::vector<double> x(dofs.total, 0.0);
  if (f.velocity) {
    for (int comp = 0; comp < 2; ++comp)
      interpolate_scalar_space(
          mesh, dofs.velocity, [&](Point p) { return f.velocity(p, t)[comp]; },
          [&](std::size_t i, double v) { x[dofs.u_dof(comp, i)] = v; });
  }
  if (f.head)
    interpolate_scalar_space(
        mesh, dofs.head, [&](Point p) { return f.head(p, t); },
        [&](std::size_t i, double v) { x[dofs.phi_dof(i)] = v; });
  if (f.pressure)
    interpolate_scalar_space(
        mesh, dofs.pressure, [&](Point p) { return f.pressure(p, t); },
        [&](std::size_t i, double v) { x[dofs.p_dof(i)] = v; });
  return x;
}

void apply_essential_values(const TriMesh& mesh, const DofMap& dofs, const FieldSet& f, double t,
                            std::span<double> x) {
  (void)mesh;
  if (x.size() != dofs.total) throw std::invalid_argument("state size mismatch");
  for (std::size_t i = 0; i < dofs.velocity.n_dofs; ++i)
    if (dofs.velocity.on_outer_boundary[i]) {
      const Vec2 v = f.velocity ? f.velocity(dofs.velocity.node_points[i], t) : Vec2{};
      x[dofs.u_dof(0, i)] = v.x;
      x[dofs.u_dof(1, i)] = v.y;
    }
  for (std::size_t i = 0; i < dofs.head.n_dofs; ++i)
    if (dofs.head.on_outer_boundary[i])
      x[dofs.phi_dof(i)] = f.head ? f.head(dofs.head.node_points[i], t) : 0.0;
}

Vec2 eval_velocity(const TriMesh& mesh, const DofMap& dofs, std::span<const double> x, int tri,
                   const std::array<double, 3>& bary) {
  (void)mesh;
  const auto& s = dofs.velocity;
  const int c = s.cell_of_triangle.at(tri);
  if (c < 0) throw std::invalid_argument("velocity evaluated outside the fluid region");
  std::array<double, kMaxLocal> v{};
  eval_basis(s.type, bary, v);
  Vec2 out;
  const auto cd = s.dofs_of_cell(c);
  for (int i = 0; i < s.dofs_per_cell; ++i) {
    out.x += v[i] * x[dofs.u_dof(0, cd[i])];
    out.y += v[i] * x[dofs.u_dof(1, cd[i])];
  }
  return out;
}

namespace {

double eval_scalar(const ScalarSpace& s, std::size_t offset, std::span<const double> x, int tri,
                   const std::array<double, 3>& bary) {
  const int c = s.cell_of_triangle.at(tri);
  if (c < 0) throw std::invalid_argument("field evaluated outside its region");
  std::array<double, kMaxLocal> v{};
  eval_basis(s.type, bary, v);
  double out = 0.0;
  const auto cd = s.dofs_of_cell(c);
  for (int i = 0; i < s.dofs_per_cell; ++i) out += v[i] * x[offset + cd[i]];
  return out;
}

}  // namespace

double eval_head(const TriMesh& mesh, const DofMap& dofs, std::span<const double> x, int tri,
                 const std::array<double, 3>& bary) {
  (void)mesh;
  return eval_scalar(dofs.head, dofs.phi_offset, x, tri, bary);
}

double eval_pressure(const TriMesh& mesh, const DofMap& dofs, std::span<const double> x, int tri,
                     const std::array<double, 3>& bary) {
  (void)mesh;
  return eval_scalar(dofs.pressure, dofs.p_offset, x, tri, bary);
}

// --- error norms ------------------------------------------------------------

FieldErrors field_error_norms(const TriMesh& mesh, const DofMap& dofs, std::span<const double> x,
                              const ExactFields& exact, double t, const QuadratureRule& q) {
  if (x.size() != dofs.total) throw std::invalid_argument("state size mismatch");
  FieldErrors err;
  Local b;

  {
    const auto& s = dofs.velocity;
    double l2 = 0.0, semi = 0.0;
    for (std::size_t c = 0; c < s.triangles.size(); ++c) {
      const auto geo = cell_geometry(mesh, s.triangles[c]);
      const auto cd = s.dofs_of_cell(static_cast<int>(c));
      for (std::size_t p = 0; p < q.tri_points.size(); ++p) {
        eval_local(s, q.tri_points[p], geo, b, true);
        Vec2 uh;
        Mat2 gh{};
        for (int i = 0; i < s.dofs_per_cell; ++i) {
          const double ux = x[dofs.u_dof(0, cd[i])], uy = x[dofs.u_dof(1, cd[i])];
          uh = uh + Vec2{ux * b.v[i], uy * b.v[i]};
          gh[0][0] += ux * b.d[i].x;
          gh[0][1] += ux * b.d[i].y;
          gh[1][0] += uy * b.d[i].x;
          gh[1][1] += uy * b.d[i].y;
        }
        const Point xp = geo.map(q.tri_points[p]);
        const Vec2 ue = exact.velocity ? exact.velocity(xp, t) : Vec2{};
        const Mat2 ge = exact.velocity_grad ? exact.velocity_grad(xp, t) : Mat2{};
        const double wq = q.tri_weights[p] * geo.area;
        const Vec2 e = uh - ue;
        l2 += wq * dot(e, e);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) semi += wq * (gh[i][j] - ge[i][j]) * (gh[i][j] - ge[i][j]);
      }
    }
    err.velocity = {std::sqrt(l2), std::sqrt(semi)};
  }

  auto scalar_errors = [&](const ScalarSpace& s, std::size_t offset, const ScalarField& f,
                           const GradientField& df) {
    double l2 = 0.0, semi = 0.0;
    for (std::size_t c = 0; c < s.triangles.size(); ++c) {
      const auto geo = cell_geometry(mesh, s.triangles[c]);
      const auto cd = s.dofs_of_cell(static_cast<int>(c));
      for (std::size_t p = 0; p < q.tri_points.size(); ++p) {
        eval_local(s, q.tri_points[p], geo, b, true);
        double vh = 0.0;
        Vec2 gh;
        for (int i = 0; i < s.dofs_per_cell; ++i) {
          const double xi = x[offset + cd[i]];
          vh += xi * b.v[i];
          gh = gh + xi * b.d[i];
        }
        const Point xp = geo.map(q.tri_points[p]);
        const double ve = f ? f(xp, t) : 0.0;
        const Vec2 ge = df ? df(xp, t) : Vec2{};
        const double wq = q.tri_weights[p] * geo.area;
        l2 += wq * (vh - ve) * (vh - ve);
        const Vec2 e = gh - ge;
        semi += wq * dot(e, e);
      }
    }
    return NormPair{std::sqrt(l2), std::sqrt(semi)};
  };
  err.head = scalar_errors(dofs.head, dofs.phi_offset, exact.head, exact.head_grad);
  err.pressure = scalar_errors(dofs.pressure, dofs.p_offset, exact.pressure, exact.pressure_grad);
  return err;
}

}  // namespace dlnsd
