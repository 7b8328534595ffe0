#include "afemstop/fem.hpp"

#include <cmath>
#include <stdexcept>

#include "afemstop/quadrature.hpp"

namespace afemstop {

std::array<Vec2, 3> barycentric_gradients(const TriMesh& mesh, int t) {
  const Vec2 a = mesh.vertices[mesh.tris[t][0]];
  const Vec2 b = mesh.vertices[mesh.tris[t][1]];
  const Vec2 c = mesh.vertices[mesh.tris[t][2]];
  const double inv2s = 1.0 / (2.0 * mesh.signed_area(t));
  auto perp = [](Vec2 v) { return Vec2{-v.y, v.x}; };
  return {inv2s * perp(c - b), inv2s * perp(a - c), inv2s * perp(b - a)};
}

Vec2 p1_gradient(const TriMesh& mesh, const P1Function& u, int t) {
  const auto g = barycentric_gradients(mesh, t);
  Vec2 r{0.0, 0.0};
  for (int i = 0; i < 3; ++i) r = r + u[mesh.tris[t][i]] * g[i];
  return r;
}

SparseSpd assemble_stiffness(const TriMesh& mesh, const PwConstField& A) {
  if (static_cast<int>(A.size()) != mesh.num_tris())
    throw DimensionError("assemble_stiffness: coefficient field size mismatch");
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(mesh.num_tris()) * 9);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (A[t] <= 0.0) throw std::invalid_argument("assemble_stiffness: A must be positive");
    const double area = mesh.signed_area(t);
    if (area <= 0.0) throw std::runtime_error("assemble_stiffness: degenerate triangle");
    const auto g = barycentric_gradients(mesh, t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.push_back({mesh.tris[t][i], mesh.tris[t][j], A[t] * area * dot(g[i], g[j])});
  }
  return csr_from_triplets(mesh.num_vertices(), std::move(trips));
}

Vec assemble_load(const TriMesh& mesh, const PwConstField& f) {
  if (static_cast<int>(f.size()) != mesh.num_tris())
    throw DimensionError("assemble_load: source field size mismatch");
  Vec b(mesh.num_vertices(), 0.0);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const double w = f[t] * mesh.signed_area(t) / 3.0;
    for (int v : mesh.tris[t]) b[v] += w;
  }
  return b;
}

P1Function DirichletSystem::expand(const Vec& u_interior) const {
  P1Function u = lift;
  for (size_t i = 0; i < interior_vertices.size(); ++i) u[interior_vertices[i]] = u_interior[i];
  return u;
}

Vec DirichletSystem::restrict_interior(const P1Function& u) const {
  Vec r(interior_vertices.size());
  for (size_t i = 0; i < interior_vertices.size(); ++i) r[i] = u[interior_vertices[i]];
  return r;
}

DirichletSystem apply_dirichlet(const SparseSpd& A_full, const Vec& load,
                                const TriMesh& mesh, const P1Function& g) {
  if (A_full.n != mesh.num_vertices() || load.size() != g.size() ||
      static_cast<int>(g.size()) != mesh.num_vertices())
    throw DimensionError("apply_dirichlet: size mismatch");

  DirichletSystem sys;
  sys.vertex_to_interior.assign(mesh.num_vertices(), -1);
  sys.lift.assign(mesh.num_vertices(), 0.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vert_boundary[v]) {
      sys.lift[v] = g[v];
      if (!std::isfinite(g[v]))
        throw std::invalid_argument("apply_dirichlet: missing or non-finite boundary value");
    } else {
      sys.vertex_to_interior[v] = static_cast<int>(sys.interior_vertices.size());
      sys.interior_vertices.push_back(v);
    }
  }

  const Vec a_lift = A_full.multiply(sys.lift);
  sys.rhs.resize(sys.interior_vertices.size());
  for (size_t i = 0; i < sys.interior_vertices.size(); ++i) {
    const int v = sys.interior_vertices[i];
    sys.rhs[i] = load[v] - a_lift[v];
  }

  std::vector<Triplet> trips;
  for (size_t i = 0; i < sys.interior_vertices.size(); ++i) {
    const int v = sys.interior_vertices[i];
    for (int k = A_full.rowptr[v]; k < A_full.rowptr[v + 1]; ++k) {
      const int j = sys.vertex_to_interior[A_full.col[k]];
      if (j >= 0) trips.push_back({static_cast<int>(i), j, A_full.val[k]});
    }
  }
  sys.A = csr_from_triplets(static_cast<int>(sys.interior_vertices.size()), std::move(trips));
  return sys;
}

std::vector<Vec2> numerical_flux(const TriMesh& mesh, const PwConstField& A,
                                 const P1Function& u) {
  std::vector<Vec2> flux(mesh.num_tris());
  for (int t = 0; t < mesh.num_tris(); ++t) flux[t] = -A[t] * p1_gradient(mesh, u, t);
  return flux;
}

double face_jump(const TriMesh& mesh, const PwConstField& A, const P1Function& u, int f) {
  if (mesh.face_boundary[f])
    throw std::invalid_argument("face_jump: boundary face has no two-sided jump");
  const int lo = mesh.face_elems[f][0], hi = mesh.face_elems[f][1];
  const Vec2 n = mesh.face_normal[f];
  return A[lo] * dot(p1_gradient(mesh, u, lo), n) - A[hi] * dot(p1_gradient(mesh, u, hi), n);
}

Vec all_face_jumps(const TriMesh& mesh, const PwConstField& A, const P1Function& u) {
  std::vector<Vec2> grad(mesh.num_tris());
  for (int t = 0; t < mesh.num_tris(); ++t) grad[t] = A[t] * p1_gradient(mesh, u, t);
  Vec j(mesh.num_faces(), 0.0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.face_boundary[f]) continue;
    j[f] = dot(grad[mesh.face_elems[f][0]], mesh.face_normal[f]) -
           dot(grad[mesh.face_elems[f][1]], mesh.face_normal[f]);
  }
  return j;
}

double energy_error_vs_exact(const TriMesh& mesh, const PwConstField& A,
                             const std::function<Vec2(Vec2)>& grad_exact,
                             const P1Function& u_h, const ErrorQuadOpts& opts) {
  const TriQuadRule& rule = tri_rule_deg5_7pt();
  double total = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const Vec2 gh = p1_gradient(mesh, u_h, t);
    auto integrand = [&](Vec2 p) {
      const Vec2 d = grad_exact(p) - gh;
      return dot(d, d);
    };
    int levels = opts.base_subdivisions;
    if (opts.has_singularity) {
      for (int v : mesh.tris[t]) {
        const Vec2 d = mesh.vertices[v] - opts.singular_point;
        if (length(d) < 1e-12) {
          levels += opts.singular_subdivisions;
          break;
        }
      }
    }
    total += A[t] * integrate_triangle_subdivided(
                        mesh.vertices[mesh.tris[t][0]], mesh.vertices[mesh.tris[t][1]],
                        mesh.vertices[mesh.tris[t][2]], rule, levels, integrand);
  }
  return std::sqrt(total);
}

double p1_energy_norm(const TriMesh& mesh, const PwConstField& A, const P1Function& u) {
  double s = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const Vec2 g = p1_gradient(mesh, u, t);
    s += A[t] * dot(g, g) * mesh.signed_area(t);
  }
  return std::sqrt(s);
}

PwConstField project_element_average(const TriMesh& mesh,
                                     const std::function<double(Vec2)>& f) {
  PwConstField out(mesh.num_tris());
  const TriQuadRule& rule = tri_rule_deg4_6pt();
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const double integral =
        integrate_triangle(mesh.vertices[mesh.tris[t][0]], mesh.vertices[mesh.tris[t][1]],
                           mesh.vertices[mesh.tris[t][2]], rule, f);
    out[t] = integral / mesh.signed_area(t);
  }
  return out;
}

}  // namespace afemstop
