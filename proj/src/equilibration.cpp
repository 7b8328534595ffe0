#include "afemstop/equilibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace afemstop {

namespace {

// local face lengths and opposite vertices of element t
struct ElemGeom {
  std::array<double, 3> face_len;
  std::array<Vec2, 3> opp;   // vertex opposite local face i (= local vertex i)
  std::array<Vec2, 3> mid;   // midpoint of local face i
  double area;
};

ElemGeom elem_geom(const TriMesh& mesh, int t) {
  ElemGeom g;
  const std::array<Vec2, 3> p = {mesh.vertices[mesh.tris[t][0]],
                                 mesh.vertices[mesh.tris[t][1]],
                                 mesh.vertices[mesh.tris[t][2]]};
  g.area = mesh.signed_area(t);
  for (int i = 0; i < 3; ++i) {
    const Vec2 a = p[(i + 1) % 3], b = p[(i + 2) % 3];
    g.face_len[i] = length(b - a);
    g.opp[i] = p[i];
    g.mid[i] = 0.5 * (a + b);
  }
  return g;
}

int local_face_index(const TriMesh& mesh, int t, int f) {
  for (int i = 0; i < 3; ++i)
    if (mesh.tri_faces[t][i] == f) return i;
  throw std::logic_error("local_face_index: face not on element");
}

int worker_count() {
  if (const char* env = std::getenv("AFEM_STOP_THREADS")) {
    const int k = std::atoi(env);
    if (k >= 1) return std::min<int>(k, std::thread::hardware_concurrency() > 0
                                            ? std::thread::hardware_concurrency()
                                            : 1);
  }
  return 1;
}

}  // namespace

double rt0_divergence(const TriMesh& mesh, const BrokenRT0Field& s, int t) {
  const ElemGeom g = elem_geom(mesh, t);
  double d = 0.0;
  for (int i = 0; i < 3; ++i) d += s.coeff[t][i] * g.face_len[i];
  return d / g.area;
}

double rt0_face_jump(const TriMesh& mesh, const BrokenRT0Field& s, int f) {
  if (mesh.face_boundary[f])
    throw std::invalid_argument("rt0_face_jump: boundary face");
  const int lo = mesh.face_elems[f][0], hi = mesh.face_elems[f][1];
  // outward-flux coefficients: the minus-side trace along n_F is +coeff,
  // the plus-side trace is -coeff
  return s.coeff[lo][local_face_index(mesh, lo, f)] +
         s.coeff[hi][local_face_index(mesh, hi, f)];
}

Vec2 rt0_eval(const TriMesh& mesh, const BrokenRT0Field& s, int t, Vec2 p) {
  const ElemGeom g = elem_geom(mesh, t);
  Vec2 v{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    const double scale = s.coeff[t][i] * g.face_len[i] / (2.0 * g.area);
    v = v + scale * (p - g.opp[i]);
  }
  return v;
}

DenseMat rt0_mass_matrix(const TriMesh& mesh, const PwConstField& A, int t) {
  const ElemGeom g = elem_geom(mesh, t);
  DenseMat m(3, 3);
  // psi_i . psi_j is quadratic; the midpoint rule integrates it exactly
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int q = 0; q < 3; ++q) s += dot(g.mid[q] - g.opp[i], g.mid[q] - g.opp[j]);
      const double scale =
          g.face_len[i] * g.face_len[j] / (4.0 * g.area * g.area) * (g.area / 3.0);
      m(i, j) = m(j, i) = scale * s / A[t];
    }
  }
  return m;
}

ProjectedPatchData projected_data(const TriMesh& mesh, const PwConstField& A,
                                  const PwConstField& f, const P1Function& u,
                                  const Patch& patch) {
  ProjectedPatchData d;
  d.rbar.resize(patch.elems.size());
  for (size_t k = 0; k < patch.elems.size(); ++k) d.rbar[k] = f[patch.elems[k]] / 3.0;
  d.jbar.resize(patch.fan_faces.size());
  for (size_t k = 0; k < patch.fan_faces.size(); ++k)
    d.jbar[k] = face_jump(mesh, A, u, patch.fan_faces[k]) / 2.0;
  return d;
}

double compensation_constant(const TriMesh& mesh, const PwConstField& A,
                             const PwConstField& f, const P1Function& u, int z) {
  if (mesh.vert_boundary[z]) return 0.0;
  return compensation_constant(mesh, A, f, u, vertex_patch(mesh, z));
}

double compensation_constant(const TriMesh& mesh, const PwConstField& A,
                             const PwConstField& f, const P1Function& u,
                             const Patch& patch) {
  if (mesh.vert_boundary[patch.center]) return 0.0;
  double s = 0.0;
  // (j_F, phi_z)_F = j_F |F| / 2 since phi_z is linear with value 1 at z
  for (int fc : patch.fan_faces)
    s += face_jump(mesh, A, u, fc) * mesh.face_length(fc) / 2.0;
  // (r_K, phi_z)_K = f_K |K| / 3
  for (int t : patch.elems) s -= f[t] * mesh.signed_area(t) / 3.0;
  return s / patch.area;
}

PatchProblem build_patch_problem(const TriMesh& mesh, const PwConstField& A,
                                 const PwConstField& f, const P1Function& u,
                                 const Patch& patch) {
  const int z = patch.center;
  const bool interior = !mesh.vert_boundary[z];
  const ProjectedPatchData data = projected_data(mesh, A, f, u, patch);
  const double cz = interior ? compensation_constant(mesh, A, f, u, patch) : 0.0;

  const int ne = static_cast<int>(patch.elems.size());

  // face kinds per (element, local face): jump-constrained fan faces keep
  // their dofs, patch-rim faces off dOmega are pinned to zero (dropped),
  // rim faces on dOmega stay free
  enum class Kind { fan, zero, free_dof };
  std::vector<std::array<Kind, 3>> kind(ne);
  std::vector<std::array<int, 3>> dof(ne, {-1, -1, -1});

  auto face_kind = [&](int fc) {
    const bool touches = mesh.face_verts[fc][0] == z || mesh.face_verts[fc][1] == z;
    if (!mesh.face_boundary[fc] && touches) return Kind::fan;
    if (interior) return Kind::zero;
    return mesh.face_boundary[fc] ? Kind::free_dof : Kind::zero;
  };

  PatchProblem p;
  for (int k = 0; k < ne; ++k) {
    const int t = patch.elems[k];
    for (int i = 0; i < 3; ++i) {
      kind[k][i] = face_kind(mesh.tri_faces[t][i]);
      if (kind[k][i] != Kind::zero) {
        dof[k][i] = static_cast<int>(p.dof_elem.size());
        p.dof_elem.push_back(k);
        p.dof_face.push_back(i);
      }
    }
  }
  const int nd = static_cast<int>(p.dof_elem.size());

  // objective: block-diagonal A^{-1}-weighted RT0 mass
  p.M = DenseMat(nd, nd);
  for (int k = 0; k < ne; ++k) {
    const DenseMat mk = rt0_mass_matrix(mesh, A, patch.elems[k]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (dof[k][i] >= 0 && dof[k][j] >= 0) p.M(dof[k][i], dof[k][j]) = mk(i, j);
  }

  // divergence targets and the compatibility check for interior vertices
  std::vector<double> div_rhs(ne);
  double sum_div = 0.0, sum_jump = 0.0, magnitude = 0.0;
  for (int k = 0; k < ne; ++k) {
    const double area = mesh.signed_area(patch.elems[k]);
    div_rhs[k] = (data.rbar[k] + (interior ? cz : 0.0)) * area;
    sum_div += div_rhs[k];
    magnitude = std::max(magnitude, std::abs(div_rhs[k]));
  }
  for (size_t k = 0; k < patch.fan_faces.size(); ++k) {
    const double vjump = data.jbar[k] * mesh.face_length(patch.fan_faces[k]);
    sum_jump += vjump;
    magnitude = std::max(magnitude, std::abs(vjump));
  }
  p.scale = std::max(magnitude, 1e-30);
  int drop_row = -1;
  if (interior) {
    if (std::abs(sum_div - sum_jump) > 1e-12 * std::max(p.scale * ne, 1.0))
      throw InfeasiblePatch("patch compatibility violated before solve");
    // one divergence row is implied by the rest; drop the largest element's
    drop_row = 0;
    for (int k = 1; k < ne; ++k)
      if (mesh.signed_area(patch.elems[k]) > mesh.signed_area(patch.elems[drop_row]))
        drop_row = k;
  }

  const int ncons = (interior ? ne - 1 : ne) + static_cast<int>(patch.fan_faces.size());
  p.C = DenseMat(ncons, nd);
  p.b.assign(ncons, 0.0);
  int row = 0;
  for (int k = 0; k < ne; ++k) {
    if (k == drop_row) continue;
    const ElemGeom g = elem_geom(mesh, patch.elems[k]);
    for (int i = 0; i < 3; ++i)
      if (dof[k][i] >= 0) p.C(row, dof[k][i]) = g.face_len[i];
    p.b[row] = div_rhs[k];
    ++row;
  }
  for (size_t fk = 0; fk < patch.fan_faces.size(); ++fk) {
    const int fc = patch.fan_faces[fk];
    for (int side = 0; side < 2; ++side) {
      const int t = mesh.face_elems[fc][side];
      const auto it = std::lower_bound(patch.elems.begin(), patch.elems.end(), t);
      if (it == patch.elems.end() || *it != t)
        throw std::logic_error("build_patch_problem: fan face element outside patch");
      const int k = static_cast<int>(it - patch.elems.begin());
      const int i = local_face_index(mesh, t, fc);
      p.C(row, dof[k][i]) = 1.0;  // [[s . n_F]] = c_minus + c_plus, constant traces
    }
    p.b[row] = data.jbar[fk];
    ++row;
  }
  return p;
}

Vec solve_patch(const PatchProblem& p) {
  const int nd = p.M.rows;
  const int nc = p.C.rows;
  if (nd == 0) {
    // nothing to determine; feasible only if every constraint target vanishes
    for (double bi : p.b)
      if (std::abs(bi) > 1e-12 * std::max(p.scale, 1.0))
        throw InfeasiblePatch("patch constraints fix all dofs but demand nonzero data");
    return {};
  }
  DenseMat kkt(nd + nc, nd + nc);
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < nd; ++j) kkt(i, j) = p.M(i, j);
  for (int r = 0; r < nc; ++r) {
    for (int j = 0; j < nd; ++j) {
      kkt(nd + r, j) = p.C(r, j);
      kkt(j, nd + r) = p.C(r, j);
    }
  }
  Vec rhs(nd + nc, 0.0);
  for (int r = 0; r < nc; ++r) rhs[nd + r] = p.b[r];

  Vec sol;
  try {
    sol = lu_solve(kkt, rhs);
  } catch (const SingularError&) {
    throw InfeasiblePatch("patch KKT system singular (incompatible constraints)");
  }
  Vec x(sol.begin(), sol.begin() + nd);

  double resid = 0.0;
  for (int r = 0; r < nc; ++r) {
    double s = -p.b[r];
    for (int j = 0; j < nd; ++j) s += p.C(r, j) * x[j];
    resid = std::max(resid, std::abs(s));
  }
  if (resid > 1e-9 * std::max(p.scale, 1.0))
    throw InfeasiblePatch("patch constraints not satisfiable");
  return x;
}

Equilibration equilibrate(const TriMesh& mesh, const PwConstField& A,
                          const PwConstField& f, const P1Function& u) {
  const int nv = mesh.num_vertices();
  Equilibration out;
  out.sigma.coeff.assign(mesh.num_tris(), {0.0, 0.0, 0.0});
  out.c_z.assign(nv, 0.0);

  struct PatchSolution {
    Vec x;
    std::vector<int> elem;  // global element per dof
    std::vector<int> face;  // local face per dof
  };
  std::vector<PatchSolution> sols(nv);

  auto solve_range = [&](int lo, int hi) {
    for (int z = lo; z < hi; ++z) {
      const Patch patch = vertex_patch(mesh, z);
      out.c_z[z] = compensation_constant(mesh, A, f, u, patch);
      PatchProblem p = build_patch_problem(mesh, A, f, u, patch);
      sols[z].x = solve_patch(p);
      sols[z].face = std::move(p.dof_face);
      sols[z].elem.resize(p.dof_elem.size());
      for (size_t d = 0; d < p.dof_elem.size(); ++d)
        sols[z].elem[d] = patch.elems[p.dof_elem[d]];
    }
  };

  const int workers = std::min(worker_count(), nv);
  if (workers <= 1) {
    solve_range(0, nv);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (nv + workers - 1) / workers;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          solve_range(w * chunk, std::min(nv, (w + 1) * chunk));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  // deterministic accumulation: vertex order, element-local dof order
  for (int z = 0; z < nv; ++z) {
    for (size_t d = 0; d < sols[z].x.size(); ++d)
      out.sigma.coeff[sols[z].elem[d]][sols[z].face[d]] += sols[z].x[d];
  }
  return out;
}

EtaD eta_d(const TriMesh& mesh, const PwConstField& A, const BrokenRT0Field& sigma) {
  EtaD out;
  out.per_element.assign(mesh.num_tris(), 0.0);
  double total = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const DenseMat m = rt0_mass_matrix(mesh, A, t);
    double q = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q += sigma.coeff[t][i] * m(i, j) * sigma.coeff[t][j];
    q = std::max(q, 0.0);
    out.per_element[t] = std::sqrt(q);
    total += q;
  }
  out.global = std::sqrt(total);
  return out;
}

}  // namespace afemstop
