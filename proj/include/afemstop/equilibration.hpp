#pragma once

#include "afemstop/fem.hpp"
#include "afemstop/linalg.hpp"
#include "afemstop/mesh.hpp"

namespace afemstop {

struct InfeasiblePatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Broken lowest-order Raviart-Thomas field: per element, the constant
/// outward normal flux on each local face (face i opposite local vertex i).
/// No continuity is imposed across faces.
struct BrokenRT0Field {
  std::vector<std::array<double, 3>> coeff;

  int num_elems() const { return static_cast<int>(coeff.size()); }
};

/// div of the field on element t: sum_i coeff_i |F_i| / |K|.
double rt0_divergence(const TriMesh& mesh, const BrokenRT0Field& s, int t);
/// [[s . n_F]] across an interior face, using the fixed n_F orientation.
double rt0_face_jump(const TriMesh& mesh, const BrokenRT0Field& s, int f);
/// Field value at a point of element t.
Vec2 rt0_eval(const TriMesh& mesh, const BrokenRT0Field& s, int t, Vec2 p);
/// A^{-1}-weighted Gram matrix of the three local basis fields on element t
/// (exact: midpoint-of-edges quadrature on affine integrands).
DenseMat rt0_mass_matrix(const TriMesh& mesh, const PwConstField& A, int t);

/// Projected local data of the patch problem: rbar = f_K/3 per element and
/// jbar = j_F/2 per fan face (d = 2).
struct ProjectedPatchData {
  Vec rbar;  // indexed like patch.elems
  Vec jbar;  // indexed like patch.fan_faces
};

ProjectedPatchData projected_data(const TriMesh& mesh, const PwConstField& A,
                                  const PwConstField& f, const P1Function& u,
                                  const Patch& patch);

/// c_z = (1/|w_z|) (sum_F (j_F, phi_z)_F - sum_K (r_K, phi_z)_K) at interior
/// vertices, exactly 0 at boundary vertices. Computed from residual/jump
/// data only.
double compensation_constant(const TriMesh& mesh, const PwConstField& A,
                             const PwConstField& f, const P1Function& u, int z);
double compensation_constant(const TriMesh& mesh, const PwConstField& A,
                             const PwConstField& f, const P1Function& u,
                             const Patch& patch);

/// Dense equality-constrained patch minimization min x^T M x s.t. C x = b.
struct PatchProblem {
  DenseMat M;            // ndof x ndof, SPD
  DenseMat C;            // ncons x ndof
  Vec b;
  double scale = 1.0;    // magnitude used for feasibility tolerances

  // layout: dof d lives on local face `dof_face[d]` of patch element
  // `dof_elem[d]` (indices into patch.elems); empty for hand-built problems
  std::vector<int> dof_elem, dof_face;
};

/// Assembles the local problem for one vertex patch, including the
/// compensation constant and the dropped redundant divergence row for
/// interior vertices.
PatchProblem build_patch_problem(const TriMesh& mesh, const PwConstField& A,
                                 const PwConstField& f, const P1Function& u,
                                 const Patch& patch);

/// KKT solve; verifies the constraints afterwards and throws
/// InfeasiblePatch if they cannot be met.
Vec solve_patch(const PatchProblem& p);

struct Equilibration {
  BrokenRT0Field sigma;  // sigma^Delta accumulated over all patches
  Vec c_z;               // per vertex; 0 on boundary vertices
};

/// Patch solves for every vertex, accumulated element-wise in vertex order
/// (deterministic regardless of the worker count, which is capped by the
/// AFEM_STOP_THREADS environment variable).
Equilibration equilibrate(const TriMesh& mesh, const PwConstField& A,
                          const PwConstField& f, const P1Function& u);

struct EtaD {
  Vec per_element;
  double global = 0.0;
};

/// eta_{d,K} = ||A^{-1/2} sigma_K||_{0,K} and the l2 aggregate.
EtaD eta_d(const TriMesh& mesh, const PwConstField& A, const BrokenRT0Field& sigma);

}  // namespace afemstop
