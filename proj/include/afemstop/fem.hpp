#pragma once

#include <functional>

#include "afemstop/linalg.hpp"
#include "afemstop/mesh.hpp"

namespace afemstop {

/// One value per element (diffusion coefficient A_K, source f_K).
using PwConstField = Vec;
/// One nodal value per vertex.
using P1Function = Vec;

std::array<Vec2, 3> barycentric_gradients(const TriMesh& mesh, int t);
Vec2 p1_gradient(const TriMesh& mesh, const P1Function& u, int t);

/// Full stiffness matrix over all vertices, a_ij = (A grad phi_j, grad phi_i).
/// Symmetric with zero row sums; SPD only after Dirichlet elimination.
SparseSpd assemble_stiffness(const TriMesh& mesh, const PwConstField& A);

/// Load vector (f, phi_z) for elementwise-constant f: entry = sum f_K |K|/3.
Vec assemble_load(const TriMesh& mesh, const PwConstField& f);

/// Interior-only SPD system with the Dirichlet lift folded into the load.
struct DirichletSystem {
  SparseSpd A;
  Vec rhs;
  std::vector<int> interior_vertices;   // interior index -> vertex
  std::vector<int> vertex_to_interior;  // -1 on boundary vertices
  P1Function lift;                      // g on boundary vertices, 0 inside

  int dof() const { return A.n; }
  P1Function expand(const Vec& u_interior) const;
  Vec restrict_interior(const P1Function& u) const;
};

/// g must hold boundary values at every boundary vertex (interior entries
/// are ignored).
DirichletSystem apply_dirichlet(const SparseSpd& A_full, const Vec& load,
                                const TriMesh& mesh, const P1Function& g);

/// -A_K grad(u)|_K per element.
std::vector<Vec2> numerical_flux(const TriMesh& mesh, const PwConstField& A,
                                 const P1Function& u);

/// j_F = [[A grad(u) . n_F]] on an interior face; throws on boundary faces.
double face_jump(const TriMesh& mesh, const PwConstField& A, const P1Function& u, int f);
/// All interior-face jumps at once (boundary entries are 0).
Vec all_face_jumps(const TriMesh& mesh, const PwConstField& A, const P1Function& u);

struct ErrorQuadOpts {
  int base_subdivisions = 0;     // dyadic levels applied to every element
  int singular_subdivisions = 0; // extra levels for elements touching the point
  bool has_singularity = false;
  Vec2 singular_point{0.0, 0.0};
};

/// ||u - u_h||_A by elementwise quadrature of A |grad u - grad u_h|^2.
double energy_error_vs_exact(const TriMesh& mesh, const PwConstField& A,
                             const std::function<Vec2(Vec2)>& grad_exact,
                             const P1Function& u_h, const ErrorQuadOpts& opts = {});

/// sqrt(sum_K A_K |grad u|^2 |K|), the energy norm of a P1 function.
double p1_energy_norm(const TriMesh& mesh, const PwConstField& A, const P1Function& u);

/// Elementwise averages of an analytic function (degree-4 quadrature).
PwConstField project_element_average(const TriMesh& mesh,
                                     const std::function<double(Vec2)>& f);

}  // namespace afemstop
