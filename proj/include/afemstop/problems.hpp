#pragma once

#include <functional>
#include <string>

#include "afemstop/fem.hpp"
#include "afemstop/mesh.hpp"

namespace afemstop {

/// Benchmark definition: diffusion/source/boundary rules plus the exact
/// solution when one is known.
struct BenchmarkProblem {
  std::string name;
  SquareDomain domain;
  int initial_n = 1;        // uniform subdivisions of the starting mesh
  int pre_doublings = 0;    // uniform doublings applied before any solve
  // adapt the starting mesh (exact solves, same marking) up to this many
  // interior unknowns before cycle counting begins; 0 disables
  int pre_adapt_min_dof = 0;

  std::function<double(Vec2)> diffusion;  // evaluated elementwise
  std::function<double(Vec2)> source;     // analytic f, projected elementwise
  bool has_exact = false;
  std::function<double(Vec2)> exact;
  std::function<Vec2(Vec2)> exact_grad;
  double exact_energy_norm = 0.0;  // ||u||_A

  bool has_singularity = false;
  Vec2 singular_point{0.0, 0.0};
  bool coefficient_has_interfaces = false;  // quadrant checkerboard alignment checks
};

/// Mixed-mode sine solution on (-1,1)^2 with A = 1, g = 0 and
/// ||u||_A = 1; discretized at h = 1/32 after the configured doublings.
BenchmarkProblem example1_problem();
/// Same problem; the symmetric Gauss-Seidel experiment uses it.
BenchmarkProblem example2_problem();
/// Checkerboard interface problem: A = R on (0,1)^2 u (-1,0)^2 and 1
/// elsewhere, u = r^gamma psi(theta), f = 0, g = trace of u.
BenchmarkProblem kellogg_problem();

BenchmarkProblem problem_by_name(const std::string& name);

/// A_K = rule(barycenter). Throws when an element straddles a quadrant
/// interface (vertices in the interior of different quadrants).
PwConstField pw_constant_coefficient(const TriMesh& mesh,
                                     const std::function<double(Vec2)>& rule,
                                     bool check_quadrant_alignment);

/// Kellogg angular factor and its derivative (polar form u = r^gamma psi).
double kellogg_psi(double theta);
double kellogg_psi_prime(double theta);

struct KelloggParams {
  double gamma = 0.5;
  double R = 5.8284271247461907;
  double rho = 0.78539816339744831;   // pi/4
  double sigma = -2.3561944901923448;
};
const KelloggParams& kellogg_params();

}  // namespace afemstop
