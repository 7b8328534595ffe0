#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "afemstop/fem.hpp"
#include "afemstop/quadrature.hpp"
#include "afemstop/solvers.hpp"

using namespace afemstop;

namespace {

TriMesh reference_triangle() {
  // refinement edge (hypotenuse) is (1,0)-(0,1), peak at the origin
  return make_tri_mesh({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {{0, 1, 2}});
}

P1Function random_nodal(const TriMesh& m, std::uint64_t seed) {
  return random_initial_guess(m.num_vertices(), seed);
}

}  // namespace

TEST_CASE("local stiffness of the reference triangle") {
  const TriMesh m = reference_triangle();
  const SparseSpd A = assemble_stiffness(m, {1.0});
  const double expected[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i) {
    Vec e(3, 0.0);
    e[i] = 1.0;
    const Vec row = A.multiply(e);
    for (int j = 0; j < 3; ++j) CHECK(row[j] == doctest::Approx(expected[i][j]).epsilon(1e-14));
  }
}

TEST_CASE("stiffness is bilinear in A") {
  const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, 3);
  const SparseSpd A1 = assemble_stiffness(m, PwConstField(m.num_tris(), 1.0));
  const SparseSpd A3 = assemble_stiffness(m, PwConstField(m.num_tris(), 3.0));
  const Vec v = random_nodal(m, 2);
  const Vec y1 = A1.multiply(v), y3 = A3.multiply(v);
  for (int i = 0; i < m.num_vertices(); ++i) CHECK(y3[i] == doctest::Approx(3.0 * y1[i]));
}

TEST_CASE("stiffness symmetry and zero row sums before elimination") {
  TriMesh m = build_uniform_mesh({-1.0, -1.0, 2.0}, 3);
  m = bisect(m, std::vector<int>{1, 4, 9});
  PwConstField A(m.num_tris());
  SplitMix64 rng(77);
  for (auto& a : A) a = 1.0 + 0.5 * std::abs(rng.next_unit());
  const SparseSpd S = assemble_stiffness(m, A);
  CHECK(S.max_asymmetry() <= 1e-13);
  const Vec ones(m.num_vertices(), 1.0);
  const Vec rs = S.multiply(ones);
  for (double r : rs) CHECK(std::abs(r) <= 1e-12);
}

TEST_CASE("load vector for constant and random sources") {
  const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, 4);
  const Vec b1 = assemble_load(m, PwConstField(m.num_tris(), 1.0));
  for (int z = 0; z < m.num_vertices(); ++z) {
    const Patch p = vertex_patch(m, z);
    CHECK(b1[z] == doctest::Approx(p.area / 3.0).epsilon(1e-14));
  }
  const Vec b0 = assemble_load(m, PwConstField(m.num_tris(), 0.0));
  for (double v : b0) CHECK(v == 0.0);

  // 3-point quadrature oracle for (f, phi_z) with elementwise-constant f
  PwConstField f(m.num_tris());
  SplitMix64 rng(3);
  for (auto& v : f) v = rng.next_unit();
  const Vec b = assemble_load(m, f);
  Vec oracle(m.num_vertices(), 0.0);
  const TriQuadRule& rule = tri_rule_midpoint3();
  for (int t = 0; t < m.num_tris(); ++t) {
    const double area = m.signed_area(t);
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (size_t q = 0; q < rule.weight.size(); ++q) s += rule.weight[q] * rule.bary[q][i];
      oracle[m.tris[t][i]] += f[t] * area * s;
    }
  }
  for (int z = 0; z < m.num_vertices(); ++z)
    CHECK(b[z] == doctest::Approx(oracle[z]).epsilon(1e-14));
}

TEST_CASE("apply_dirichlet: zero data leaves interior load rows unchanged") {
  const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, 4);
  const PwConstField a(m.num_tris(), 1.0);
  const SparseSpd S = assemble_stiffness(m, a);
  const Vec load = assemble_load(m, PwConstField(m.num_tris(), 1.0));
  const DirichletSystem sys = apply_dirichlet(S, load, m, P1Function(m.num_vertices(), 0.0));
  CHECK(sys.dof() == (4 - 1) * (4 - 1));
  for (int i = 0; i < sys.dof(); ++i)
    CHECK(sys.rhs[i] == doctest::Approx(load[sys.interior_vertices[i]]));
}

TEST_CASE("apply_dirichlet rejects missing boundary values") {
  const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, 2);
  const PwConstField a(m.num_tris(), 1.0);
  const SparseSpd S = assemble_stiffness(m, a);
  const Vec load(m.num_vertices(), 0.0);
  P1Function g(m.num_vertices(), 0.0);
  for (int v = 0; v < m.num_vertices(); ++v)
    if (m.vert_boundary[v]) { g[v] = std::nan(""); break; }
  CHECK_THROWS_AS(apply_dirichlet(S, load, m, g), std::invalid_argument);
}

TEST_CASE("apply_dirichlet: P1 exactness for a global linear solution") {
  TriMesh m = build_uniform_mesh({-1.0, -1.0, 2.0}, 4);
  m = bisect(m, std::vector<int>{0, 3, 17});
  const PwConstField a(m.num_tris(), 1.0);
  const SparseSpd S = assemble_stiffness(m, a);
  const Vec load = assemble_load(m, PwConstField(m.num_tris(), 0.0));
  auto linear = [](Vec2 p) { return 0.7 * p.x - 1.3 * p.y + 0.2; };
  P1Function g(m.num_vertices(), 0.0);
  for (int v = 0; v < m.num_vertices(); ++v)
    if (m.vert_boundary[v]) g[v] = linear(m.vertices[v]);
  const DirichletSystem sys = apply_dirichlet(S, load, m, g);
  const Vec u_int = direct_solve(sys.A, sys.rhs);
  const P1Function u = sys.expand(u_int);
  for (int v = 0; v < m.num_vertices(); ++v)
    CHECK(u[v] == doctest::Approx(linear(m.vertices[v])).epsilon(1e-11));
}

TEST_CASE("numerical flux") {
  const TriMesh m = reference_triangle();
  P1Function u(3);
  for (int v = 0; v < 3; ++v) u[v] = m.vertices[v].x;  // u = x
  const auto flux = numerical_flux(m, {2.0}, u);
  CHECK(flux[0].x == doctest::Approx(-2.0));
  CHECK(std::abs(flux[0].y) <= 1e-15);

  const auto zero = numerical_flux(m, {2.0}, P1Function(3, 5.0));
  CHECK(std::abs(zero[0].x) <= 1e-14);
  CHECK(std::abs(zero[0].y) <= 1e-14);
}

TEST_CASE("p1 gradient matches finite differences of the interpolant") {
  const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, 2);
  const P1Function u = random_nodal(m, 9);
  for (int t = 0; t < m.num_tris(); ++t) {
    const Vec2 g = p1_gradient(m, u, t);
    auto eval = [&](Vec2 p) {
      const Vec2 a = m.vertices[m.tris[t][0]];
      const Vec2 b = m.vertices[m.tris[t][1]], c = m.vertices[m.tris[t][2]];
      const double det = cross(b - a, c - a);
      const double l1 = cross(p - a, c - a) / det;
      const double l2 = cross(b - a, p - a) / det;
      return (1.0 - l1 - l2) * u[m.tris[t][0]] + l1 * u[m.tris[t][1]] + l2 * u[m.tris[t][2]];
    };
    const Vec2 c = m.centroid(t);
    const double h = 1e-6;
    CHECK(g.x ==
          doctest::Approx((eval({c.x + h, c.y}) - eval({c.x - h, c.y})) / (2 * h)).epsilon(1e-10));
    CHECK(g.y ==
          doctest::Approx((eval({c.x, c.y + h}) - eval({c.x, c.y - h})) / (2 * h)).epsilon(1e-10));
  }
}

TEST_CASE("face jumps vanish for globally linear u with constant A") {
  const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, 3);
  P1Function u(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v)
    u[v] = 2.0 * m.vertices[v].x + 0.5 * m.vertices[v].y;
  const PwConstField a(m.num_tris(), 1.7);
  int boundary_face = -1;
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.face_boundary[f]) {
      boundary_face = f;
      continue;
    }
    CHECK(std::abs(face_jump(m, a, u, f)) <= 1e-13);
  }
  REQUIRE(boundary_face >= 0);
  CHECK_THROWS_AS(face_jump(m, a, u, boundary_face), std::invalid_argument);
}

TEST_CASE("face jump equals the two-sided evaluation oracle and is antisymmetric") {
  const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, 3);
  const P1Function u = random_nodal(m, 13);
  PwConstField a(m.num_tris());
  SplitMix64 rng(15);
  for (auto& v : a) v = 1.0 + std::abs(rng.next_unit());
  const Vec jumps = all_face_jumps(m, a, u);
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.face_boundary[f]) continue;
    const int lo = m.face_elems[f][0], hi = m.face_elems[f][1];
    const Vec2 n = m.face_normal[f];
    const double oracle =
        a[lo] * dot(p1_gradient(m, u, lo), n) - a[hi] * dot(p1_gradient(m, u, hi), n);
    CHECK(face_jump(m, a, u, f) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(jumps[f] == doctest::Approx(oracle).epsilon(1e-13));
    // v- minus v+ is antisymmetric under exchanging the sides
    const double swapped =
        a[hi] * dot(p1_gradient(m, u, hi), n) - a[lo] * dot(p1_gradient(m, u, lo), n);
    CHECK(swapped == doctest::Approx(-oracle).epsilon(1e-13));
    // while the full jump, normal flipped together with the sides, is invariant
    const Vec2 nf = -1.0 * n;
    const double reoriented =
        a[hi] * dot(p1_gradient(m, u, hi), nf) - a[lo] * dot(p1_gradient(m, u, lo), nf);
    CHECK(reoriented == doctest::Approx(oracle).epsilon(1e-13));
  }
}

TEST_CASE("energy error against a linear exact solution is zero") {
  const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, 3);
  P1Function u(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v)
    u[v] = 1.0 - m.vertices[v].x + 2.0 * m.vertices[v].y;
  const double err = energy_error_vs_exact(m, PwConstField(m.num_tris(), 1.0),
                                           [](Vec2) { return Vec2{-1.0, 2.0}; }, u);
  CHECK(err <= 1e-13);
}

TEST_CASE("energy error halves when h halves (first-order rate)") {
  auto gex = [](Vec2 p) {
    return Vec2{M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y),
                M_PI * std::sin(M_PI * p.x) * std::cos(M_PI * p.y)};
  };
  auto uex = [](Vec2 p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
  double err[2];
  int idx = 0;
  for (int n : {8, 16}) {
    const TriMesh m = build_uniform_mesh({0.0, 0.0, 1.0}, n);
    P1Function u(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) u[v] = uex(m.vertices[v]);
    err[idx++] = energy_error_vs_exact(m, PwConstField(m.num_tris(), 1.0), gex, u);
  }
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("norm equivalence: function quadrature vs matrix form") {
  TriMesh m = build_uniform_mesh({-1.0, -1.0, 2.0}, 4);
  m = bisect(m, std::vector<int>{2, 8});
  PwConstField a(m.num_tris());
  SplitMix64 rng(21);
  for (auto& v : a) v = 1.0 + std::abs(rng.next_unit());
  const SparseSpd S = assemble_stiffness(m, a);
  const P1Function u = random_nodal(m, 22);
  CHECK(p1_energy_norm(m, a, u) == doctest::Approx(norm_A(S, u)).epsilon(1e-12));
}

TEST_CASE("energy Pythagoras: total^2 = discretization^2 + algebraic^2") {
  // the coarse Galerkin solution is the A-projection of the fine one when f
  // is constant, so the split of the total error is exact across the nested
  // pair for any coarse iterate
  const TriMesh coarse = build_uniform_mesh({0.0, 0.0, 1.0}, 4);
  const TriMesh mid = uniform_refine(coarse);
  const NodalInterp im = bisection_interp(mid);
  const TriMesh fin = uniform_refine(mid);
  const NodalInterp iff = bisection_interp(fin);

  const PwConstField ac(coarse.num_tris(), 1.0), af(fin.num_tris(), 1.0);
  const Vec loadc = assemble_load(coarse, PwConstField(coarse.num_tris(), 1.0));
  const Vec loadf = assemble_load(fin, PwConstField(fin.num_tris(), 1.0));
  const DirichletSystem sc = apply_dirichlet(assemble_stiffness(coarse, ac), loadc, coarse,
                                             P1Function(coarse.num_vertices(), 0.0));
  const DirichletSystem sf = apply_dirichlet(assemble_stiffness(fin, af), loadf, fin,
                                             P1Function(fin.num_vertices(), 0.0));

  const P1Function uc = sc.expand(direct_solve(sc.A, sc.rhs));
  const P1Function uf = sf.expand(direct_solve(sf.A, sf.rhs));

  P1Function ubar = uc;
  SplitMix64 rng(5);
  for (int v = 0; v < coarse.num_vertices(); ++v)
    if (!coarse.vert_boundary[v]) ubar[v] += 0.05 * rng.next_unit();

  const Vec uc_f = iff.apply(im.apply(uc));
  const Vec ubar_f = iff.apply(im.apply(ubar));
  auto fine_norm = [&](const Vec& nodal) { return norm_A(sf.A, sf.restrict_interior(nodal)); };
  const double total = fine_norm(subtract(uf, ubar_f));
  const double disc = fine_norm(subtract(uf, uc_f));
  const double alg = fine_norm(subtract(uc_f, ubar_f));
  CHECK(total * total == doctest::Approx(disc * disc + alg * alg).epsilon(1e-10));
}
