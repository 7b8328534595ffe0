#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "afemstop/linalg.hpp"

namespace afemstop {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double length(Vec2 a);

struct SquareDomain {
  double x0 = 0.0, y0 = 0.0, side = 1.0;
};

/// Conforming 2D triangulation with newest-vertex-bisection bookkeeping.
///
/// Triangle vertices are stored counterclockwise as (peak, a, b); the
/// refinement edge is (a, b), opposite the peak. Each interior face carries
/// one fixed unit normal n_F pointing from the lower-index element into the
/// higher-index one; boundary normals point outward. Jumps use the
/// convention [[v]] = v^- - v^+ where v^+ is the side n_F points into.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> tris;

  // face connectivity, rebuilt after construction/refinement
  std::vector<std::array<int, 2>> face_verts;
  std::vector<std::array<int, 2>> face_elems;  // {minus, plus}; plus = -1 on boundary
  std::vector<Vec2> face_normal;
  std::vector<std::array<int, 3>> tri_faces;   // face opposite local vertex i
  std::vector<std::uint8_t> vert_boundary, face_boundary;

  // vertex->element adjacency in CSR form
  std::vector<int> v2t_ptr, v2t;

  int level = 0;

  // refinement history relative to the mesh this one was bisected from
  int parent_vertex_count = 0;                       // 0 for a root mesh
  std::vector<std::array<int, 2>> edge_parents;      // endpoints, per new vertex
  std::vector<int> elem_ancestor;                    // parent-mesh element per triangle

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
  int num_faces() const { return static_cast<int>(face_verts.size()); }

  double signed_area(int t) const;
  Vec2 centroid(int t) const;
  double face_length(int f) const;
  double min_angle() const;

  /// Index of the face (v1,v2) of triangle t, i.e. its refinement edge.
  int refinement_face(int t) const { return tri_faces[t][0]; }
};

/// 2 n^2 right isosceles triangles on an axis-aligned square; diagonals run
/// lower-left to upper-right and are the initial refinement edges.
TriMesh build_uniform_mesh(const SquareDomain& dom, int n);

/// Root mesh from explicit vertices and (peak, a, b)-ordered triangles.
TriMesh make_tri_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> tris);

/// Newest-vertex bisection of the marked elements plus recursive completion.
/// The input mesh is untouched; the result records parent links.
TriMesh bisect(const TriMesh& mesh, std::span<const int> marked);

TriMesh uniform_refine(const TriMesh& mesh);  // bisect every element once

struct Patch {
  int center = -1;
  std::vector<int> elems;
  std::vector<int> fan_faces;           // interior faces incident to the center
  std::vector<int> rim_interior_faces;  // on the patch boundary but not on dOmega
  std::vector<int> rim_boundary_faces;  // on the patch boundary and on dOmega
  double area = 0.0;
};

Patch vertex_patch(const TriMesh& mesh, int z);

/// P1 nodal interpolation map between two meshes: each fine vertex is either
/// a copy of a coarse vertex ({c, -1}) or the midpoint of a coarse edge
/// ({a, b}, value = average).
struct NodalInterp {
  int n_coarse = 0;
  std::vector<std::array<int, 2>> parents;  // one entry per fine vertex

  Vec apply(const Vec& coarse) const;
};

NodalInterp bisection_interp(const TriMesh& fine);
/// Interpolation from the uniform n-mesh onto the uniform 2n-mesh of the
/// same domain (the two are nested).
NodalInterp uniform_grid_interp(int n);

/// Empty string when conforming; otherwise a description of the first
/// violation (duplicate faces, hanging vertices, non-positive areas).
std::string conformity_violation(const TriMesh& mesh);

void write_mesh_text(std::ostream& os, const TriMesh& mesh);
TriMesh read_mesh_text(std::istream& is);

}  // namespace afemstop
