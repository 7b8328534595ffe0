#include "afemstop/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace afemstop {

double length(Vec2 a) { return std::hypot(a.x, a.y); }

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

/// Rebuilds faces, normals, adjacency and boundary flags from vertices+tris.
void finalize_connectivity(TriMesh& m) {
  const int nt = m.num_tris();
  m.face_verts.clear();
  m.face_elems.clear();
  m.face_normal.clear();
  m.tri_faces.assign(nt, {-1, -1, -1});

  std::unordered_map<std::uint64_t, int> face_of_edge;
  face_of_edge.reserve(static_cast<size_t>(nt) * 2);

  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = m.tris[t][(i + 1) % 3];
      const int b = m.tris[t][(i + 2) % 3];
      const auto key = edge_key(a, b);
      auto it = face_of_edge.find(key);
      int f;
      if (it == face_of_edge.end()) {
        f = static_cast<int>(m.face_verts.size());
        face_of_edge.emplace(key, f);
        m.face_verts.push_back({std::min(a, b), std::max(a, b)});
        m.face_elems.push_back({t, -1});
      } else {
        f = it->second;
        if (m.face_elems[f][1] != -1)
          throw std::runtime_error("mesh: face shared by more than two triangles");
        m.face_elems[f][1] = t;
        if (m.face_elems[f][0] > t) std::swap(m.face_elems[f][0], m.face_elems[f][1]);
      }
      m.tri_faces[t][i] = f;
    }
  }

  const int nf = m.num_faces();
  m.face_boundary.assign(nf, 0);
  m.vert_boundary.assign(m.num_vertices(), 0);
  m.face_normal.resize(nf);
  for (int f = 0; f < nf; ++f) {
    if (m.face_elems[f][1] == -1) {
      m.face_boundary[f] = 1;
      m.vert_boundary[m.face_verts[f][0]] = 1;
      m.vert_boundary[m.face_verts[f][1]] = 1;
    }
    // outward normal of the minus element
    const int t = m.face_elems[f][0];
    const Vec2 pa = m.vertices[m.face_verts[f][0]];
    const Vec2 pb = m.vertices[m.face_verts[f][1]];
    Vec2 tang = pb - pa;
    const double len = length(tang);
    Vec2 n{tang.y / len, -tang.x / len};
    // orient away from the opposite vertex of the minus element
    int opp = -1;
    for (int i = 0; i < 3; ++i)
      if (m.tri_faces[t][i] == f) opp = m.tris[t][i];
    if (dot(n, m.vertices[opp] - pa) > 0.0) n = -1.0 * n;
    m.face_normal[f] = n;
  }

  m.v2t_ptr.assign(m.num_vertices() + 1, 0);
  for (int t = 0; t < nt; ++t)
    for (int v : m.tris[t]) ++m.v2t_ptr[v + 1];
  for (int v = 0; v < m.num_vertices(); ++v) m.v2t_ptr[v + 1] += m.v2t_ptr[v];
  m.v2t.assign(m.v2t_ptr.back(), 0);
  std::vector<int> fill(m.num_vertices(), 0);
  for (int t = 0; t < nt; ++t)
    for (int v : m.tris[t]) m.v2t[m.v2t_ptr[v] + fill[v]++] = t;

  for (int t = 0; t < nt; ++t)
    if (m.signed_area(t) <= 0.0)
      throw std::runtime_error("mesh: non-positive triangle area");
}

}  // namespace

double TriMesh::signed_area(int t) const {
  const Vec2 a = vertices[tris[t][0]];
  const Vec2 b = vertices[tris[t][1]];
  const Vec2 c = vertices[tris[t][2]];
  return 0.5 * cross(b - a, c - a);
}

Vec2 TriMesh::centroid(int t) const {
  const Vec2 a = vertices[tris[t][0]];
  const Vec2 b = vertices[tris[t][1]];
  const Vec2 c = vertices[tris[t][2]];
  return (1.0 / 3.0) * (a + b + c);
}

double TriMesh::face_length(int f) const {
  return length(vertices[face_verts[f][1]] - vertices[face_verts[f][0]]);
}

double TriMesh::min_angle() const {
  double worst = 4.0;
  for (int t = 0; t < num_tris(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = vertices[tris[t][i]];
      const Vec2 q = vertices[tris[t][(i + 1) % 3]];
      const Vec2 r = vertices[tris[t][(i + 2) % 3]];
      const Vec2 u = q - p, v = r - p;
      worst = std::min(worst, std::acos(dot(u, v) / (length(u) * length(v))));
    }
  }
  return worst;
}

TriMesh build_uniform_mesh(const SquareDomain& dom, int n) {
  if (n < 1) throw std::invalid_argument("build_uniform_mesh: n must be >= 1");
  TriMesh m;
  const double h = dom.side / n;
  m.vertices.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.push_back({dom.x0 + i * h, dom.y0 + j * h});
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  m.tris.reserve(static_cast<size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // diagonal (i,j)-(i+1,j+1) is the hypotenuse of both triangles
      m.tris.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j)});
      m.tris.push_back({vid(i, j + 1), vid(i, j), vid(i + 1, j + 1)});
    }
  }
  m.parent_vertex_count = 0;
  m.elem_ancestor.clear();
  finalize_connectivity(m);
  return m;
}

TriMesh make_tri_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> tris) {
  TriMesh m;
  m.vertices = std::move(vertices);
  m.tris = std::move(tris);
  finalize_connectivity(m);
  return m;
}

namespace {

struct WorkTri {
  std::array<int, 3> v;  // (peak, a, b); refinement edge (a, b)
  bool alive = true;
  int ancestor = -1;  // element of the input mesh containing this triangle
};

struct BisectState {
  std::vector<Vec2> verts;
  std::vector<WorkTri> tris;
  int n_old_vertices = 0;
  std::vector<std::array<int, 2>> edge_parents;
  // alive triangles incident to each undirected edge (at most two)
  std::unordered_map<std::uint64_t, std::array<int, 2>> edge_tris;
  std::unordered_map<std::uint64_t, int> midpoint;

  void edge_attach(int a, int b, int t) {
    auto [it, inserted] = edge_tris.try_emplace(edge_key(a, b), std::array<int, 2>{-1, -1});
    auto& slot = it->second;
    if (slot[0] == t || slot[1] == t) return;
    if (slot[0] < 0)
      slot[0] = t;
    else if (slot[1] < 0)
      slot[1] = t;
    else
      throw std::runtime_error("bisect: more than two triangles on an edge");
  }

  void edge_detach(int a, int b, int t) {
    auto& slot = edge_tris[edge_key(a, b)];
    if (slot[0] == t)
      slot[0] = -1;
    else if (slot[1] == t)
      slot[1] = -1;
  }

  int neighbor_across(int t, int a, int b) const {
    auto it = edge_tris.find(edge_key(a, b));
    if (it == edge_tris.end()) return -1;
    if (it->second[0] == t) return it->second[1];
    if (it->second[1] == t) return it->second[0];
    return -1;
  }

  int midpoint_of(int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int v = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[a] + verts[b]));
    edge_parents.push_back({std::min(a, b), std::max(a, b)});
    midpoint.emplace(key, v);
    return v;
  }

  // splits t across its refinement edge using midpoint m; returns the two children
  std::array<int, 2> split(int t, int m) {
    const auto [p, a, b] = tris[t].v;
    tris[t].alive = false;
    edge_detach(a, b, t);
    edge_detach(p, a, t);
    edge_detach(p, b, t);
    const int c1 = static_cast<int>(tris.size());
    tris.push_back({{m, p, a}, true, tris[t].ancestor});
    const int c2 = static_cast<int>(tris.size());
    tris.push_back({{m, b, p}, true, tris[t].ancestor});
    for (int c : {c1, c2}) {
      const auto [cp, ca, cb] = tris[c].v;
      edge_attach(ca, cb, c);
      edge_attach(cp, ca, c);
      edge_attach(cp, cb, c);
    }
    return {c1, c2};
  }

  // ensures compatible divisibility of t's refinement edge, then bisects the
  // pair sharing it
  void divide(int t, int depth) {
    if (depth > 10000) throw std::runtime_error("bisect: completion recursion too deep");
    if (!tris[t].alive) return;
    const int a = tris[t].v[1], b = tris[t].v[2];
    int nb = neighbor_across(t, a, b);
    if (nb >= 0) {
      const int na = tris[nb].v[1], nbv = tris[nb].v[2];
      if (edge_key(na, nbv) != edge_key(a, b)) {
        divide(nb, depth + 1);
        if (!tris[t].alive) return;  // t was consumed by the completion chain
        nb = neighbor_across(t, a, b);
        if (nb >= 0) {
          const int xa = tris[nb].v[1], xb = tris[nb].v[2];
          if (edge_key(xa, xb) != edge_key(a, b))
            throw std::runtime_error("bisect: completion failed to expose edge");
        }
      }
    }
    const int m = midpoint_of(a, b);
    split(t, m);
    if (nb >= 0) split(nb, m);
  }
};

}  // namespace

TriMesh bisect(const TriMesh& mesh, std::span<const int> marked) {
  BisectState st;
  st.verts = mesh.vertices;
  st.n_old_vertices = mesh.num_vertices();
  st.tris.reserve(mesh.num_tris() * 2);
  for (int t = 0; t < mesh.num_tris(); ++t) st.tris.push_back({mesh.tris[t], true, t});
  st.edge_tris.reserve(static_cast<size_t>(mesh.num_faces()) * 2);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const auto [p, a, b] = mesh.tris[t];
    st.edge_attach(a, b, t);
    st.edge_attach(p, a, t);
    st.edge_attach(p, b, t);
  }

  for (int t : marked) {
    if (t < 0 || t >= mesh.num_tris()) throw std::invalid_argument("bisect: marked element out of range");
  }
  for (int t : marked)
    if (st.tris[t].alive) st.divide(t, 0);

  TriMesh out;
  out.vertices = std::move(st.verts);
  out.level = mesh.level + 1;
  out.parent_vertex_count = st.n_old_vertices;
  out.edge_parents = std::move(st.edge_parents);
  for (const auto& wt : st.tris) {
    if (!wt.alive) continue;
    out.tris.push_back(wt.v);
    out.elem_ancestor.push_back(wt.ancestor);
  }
  finalize_connectivity(out);
  return out;
}

TriMesh uniform_refine(const TriMesh& mesh) {
  std::vector<int> all(mesh.num_tris());
  for (int t = 0; t < mesh.num_tris(); ++t) all[t] = t;
  return bisect(mesh, all);
}

Patch vertex_patch(const TriMesh& mesh, int z) {
  if (z < 0 || z >= mesh.num_vertices()) throw std::invalid_argument("vertex_patch: bad vertex");
  Patch p;
  p.center = z;
  for (int k = mesh.v2t_ptr[z]; k < mesh.v2t_ptr[z + 1]; ++k) p.elems.push_back(mesh.v2t[k]);
  std::sort(p.elems.begin(), p.elems.end());

  std::vector<int> faces;
  for (int t : p.elems) {
    p.area += mesh.signed_area(t);
    for (int f : mesh.tri_faces[t]) faces.push_back(f);
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  for (int f : faces) {
    const bool touches_center = mesh.face_verts[f][0] == z || mesh.face_verts[f][1] == z;
    if (mesh.face_boundary[f])
      p.rim_boundary_faces.push_back(f);
    else if (touches_center)
      // interior to the patch: both incident elements contain z
      p.fan_faces.push_back(f);
    else
      p.rim_interior_faces.push_back(f);
  }
  return p;
}

Vec NodalInterp::apply(const Vec& coarse) const {
  if (static_cast<int>(coarse.size()) != n_coarse)
    throw DimensionError("NodalInterp: size mismatch");
  Vec fine(parents.size());
  for (size_t v = 0; v < parents.size(); ++v) {
    const auto [a, b] = parents[v];
    fine[v] = b < 0 ? coarse[a] : 0.5 * (coarse[a] + coarse[b]);
  }
  return fine;
}

NodalInterp bisection_interp(const TriMesh& fine) {
  NodalInterp ni;
  ni.n_coarse = fine.parent_vertex_count;
  ni.parents.resize(fine.num_vertices());
  for (int v = 0; v < fine.parent_vertex_count; ++v) ni.parents[v] = {v, -1};
  for (int v = fine.parent_vertex_count; v < fine.num_vertices(); ++v)
    ni.parents[v] = fine.edge_parents[v - fine.parent_vertex_count];
  return ni;
}

NodalInterp uniform_grid_interp(int n) {
  NodalInterp ni;
  const int nf = 2 * n;
  ni.n_coarse = (n + 1) * (n + 1);
  ni.parents.resize(static_cast<size_t>(nf + 1) * (nf + 1));
  auto cid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= nf; ++j) {
    for (int i = 0; i <= nf; ++i) {
      const size_t v = static_cast<size_t>(j) * (nf + 1) + i;
      if (i % 2 == 0 && j % 2 == 0)
        ni.parents[v] = {cid(i / 2, j / 2), -1};
      else if (i % 2 == 1 && j % 2 == 0)
        ni.parents[v] = {cid((i - 1) / 2, j / 2), cid((i + 1) / 2, j / 2)};
      else if (i % 2 == 0)
        ni.parents[v] = {cid(i / 2, (j - 1) / 2), cid(i / 2, (j + 1) / 2)};
      else
        // center of a coarse cell: midpoint of its lower-left/upper-right diagonal
        ni.parents[v] = {cid((i - 1) / 2, (j - 1) / 2), cid((i + 1) / 2, (j + 1) / 2)};
    }
  }
  return ni;
}

std::string conformity_violation(const TriMesh& mesh) {
  for (int t = 0; t < mesh.num_tris(); ++t)
    if (mesh.signed_area(t) <= 0.0) return "non-positive area at element " + std::to_string(t);

  std::map<std::pair<int, int>, int> count;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    for (int i = 0; i < 3; ++i) {
      int a = mesh.tris[t][(i + 1) % 3], b = mesh.tris[t][(i + 2) % 3];
      if (a > b) std::swap(a, b);
      if (++count[{a, b}] > 2) return "edge shared by more than two elements";
    }
  }
  // hanging vertex: some vertex coincides with the midpoint of an existing edge
  std::map<std::pair<long long, long long>, int> coord;
  auto quantize = [](double x) { return static_cast<long long>(std::llround(x * (1LL << 40))); };
  for (int v = 0; v < mesh.num_vertices(); ++v)
    coord[{quantize(mesh.vertices[v].x), quantize(mesh.vertices[v].y)}] = v;
  for (const auto& [e, c] : count) {
    const Vec2 mid = 0.5 * (mesh.vertices[e.first] + mesh.vertices[e.second]);
    auto it = coord.find({quantize(mid.x), quantize(mid.y)});
    if (it != coord.end())
      return "hanging vertex " + std::to_string(it->second) + " on edge (" +
             std::to_string(e.first) + "," + std::to_string(e.second) + ")";
    (void)c;
  }
  return {};
}

void write_mesh_text(std::ostream& os, const TriMesh& mesh) {
  os << mesh.num_tris() << ' ' << mesh.num_vertices() << '\n';
  os.precision(17);
  for (const auto& v : mesh.vertices) os << v.x << ' ' << v.y << '\n';
  for (const auto& t : mesh.tris) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  std::vector<int> bdry;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.vert_boundary[v]) bdry.push_back(v);
  os << bdry.size() << '\n';
  for (int v : bdry) os << v << '\n';
}

TriMesh read_mesh_text(std::istream& is) {
  int nt = 0, nv = 0;
  if (!(is >> nt >> nv) || nt < 1 || nv < 3)
    throw std::runtime_error("read_mesh_text: bad header");
  TriMesh m;
  m.vertices.resize(nv);
  for (auto& v : m.vertices)
    if (!(is >> v.x >> v.y)) throw std::runtime_error("read_mesh_text: bad vertex line");
  m.tris.resize(nt);
  for (auto& t : m.tris) {
    if (!(is >> t[0] >> t[1] >> t[2])) throw std::runtime_error("read_mesh_text: bad triangle line");
    for (int v : t)
      if (v < 0 || v >= nv) throw std::runtime_error("read_mesh_text: vertex index out of range");
  }
  int nb = 0;
  is >> nb;
  for (int i = 0; i < nb; ++i) {
    int v = 0;
    is >> v;  // boundary flags are re-derived from connectivity below
    (void)v;
  }
  finalize_connectivity(m);
  return m;
}

}  // namespace afemstop
