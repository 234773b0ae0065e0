#include "qipp/mesh.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qipp {

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Eigen::Vector2d> vertices, std::vector<std::vector<int>> elements)
    : dim_(dim), vertices_(std::move(vertices)), elements_(std::move(elements))
{
  if (dim_ != 1 && dim_ != 2) throw std::runtime_error("Mesh: dimension must be 1 or 2");
  build_topology();
  validate();
}

void Mesh::build_topology()
{
  const int nv = num_vertices();
  const int nt = num_elements();
  vertex_elems_.assign(nv, {});
  measure_.resize(nt);
  diameter_.resize(nt);
  h_max_ = 0.0;

  for (int t = 0; t < nt; ++t) {
    const auto& el = elements_[t];
    if (static_cast<int>(el.size()) != verts_per_elem())
      throw std::runtime_error("Mesh: wrong vertex count in element");
    for (int v : el) {
      if (v < 0 || v >= nv) throw std::runtime_error("Mesh: vertex index out of range");
      vertex_elems_[v].push_back(t);
    }
    if (dim_ == 1) {
      measure_[t] = vertices_[el[1]][0] - vertices_[el[0]][0];
      diameter_[t] = std::abs(measure_[t]);
    } else {
      measure_[t] = signed_area(vertices_[el[0]], vertices_[el[1]], vertices_[el[2]]);
      double d = 0.0;
      for (int i = 0; i < 3; ++i)
        d = std::max(d, (vertices_[el[i]] - vertices_[el[(i + 1) % 3]]).norm());
      diameter_[t] = d;
    }
    h_max_ = std::max(h_max_, diameter_[t]);
  }

  vertex_boundary_.assign(nv, false);
  if (dim_ == 2) {
    std::map<std::pair<int, int>, int> edge_ids;
    elem_edges_.assign(nt, {-1, -1, -1});
    for (int t = 0; t < nt; ++t) {
      const auto& el = elements_[t];
      for (int e = 0; e < 3; ++e) {
        int a = el[(e + 1) % 3], b = el[(e + 2) % 3];
        if (a > b) std::swap(a, b);
        auto it = edge_ids.find({a, b});
        if (it == edge_ids.end()) {
          Edge ed;
          ed.v[0] = a;
          ed.v[1] = b;
          ed.elems[0] = t;
          ed.elems[1] = -1;
          it = edge_ids.emplace(std::make_pair(a, b), static_cast<int>(edges_.size())).first;
          edges_.push_back(ed);
        } else {
          Edge& ed = edges_[it->second];
          if (ed.elems[1] >= 0) throw std::runtime_error("Mesh: edge shared by >2 elements");
          ed.elems[1] = t;
        }
        elem_edges_[t][e] = it->second;
      }
    }
    for (const Edge& ed : edges_)
      if (ed.boundary()) {
        vertex_boundary_[ed.v[0]] = true;
        vertex_boundary_[ed.v[1]] = true;
      }
  } else {
    // 1D: a vertex is on the boundary iff it belongs to a single interval.
    for (int v = 0; v < nv; ++v)
      if (vertex_elems_[v].size() == 1) vertex_boundary_[v] = true;
  }

  for (int v = 0; v < nv; ++v)
    if (!vertex_boundary_[v] && !vertex_elems_[v].empty()) interior_vertices_.push_back(v);

  elem_neighbors_.assign(nt, {});
  for (int t = 0; t < nt; ++t) {
    std::set<int> nb;
    for (int v : elements_[t])
      for (int s : vertex_elems_[v]) nb.insert(s);
    elem_neighbors_[t].assign(nb.begin(), nb.end());
  }
}

void Mesh::validate() const
{
  for (int t = 0; t < num_elements(); ++t)
    if (measure_[t] <= 0.0)
      throw std::runtime_error("Mesh: element with non-positive measure (check orientation)");
  if (dim_ == 1) {
    for (int v = 0; v < num_vertices(); ++v)
      if (vertex_elems_[v].size() > 2) throw std::runtime_error("Mesh: 1D vertex valence > 2");
  } else {
    // Vertex links must be edge-connected fans; rejects bowtie configurations
    // that would break the edge-connectedness of vertex patches.
    for (int v = 0; v < num_vertices(); ++v) {
      const auto& star = vertex_elems_[v];
      if (star.size() <= 1) continue;
      std::vector<bool> seen(star.size(), false);
      std::vector<int> stack{0};
      seen[0] = true;
      while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < star.size(); ++j) {
          if (seen[j]) continue;
          // edge-adjacent within the star: share an edge containing v
          for (int e : elem_edges_[star[i]]) {
            const Edge& ed = edges_[e];
            if ((ed.v[0] == v || ed.v[1] == v) &&
                (ed.elems[0] == star[j] || ed.elems[1] == star[j])) {
              seen[j] = true;
              stack.push_back(static_cast<int>(j));
              break;
            }
          }
        }
      }
      for (bool s : seen)
        if (!s) throw std::runtime_error("Mesh: disconnected vertex link (nonmanifold vertex)");
    }
  }
  if (interior_vertices_.empty())
    throw std::runtime_error("Mesh: no interior vertex (assumption violated)");
}

int Mesh::find_edge(int a, int b) const
{
  if (a > b) std::swap(a, b);
  for (int t : vertex_elems_[a])
    for (int e = 0; e < 3; ++e) {
      const Edge& ed = edges_[elem_edges_[t][e]];
      if (ed.v[0] == a && ed.v[1] == b) return elem_edges_[t][e];
    }
  return -1;
}

Eigen::Vector2d Mesh::element_centroid(int t) const
{
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (int v : elements_[t]) c += vertices_[v];
  return c / static_cast<double>(verts_per_elem());
}

//------------------------------------------------------------------------
// Patches
//------------------------------------------------------------------------

bool PatchRef::contains(int t) const
{
  return std::binary_search(elements.begin(), elements.end(), t);
}

Frame patch_frame(const Mesh& mesh, const PatchRef& patch)
{
  Frame f;
  double area = 0.0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  std::set<int> verts;
  for (int t : patch.elements) {
    const double m = mesh.element_measure(t);
    area += m;
    c += m * mesh.element_centroid(t);
    for (int v : mesh.element(t)) verts.insert(v);
  }
  f.center = c / area;
  double diam = 0.0;
  std::vector<int> vs(verts.begin(), verts.end());
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      diam = std::max(diam, (mesh.vertex(vs[i]) - mesh.vertex(vs[j])).norm());
  f.len = diam > 0.0 ? diam : 1.0;
  return f;
}

double patch_measure(const Mesh& mesh, const PatchRef& patch)
{
  double m = 0.0;
  for (int t : patch.elements) m += mesh.element_measure(t);
  return m;
}

namespace {

std::vector<int> first_ring(const Mesh& mesh, SeedKind kind, int id)
{
  std::set<int> elems;
  switch (kind) {
    case SeedKind::Vertex:
      for (int t : mesh.elements_at_vertex(id)) elems.insert(t);
      break;
    case SeedKind::Edge: {
      // Closure intersection with a closed edge = elements containing one of
      // its endpoints (conformity).
      const Edge& ed = mesh.edge(id);
      for (int k = 0; k < 2; ++k)
        for (int t : mesh.elements_at_vertex(ed.v[k])) elems.insert(t);
      break;
    }
    case SeedKind::Element:
      for (int t : mesh.vertex_neighbors(id)) elems.insert(t);
      break;
    case SeedKind::Region:
      throw std::invalid_argument("element_patch: region seeds need an explicit patch");
  }
  return {elems.begin(), elems.end()};
}

}  // namespace

PatchRef element_patch(const Mesh& mesh, SeedKind kind, int seed_id, int order)
{
  if (order < 1) throw std::invalid_argument("element_patch: order must be >= 1");
  if (seed_id < 0) throw std::invalid_argument("element_patch: empty seed");
  PatchRef p;
  p.seed_kind = kind;
  p.seed_id = seed_id;
  p.order = 1;
  p.elements = first_ring(mesh, kind, seed_id);
  while (p.order < order) p = grow_patch(mesh, p);
  return p;
}

PatchRef grow_patch(const Mesh& mesh, const PatchRef& patch)
{
  std::set<int> elems(patch.elements.begin(), patch.elements.end());
  for (int t : patch.elements)
    for (int s : mesh.vertex_neighbors(t)) elems.insert(s);
  PatchRef g;
  g.seed_kind = patch.seed_kind;
  g.seed_id = patch.seed_id;
  g.order = patch.order + 1;
  g.elements.assign(elems.begin(), elems.end());
  return g;
}

PatchRef patch_union(const PatchRef& a, const PatchRef& b)
{
  PatchRef u;
  u.seed_kind = a.seed_kind;
  u.seed_id = a.seed_id;
  u.order = std::max(a.order, b.order);
  std::set_union(a.elements.begin(), a.elements.end(), b.elements.begin(), b.elements.end(),
                 std::back_inserter(u.elements));
  return u;
}

//------------------------------------------------------------------------
// Anchors
//------------------------------------------------------------------------

int fixed_element(const Mesh& mesh, EntityKind kind, int id)
{
  switch (kind) {
    case EntityKind::Element:
      return id;
    case EntityKind::Vertex: {
      const auto& els = mesh.elements_at_vertex(id);
      return *std::min_element(els.begin(), els.end());
    }
    case EntityKind::Edge: {
      const Edge& ed = mesh.edge(id);
      int t = ed.elems[0];
      if (ed.elems[1] >= 0) t = std::min(t, ed.elems[1]);
      return t;
    }
  }
  return -1;
}

Anchor anchor_of_element(const Mesh& mesh, int t0)
{
  // t in omega^(r)({z})  <=>  some element containing z is within r-1 hops of
  // t in the vertex-sharing element graph. BFS by levels from t0; the first
  // level exposing an interior vertex gives minimal r, ties by vertex id.
  std::vector<int> level(mesh.num_elements(), -1);
  std::vector<int> frontier{t0};
  level[t0] = 0;
  int depth = 0;
  while (!frontier.empty()) {
    int best = -1;
    for (int t : frontier)
      for (int v : mesh.element(t))
        if (!mesh.vertex_on_boundary(v) && (best < 0 || v < best)) best = v;
    if (best >= 0) return {best, depth + 1};
    std::vector<int> next;
    for (int t : frontier)
      for (int s : mesh.vertex_neighbors(t))
        if (level[s] < 0) {
          level[s] = depth + 1;
          next.push_back(s);
        }
    frontier.swap(next);
    ++depth;
  }
  throw std::runtime_error("anchor_of_element: no interior vertex reachable");
}

Anchor select_anchor(const Mesh& mesh, EntityKind kind, int id)
{
  if (kind == EntityKind::Vertex && !mesh.vertex_on_boundary(id)) return {id, 1};
  return anchor_of_element(mesh, fixed_element(mesh, kind, id));
}

int mesh_constant_R(const Mesh& mesh)
{
  int R = 1;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    R = std::max(R, select_anchor(mesh, EntityKind::Vertex, v).order);
  for (int e = 0; e < mesh.num_edges(); ++e)
    R = std::max(R, select_anchor(mesh, EntityKind::Edge, e).order);
  for (int t = 0; t < mesh.num_elements(); ++t)
    R = std::max(R, select_anchor(mesh, EntityKind::Element, t).order);
  return R;
}

//------------------------------------------------------------------------
// Generators and refinement
//------------------------------------------------------------------------

Mesh generate_structured(int dim, int n)
{
  if (n < 2) throw std::invalid_argument("generate_structured: n >= 2 required (interior vertex)");
  if (dim == 1) {
    std::vector<Eigen::Vector2d> verts(n + 1);
    for (int i = 0; i <= n; ++i) verts[i] = {static_cast<double>(i) / n, 0.0};
    std::vector<std::vector<int>> elems(n);
    for (int i = 0; i < n; ++i) elems[i] = {i, i + 1};
    return Mesh(1, std::move(verts), std::move(elems));
  }
  std::vector<Eigen::Vector2d> verts((n + 1) * (n + 1));
  auto vid = [n](int i, int j) { return i + j * (n + 1); };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts[vid(i, j)] = {static_cast<double>(i) / n, static_cast<double>(j) / n};
  std::vector<std::vector<int>> elems;
  elems.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      elems.push_back({a, b, c});
      elems.push_back({a, c, d});
    }
  return Mesh(2, std::move(verts), std::move(elems));
}

Mesh refine_uniform(const Mesh& mesh, std::vector<int>* parent_of_child)
{
  std::vector<Eigen::Vector2d> verts(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) verts[v] = mesh.vertex(v);
  std::vector<std::vector<int>> elems;
  std::vector<int> parents;

  if (mesh.dim() == 1) {
    for (int t = 0; t < mesh.num_elements(); ++t) {
      const auto& el = mesh.element(t);
      const int m = static_cast<int>(verts.size());
      verts.push_back(0.5 * (mesh.vertex(el[0]) + mesh.vertex(el[1])));
      elems.push_back({el[0], m});
      elems.push_back({m, el[1]});
      parents.insert(parents.end(), {t, t});
    }
  } else {
    std::vector<int> edge_mid(mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const Edge& ed = mesh.edge(e);
      edge_mid[e] = static_cast<int>(verts.size());
      verts.push_back(0.5 * (mesh.vertex(ed.v[0]) + mesh.vertex(ed.v[1])));
    }
    for (int t = 0; t < mesh.num_elements(); ++t) {
      const auto& el = mesh.element(t);
      const auto& ee = mesh.element_edges(t);
      // m[k] = midpoint of the edge opposite local vertex k
      const int m0 = edge_mid[ee[0]], m1 = edge_mid[ee[1]], m2 = edge_mid[ee[2]];
      elems.push_back({el[0], m2, m1});
      elems.push_back({el[1], m0, m2});
      elems.push_back({el[2], m1, m0});
      elems.push_back({m0, m1, m2});
      parents.insert(parents.end(), {t, t, t, t});
    }
  }
  if (parent_of_child) *parent_of_child = std::move(parents);
  return Mesh(mesh.dim(), std::move(verts), std::move(elems));
}

//------------------------------------------------------------------------
// Random Delaunay meshes
//------------------------------------------------------------------------

namespace {

// Incircle test with extended precision; positive if p is strictly inside the
// circumcircle of (a, b, c) (counterclockwise).
long double incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                     const Eigen::Vector2d& p)
{
  const long double ax = a[0] - p[0], ay = a[1] - p[1];
  const long double bx = b[0] - p[0], by = b[1] - p[1];
  const long double cx = c[0] - p[0], cy = c[1] - p[1];
  const long double a2 = ax * ax + ay * ay;
  const long double b2 = bx * bx + by * by;
  const long double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

struct BWTri {
  int v[3];
  bool alive = true;
};

std::vector<std::vector<int>> bowyer_watson(const std::vector<Eigen::Vector2d>& pts)
{
  const int n = static_cast<int>(pts.size());
  std::vector<Eigen::Vector2d> p = pts;
  // Super-triangle generously containing the unit square.
  p.push_back({-40.0, -40.0});
  p.push_back({80.0, -40.0});
  p.push_back({0.5, 80.0});
  std::vector<BWTri> tris;
  tris.push_back({{n, n + 1, n + 2}, true});

  for (int ip = 0; ip < n; ++ip) {
    std::vector<int> bad;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      if (incircle(p[tris[t].v[0]], p[tris[t].v[1]], p[tris[t].v[2]], p[ip]) > 0.0L)
        bad.push_back(t);
    }
    // Boundary of the cavity: edges appearing in exactly one bad triangle.
    std::map<std::pair<int, int>, std::pair<int, int>> edge_count;
    for (int t : bad)
      for (int e = 0; e < 3; ++e) {
        int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
        auto key = std::minmax(a, b);
        auto it = edge_count.find(key);
        if (it == edge_count.end())
          edge_count[key] = {a, b};
        else
          edge_count.erase(it);
      }
    for (int t : bad) tris[t].alive = false;
    for (const auto& [key, dir] : edge_count)
      tris.push_back({{dir.first, dir.second, ip}, true});
  }

  std::vector<std::vector<int>> elems;
  for (const BWTri& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    std::vector<int> el{t.v[0], t.v[1], t.v[2]};
    if (signed_area(pts[el[0]], pts[el[1]], pts[el[2]]) < 0.0) std::swap(el[1], el[2]);
    elems.push_back(el);
  }
  return elems;
}

double min_angle_deg(const Mesh& mesh)
{
  double amin = 180.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& el = mesh.element(t);
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d u = mesh.vertex(el[(i + 1) % 3]) - mesh.vertex(el[i]);
      const Eigen::Vector2d v = mesh.vertex(el[(i + 2) % 3]) - mesh.vertex(el[i]);
      const double cosang = u.dot(v) / (u.norm() * v.norm());
      amin = std::min(amin, std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / M_PI);
    }
  }
  return amin;
}

}  // namespace

Mesh random_delaunay_mesh(int n, std::uint64_t seed)
{
  if (n < 2) throw std::invalid_argument("random_delaunay_mesh: n >= 2");
  const double h = 1.0 / n;
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * attempt);
    std::uniform_real_distribution<double> jit(-0.25 * h, 0.25 * h);
    std::vector<Eigen::Vector2d> pts((n + 1) * (n + 1));
    auto vid = [n](int i, int j) { return i + j * (n + 1); };
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        Eigen::Vector2d q{static_cast<double>(i) / n, static_cast<double>(j) / n};
        const bool bx = (i == 0 || i == n), by = (j == 0 || j == n);
        if (!bx && !by) {
          q += Eigen::Vector2d{jit(rng), jit(rng)};
        } else if (bx && !by) {
          q[1] += jit(rng);  // slide along the vertical boundary edge
        } else if (!bx && by) {
          q[0] += jit(rng);
        }  // corners stay fixed
        pts[vid(i, j)] = q;
      }
    try {
      Mesh mesh(2, pts, bowyer_watson(pts));
      if (min_angle_deg(mesh) >= 10.0) return mesh;
    } catch (const std::runtime_error&) {
      // degenerate triangulation; retry with a new jitter
    }
  }
  throw std::runtime_error("random_delaunay_mesh: no admissible mesh after 64 attempts");
}

//------------------------------------------------------------------------
// I/O
//------------------------------------------------------------------------

namespace {

std::string format_double(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Mesh read_mesh(std::istream& in)
{
  int d, nv, nt;
  if (!(in >> d >> nv >> nt)) throw std::runtime_error("read_mesh: bad header");
  std::vector<Eigen::Vector2d> verts(nv, Eigen::Vector2d::Zero());
  for (int v = 0; v < nv; ++v) {
    if (!(in >> verts[v][0])) throw std::runtime_error("read_mesh: bad vertex line");
    if (d == 2 && !(in >> verts[v][1])) throw std::runtime_error("read_mesh: bad vertex line");
  }
  std::vector<std::vector<int>> elems(nt, std::vector<int>(d + 1));
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k <= d; ++k)
      if (!(in >> elems[t][k])) throw std::runtime_error("read_mesh: bad element line");
  return Mesh(d, std::move(verts), std::move(elems));
}

void write_mesh(std::ostream& out, const Mesh& mesh)
{
  out << mesh.dim() << ' ' << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << format_double(mesh.vertex(v)[0]);
    if (mesh.dim() == 2) out << ' ' << format_double(mesh.vertex(v)[1]);
    out << '\n';
  }
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& el = mesh.element(t);
    for (std::size_t k = 0; k < el.size(); ++k) out << (k ? " " : "") << el[k];
    out << '\n';
  }
}

Mesh read_mesh_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh(in);
}

void write_mesh_file(const std::string& path, const Mesh& mesh)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path);
  write_mesh(out, mesh);
}

}  // namespace qipp
