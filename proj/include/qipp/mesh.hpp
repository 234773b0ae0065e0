// Conforming simplicial meshes (intervals for d = 1, triangles for d = 2)
// with derived edge incidence, boundary flags, element patches omega^(n)(S),
// and anchor selection for weight-function domains.

#pragma once

#include "qipp/poly.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qipp {

struct Edge {
  int v[2];          // global vertex ids, v[0] < v[1]
  int elems[2];      // incident elements, elems[1] = -1 on the boundary
  bool boundary() const { return elems[1] < 0; }
};

class Mesh {
public:
  /// Build from raw data; derives edges, incidence and boundary flags and
  /// validates all invariants (conformity, positive measure, at least one
  /// interior vertex). Throws std::runtime_error on violation.
  Mesh(int dim, std::vector<Eigen::Vector2d> vertices, std::vector<std::vector<int>> elements);

  int dim() const { return dim_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int verts_per_elem() const { return dim_ + 1; }

  const Eigen::Vector2d& vertex(int v) const { return vertices_[v]; }
  const std::vector<int>& element(int t) const { return elements_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }

  bool vertex_on_boundary(int v) const { return vertex_boundary_[v]; }
  bool edge_on_boundary(int e) const { return edges_[e].boundary(); }

  const std::vector<int>& elements_at_vertex(int v) const { return vertex_elems_[v]; }
  const std::vector<int>& interior_vertices() const { return interior_vertices_; }

  /// Edge ids of element t, local edge e opposite local vertex e (d = 2).
  const std::array<int, 3>& element_edges(int t) const { return elem_edges_[t]; }
  /// Global edge id between two vertices, -1 if absent.
  int find_edge(int a, int b) const;

  double element_measure(int t) const { return measure_[t]; }
  double element_diameter(int t) const { return diameter_[t]; }
  Eigen::Vector2d element_centroid(int t) const;
  double mesh_size() const { return h_max_; }

  /// Elements sharing at least one vertex with t (t included).
  const std::vector<int>& vertex_neighbors(int t) const { return elem_neighbors_[t]; }

private:
  int dim_;
  std::vector<Eigen::Vector2d> vertices_;
  std::vector<std::vector<int>> elements_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> elem_edges_;
  std::vector<bool> vertex_boundary_;
  std::vector<std::vector<int>> vertex_elems_;
  std::vector<std::vector<int>> elem_neighbors_;
  std::vector<int> interior_vertices_;
  std::vector<double> measure_;
  std::vector<double> diameter_;
  double h_max_ = 0.0;

  void build_topology();
  void validate() const;
};

//------------------------------------------------------------------------
// Patches
//------------------------------------------------------------------------

enum class SeedKind { Vertex, Edge, Element, Region };

struct PatchRef {
  std::vector<int> elements;  // sorted ascending
  SeedKind seed_kind = SeedKind::Vertex;
  int seed_id = -1;
  int order = 1;

  bool contains(int t) const;
  int size() const { return static_cast<int>(elements.size()); }
};

/// Conditioned frame of the patch domain: area-weighted centroid and the
/// diameter of the union (max distance between patch vertices).
Frame patch_frame(const Mesh& mesh, const PatchRef& patch);
double patch_measure(const Mesh& mesh, const PatchRef& patch);

/// omega^(n)(seed): recursive closure-intersection patch.
PatchRef element_patch(const Mesh& mesh, SeedKind kind, int seed_id, int order);
/// One growth step omega(Omega(patch)); keeps seed bookkeeping, order + 1.
PatchRef grow_patch(const Mesh& mesh, const PatchRef& patch);
/// Union of two patches (sorted merge); order = max of the two.
PatchRef patch_union(const PatchRef& a, const PatchRef& b);

//------------------------------------------------------------------------
// Anchors
//------------------------------------------------------------------------

struct Anchor {
  int vertex = -1;  // interior vertex z
  int order = 0;    // minimal r with the fixed element in omega^(r)({z})
};

enum class EntityKind { Vertex, Edge, Element };

/// Designated element of an entity: smallest element id containing it.
int fixed_element(const Mesh& mesh, EntityKind kind, int id);

/// Minimal (r, z): fixed element of the entity contained in omega^(r)({z}),
/// r minimal over interior vertices, ties broken by smallest vertex id.
/// Interior vertices anchor to themselves with r = 1.
Anchor select_anchor(const Mesh& mesh, EntityKind kind, int id);

/// Minimal r such that element t lies in omega^(r)({z}) for interior z.
Anchor anchor_of_element(const Mesh& mesh, int t);

/// Mesh constant R = max anchor order over all vertices, edges, elements.
int mesh_constant_R(const Mesh& mesh);

//------------------------------------------------------------------------
// Generators, refinement, I/O
//------------------------------------------------------------------------

/// Uniform mesh of the unit interval (n subintervals) or the unit square
/// (n x n squares, each split by the lower-left to upper-right diagonal,
/// 2 n^2 triangles). Requires n >= 2 so an interior vertex exists.
Mesh generate_structured(int dim, int n);

/// Red refinement: triangles split into 4 congruent children via edge
/// midpoints, intervals into 2 halves. Optionally reports the parent element
/// of each child.
Mesh refine_uniform(const Mesh& mesh, std::vector<int>* parent_of_child = nullptr);

/// Jittered structured vertices (jitter <= 0.25 h, boundary vertices jittered
/// along the boundary) retriangulated by Delaunay; meshes with minimum angle
/// below 10 degrees are rejected and regenerated from the next seed.
Mesh random_delaunay_mesh(int n, std::uint64_t seed);

/// Text format: "d nv nt", nv coordinate lines, nt element lines (0-based).
Mesh read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);
void write_mesh_file(const std::string& path, const Mesh& mesh);

}  // namespace qipp
