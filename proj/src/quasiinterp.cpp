#include "qipp/quasiinterp.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace qipp {

namespace {

int target_dof_id(const DofMap& dm, const DofKey& key)
{
  switch (key.kind) {
    case EntityKind::Vertex:
      return dm.vertex_dof(key.id);
    case EntityKind::Edge:
      return dm.edge_dof(key.id, key.mode);
    case EntityKind::Element:
      return dm.element_dof(key.id, key.mode);
  }
  return -1;
}

// Smallest-id element of the patch that has z among its vertices.
int anchor_in_patch_at_vertex(const Mesh& mesh, const PatchRef& patch, int z)
{
  for (int t : patch.elements) {
    for (int v : mesh.element(t))
      if (v == z) return t;
  }
  throw std::logic_error("no patch element contains the vertex");
}

}  // namespace

QuasiInterpolator build_interpolator(const Mesh& mesh, int p, OperatorKind kind,
                                     PatchPolicy policy)
{
  QuasiInterpolator qi;
  qi.kind_ = kind;
  qi.p_ = p;
  qi.policy_ = policy;
  qi.mesh_ = &mesh;
  qi.target_ = DofMap(mesh, p + 1);
  qi.dof_to_weight_.assign(qi.target_.total(), -1);

  const bool zero_bc = zero_boundary_kind(kind);
  const bool constant_w = constant_weight_kind(kind);
  const int g = p + 1;
  const int w_deg = constant_w ? 0 : p;

  // Vertex vicinities for the piecewise-constant weights (Assumption on the
  // P^0 Gram, established by the vicinity algorithm). The small policy uses
  // order-p initial patches for p >= 2, the default order p + 1.
  std::map<int, PatchRef> vicinity;
  if (constant_w) {
    const int start = (policy == PatchPolicy::Small && p >= 2) ? p : p + 1;
    for (int z : mesh.interior_vertices()) {
      PatchRef v = grow_vicinity(mesh, z, p, start);
      qi.max_vicinity_order_ = std::max(qi.max_vicinity_order_, v.order);
      vicinity.emplace(z, std::move(v));
    }
  }

  // Support patch and anchor element for one target dof, honoring the
  // nesting Omega_z(anchor) inside the entity's vicinity for I kinds.
  auto weight_domain = [&](const DofKey& key) -> std::pair<PatchRef, int> {
    if (key.kind == EntityKind::Vertex && !mesh.vertex_on_boundary(key.id)) {
      if (constant_w) {
        const PatchRef& vz = vicinity.at(key.id);
        return {vz, anchor_in_patch_at_vertex(mesh, vz, key.id)};
      }
      PatchRef patch = element_patch(mesh, SeedKind::Vertex, key.id, 1);
      return {patch, patch.elements.front()};
    }
    const int t_star = fixed_element(mesh, key.kind, key.id);
    const Anchor a = select_anchor(mesh, key.kind, key.id);
    qi.R_ = std::max(qi.R_, a.order);
    PatchRef ring = element_patch(mesh, SeedKind::Vertex, a.vertex, a.order);
    if (constant_w) {
      PatchRef u = patch_union(vicinity.at(a.vertex), ring);
      qi.max_vicinity_order_ = std::max(qi.max_vicinity_order_, u.order);
      return {u, t_star};
    }
    return {ring, t_star};
  };

  auto add_weight = [&](const DofKey& key) {
    auto [patch, t_star] = weight_domain(key);
    WeightFunction w = solve_weight(mesh, key, patch, t_star, w_deg, g);
    qi.dof_to_weight_[target_dof_id(qi.target_, key)] = static_cast<int>(qi.weights_.size());
    qi.weights_.push_back(std::move(w));
  };

  for (int z = 0; z < mesh.num_vertices(); ++z) {
    if (zero_bc && mesh.vertex_on_boundary(z)) continue;
    add_weight({EntityKind::Vertex, z, 0});
  }
  const int nE = edge_mode_count(mesh.dim(), g);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (zero_bc && mesh.edge_on_boundary(e)) continue;
    for (int j = 1; j <= nE; ++j) add_weight({EntityKind::Edge, e, j});
  }
  const int nT = interior_mode_count(mesh.dim(), g);
  for (int t = 0; t < mesh.num_elements(); ++t)
    for (int k = 1; k <= nT; ++k) add_weight({EntityKind::Element, t, k});

  return qi;
}

ContinuousField QuasiInterpolator::apply(const DiscontinuousField& field) const
{
  if (&field.mesh() != mesh_) throw std::invalid_argument("apply: field lives on another mesh");
  if (field.degree() < source_degree())
    throw std::invalid_argument("apply: field degree below the operator's source degree");

  const int s = field.degree();
  const int d = mesh_->dim();
  ContinuousField out(*mesh_, target_degree(), zero_boundary_kind(kind_));
  auto& cache = BasisCache::instance();

  for (std::size_t wi = 0; wi < weights_.size(); ++wi) {
    const WeightFunction& w = weights_[wi];
    double c = 0.0;
    for (int pos = 0; pos < w.support.size(); ++pos) {
      const int t = w.support.elements[pos];
      const unsigned oc = element_orientation(*mesh_, t);
      const Eigen::MatrixXd& cross = cache.cross_mass(d, s, w.degree, oc);
      c += element_map(*mesh_, t).detJ * field.block(t).dot(cross * w.block(*mesh_, pos));
    }
    out.values()[target_dof_id(target_, w.dof)] = c;
  }
  return out;
}

Eigen::SparseMatrix<double> QuasiInterpolator::matrix(int source_degree) const
{
  const int d = mesh_->dim();
  const int bs = poly_space_dim(d, source_degree);
  auto& cache = BasisCache::instance();
  std::vector<Eigen::Triplet<double>> trips;
  for (const WeightFunction& w : weights_) {
    const int row = target_dof_id(target_, w.dof);
    for (int pos = 0; pos < w.support.size(); ++pos) {
      const int t = w.support.elements[pos];
      const unsigned oc = element_orientation(*mesh_, t);
      const Eigen::MatrixXd& cross = cache.cross_mass(d, source_degree, w.degree, oc);
      const Eigen::VectorXd entries =
          element_map(*mesh_, t).detJ * (cross * w.block(*mesh_, pos));
      for (int i = 0; i < bs; ++i) trips.emplace_back(row, t * bs + i, entries[i]);
    }
  }
  Eigen::SparseMatrix<double> m(target_.total(),
                                static_cast<Eigen::Index>(bs) * mesh_->num_elements());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

void write_triplets(std::ostream& out, const Eigen::SparseMatrix<double>& m)
{
  char buf[64];
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.16g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      out << buf;
    }
}

}  // namespace qipp
