// Hierarchical shape functions on the reference simplex: barycentric vertex
// functions, edge modes built from Jacobi(1,1) kernels of the barycentric
// difference, and bubble-times-monomial interior modes. Edge kernels follow
// the global lo->hi edge orientation, so traces glue conformingly; one basis
// variant is cached per element orientation code.

#pragma once

#include "qipp/mesh.hpp"
#include "qipp/poly.hpp"
#include "qipp/quadrature.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace qipp {

struct DofDesc {
  enum Kind { VertexFn, EdgeFn, InteriorFn } kind;
  int entity;  // local vertex / local edge index (edge e opposite vertex e)
  int index;   // 1-based mode index within the entity (0 for vertices)
};

inline int edge_mode_count(int dim, int p) { return dim == 1 ? 0 : std::max(p - 1, 0); }
inline int interior_mode_count(int dim, int p)
{
  return dim == 1 ? std::max(p - 1, 0) : std::max((p - 1) * (p - 2) / 2, 0);
}

/// Basis of P^p on the reference simplex for a fixed edge-orientation code
/// (bit e set = local edge e traversed against its local direction).
/// For p = 0 this is the single constant function.
class ReferenceBasis {
public:
  ReferenceBasis(int dim, int p, unsigned orient_code);

  int dim() const { return dim_; }
  int degree() const { return p_; }
  int size() const { return static_cast<int>(funcs_.size()); }
  const Poly2& function(int i) const { return funcs_[i]; }
  const DofDesc& dof(int i) const { return dofs_[i]; }

  /// Values at the nodes of a reference rule (cached per rule exactness).
  const Eigen::MatrixXd& values_at(const QuadRule& rule) const;  // size x npts
  const Eigen::MatrixXd& dx_at(const QuadRule& rule) const;
  const Eigen::MatrixXd& dy_at(const QuadRule& rule) const;

private:
  int dim_, p_;
  std::vector<Poly2> funcs_;
  std::vector<DofDesc> dofs_;
  mutable std::vector<std::array<Eigen::MatrixXd, 3>> value_cache_;  // per exactness
};

/// Shared registry of reference bases and reference integral tables.
/// All returned references stay valid for the program lifetime.
class BasisCache {
public:
  static BasisCache& instance();

  const ReferenceBasis& basis(int dim, int p, unsigned orient_code);

  /// Reference mass between degree-a and degree-b bases (same orientation):
  /// M_ij = int_ref eta_i^(a) eta_j^(b).
  const Eigen::MatrixXd& cross_mass(int dim, int a, int b, unsigned orient_code);

  /// Bubble-weighted Gram: G_ij = int_ref eta_i^(p) eta_j^(p) bubble (d = 2:
  /// bubble = lambda0 lambda1 lambda2; d = 1: lambda0 lambda1).
  const Eigen::MatrixXd& bubble_gram(int dim, int p, unsigned orient_code);

  /// R_ij = int_ref eta_i^(s) eta_j^(p) bubble (rows degree s, cols degree p).
  const Eigen::MatrixXd& bubble_cross(int dim, int s, int p, unsigned orient_code);

private:
  BasisCache() = default;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

//------------------------------------------------------------------------
// Element-level geometry and basis access
//------------------------------------------------------------------------

struct ElementMap {
  // x = v0 + J xhat (J is 2x2; for d = 1 only J(0,0) is used)
  Eigen::Vector2d v0;
  Eigen::Matrix2d J;
  Eigen::Matrix2d Jinv;
  double detJ;  // = dim! * measure

  Eigen::Vector2d to_physical(const Eigen::Vector2d& xhat) const { return v0 + J * xhat; }
  Eigen::Vector2d to_reference(const Eigen::Vector2d& x) const { return Jinv * (x - v0); }
};

ElementMap element_map(const Mesh& mesh, int t);

/// Orientation code of element t: bit e set if the local edge pair
/// ((e+1)%3, (e+2)%3) runs from higher to lower global vertex id.
unsigned element_orientation(const Mesh& mesh, int t);

/// Oriented basis of degree p on element t, as polynomials in physical
/// coordinates expressed in the given frame (the extension operator makes
/// these usable on any containing domain).
std::vector<LocalPoly> element_basis_polys(const Mesh& mesh, int t, int p, const Frame& frame);

/// Quadrature points of `rule` mapped to element t (rows = points).
Eigen::Matrix<double, Eigen::Dynamic, 2> mapped_points(const Mesh& mesh, int t,
                                                       const QuadRule& rule);

}  // namespace qipp
