// Biorthogonal weight functions: local Gram matrices, rank/kernel checks,
// the vicinity-growth algorithm for piecewise-constant weights, the
// minimum-norm saddle-point weight solve, and the lowest-order barycentric
// construction.

#pragma once

#include "qipp/basis.hpp"
#include "qipp/fields.hpp"
#include "qipp/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qipp {

/// Relative singular-value threshold shared by all rank decisions.
inline constexpr double kRankTol = 1e-9;

/// Target degree-of-freedom identifier (vertex z | (edge E, j) | (elem T, k)).
struct DofKey {
  EntityKind kind = EntityKind::Vertex;
  int id = -1;
  int mode = 0;  // j or k, 1-based; 0 for vertices
};

/// Gram of a global polynomial trial space on the patch domain (monomials in
/// the conditioned patch frame) against the broken per-element test basis:
/// B_{jk} = <phi_k, chi_j>, rows = broken test dofs, cols = trial monomials.
Eigen::MatrixXd gram_matrix(const Mesh& mesh, const PatchRef& patch, int trial_degree,
                            int test_degree);

/// Number of right-singular directions with sigma <= tol * sigma_max
/// (plus the structural deficiency when rows < cols). An all-zero matrix has
/// a full kernel.
int kernel_dimension(const Eigen::MatrixXd& B, double tol = kRankTol);

/// Vicinity algorithm: starting from omega^(start_order)({z}), grow by one
/// ring until the P^0-test / P^{p+1}-trial Gram has trivial kernel. Throws if
/// growth exhausts the mesh without reaching full rank.
PatchRef grow_vicinity(const Mesh& mesh, int z, int p, int start_order = 1);

/// A piecewise polynomial weight supported on `support`, biorthogonal to the
/// extended shape functions of the anchor element (Kronecker delta at `dof`).
/// Coefficient blocks follow the order of support.elements, each block in the
/// element's oriented basis of degree `degree`.
struct WeightFunction {
  DofKey dof;
  PatchRef support;
  int degree = 0;         // w in {p, 0}
  int target_degree = 1;  // p + 1
  int anchor_element = -1;
  Eigen::VectorXd coeffs;

  Eigen::Map<const Eigen::VectorXd> block(const Mesh& mesh, int pos) const
  {
    const int bs = poly_space_dim(mesh.dim(), degree);
    return {coeffs.data() + static_cast<std::ptrdiff_t>(pos) * bs, bs};
  }

  double eval(const Mesh& mesh, const Eigen::Vector2d& x, int element) const;
  double sup_norm_estimate(const Mesh& mesh) const;
};

/// Minimum-L2-norm weight for `dof` on `patch`: solves the saddle system
/// [M B^T; B 0][phi; lambda] = [0; e_dof] with M the broken mass of
/// P^w(patch) and B the biorthogonality constraints against all extended
/// shape functions of the anchor element. Throws when the constraint
/// residual reveals a nontrivial kernel (grow the vicinity and retry).
WeightFunction solve_weight(const Mesh& mesh, const DofKey& dof, const PatchRef& patch,
                            int anchor_element, int weight_degree, int target_degree);

/// Max |<phi, q_star> - delta| over the anchor element's extended shape
/// functions, evaluated with an independent, higher-exactness quadrature.
double biorthogonality_defect(const Mesh& mesh, const WeightFunction& w, int extra_exactness = 4);

/// Barycentric coefficients of the lowest-order vertex weight (p = 0):
/// alpha >= 0, sum alpha = 1, sum alpha_T s_T = z, minimum Euclidean norm.
struct LowestOrderWeights {
  PatchRef patch;  // omega_z
  Eigen::VectorXd alpha;
};
LowestOrderWeights lowest_order_vertex_weights(const Mesh& mesh, int z);

/// The induced piecewise-constant weight phi_z = alpha_T / |T| on omega_z.
WeightFunction lowest_order_weight_function(const Mesh& mesh, int z);

}  // namespace qipp
