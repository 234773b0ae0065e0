// Bubble-weighted dual bases, the local smoothing operator B^p mapping into
// zero-trace bubbles, and the projections Q^p / Qtilde^p built as adjoints of
// the corrected quasi-interpolators.

#pragma once

#include "qipp/fields.hpp"
#include "qipp/quasiinterp.hpp"

#include <Eigen/Sparse>

namespace qipp {

/// Per-element dual functions nu_star in P^p_bubble(T) with
/// <nu_bullet, eta_star>_T = delta. Stored as coefficients over the
/// (eta_gamma * bubble) generators; bubble_poly_degree() = p + dim + 1.
struct BubbleDualBasis {
  const Mesh* mesh = nullptr;
  int p = 0;
  /// C[t](gamma, bullet): nu_bullet = sum_gamma C(gamma, bullet) eta_gamma bubble.
  std::vector<Eigen::MatrixXd> coeffs;

  int bubble_poly_degree() const { return p + mesh->dim() + 1; }
  double eval(int t, int bullet, const Eigen::Vector2d& x) const;
};

BubbleDualBasis dual_bubble_basis(const Mesh& mesh, int p);

/// Matrix of B^p v = sum_T sum_star <v, eta_star>_T nu_star acting on broken
/// fields of degree `source_degree`; output degree p + dim + 1 (block
/// diagonal per element).
Eigen::SparseMatrix<double> build_Bp(const Mesh& mesh, int p, int source_degree);
DiscontinuousField apply_Bp(const BubbleDualBasis& duals, const DiscontinuousField& v);

enum class ProjectionVariant { ZeroBoundary, Free };

/// Matrix of Q^p (ZeroBoundary, built on J0) or Qtilde^p (Free, built on J)
/// from broken degree `source_degree` coefficients to broken P^p
/// coefficients: Q = J' + (1 - J') B', assembled from the interpolator
/// matrices and reference mass pairings.
Eigen::SparseMatrix<double> build_negative_projection(const Mesh& mesh, int p,
                                                      ProjectionVariant variant,
                                                      int source_degree);

/// Convenience wrapper applying the assembled projection to a field.
DiscontinuousField apply_projection(const Eigen::SparseMatrix<double>& Q,
                                    const DiscontinuousField& phi, int p);

}  // namespace qipp
