// Discrete solvers feeding the postprocessors: lowest-order Raviart-Thomas
// mixed FEM, the element-local gradient-recovery postprocessing it is
// compared against, an HDG scheme with static condensation, and a conforming
// P1 Poisson solver used as a discrete Riesz map.

#pragma once

#include "qipp/fields.hpp"
#include "qipp/mesh.hpp"

#include <Eigen/Sparse>

namespace qipp {

/// RT0 x P0 solution of -div sigma = f, sigma = grad u (homogeneous
/// Dirichlet data imposed weakly). One normal-flux dof per edge (sign tied
/// to the global lo->hi edge orientation) and one constant per element.
struct MixedSolution {
  const Mesh* mesh = nullptr;
  Eigen::VectorXd sigma;  // per edge
  Eigen::VectorXd u;      // per element

  DiscontinuousField scalar_field() const;
  Eigen::Vector2d sigma_at(int t, const Eigen::Vector2d& x) const;
  double div_sigma(int t) const;
};

MixedSolution solve_mixed_rt0(const Mesh& mesh, const ScalarFn& f);

/// Element-local postprocessing: grad u* matched to sigma in P^1(T),
/// element means pinned to the mixed scalar.
DiscontinuousField stenberg_postprocess(const Mesh& mesh, const MixedSolution& mixed);

/// HDG solution for p >= 1: broken vector flux q, broken scalar u, and facet
/// traces uhat on interior edges (Legendre coefficients along the global
/// edge direction; boundary traces are zero).
struct HDGSolution {
  const Mesh* mesh = nullptr;
  int p = 1;
  double tau = 1.0;
  DiscontinuousField u;
  DiscontinuousField qx;
  DiscontinuousField qy;
  Eigen::VectorXd uhat;  // (p+1) modes per interior edge

  /// <qhat . n, 1>_{dT} - <f, 1>_T, for the conservation check.
  double conservation_defect(int t, const ScalarFn& f) const;
};

HDGSolution solve_hdg(const Mesh& mesh, const ScalarFn& f, int p, double tau = 1.0,
                      Eigen::SparseMatrix<double>* condensed_out = nullptr);

/// Conforming P1 solution of -Laplace w = load, w = 0 on the boundary.
ContinuousField solve_poisson_p1(const Mesh& mesh, const ScalarFn& load);
ContinuousField solve_poisson_p1(const Mesh& mesh, const DiscontinuousField& load);

/// sqrt(<g, w_h>) with w_h the P1 solution with load g: discrete surrogate
/// for the H^{-1} norm of g.
double discrete_hminus1_norm(const Mesh& riesz_mesh, const ScalarFn& g);

}  // namespace qipp
