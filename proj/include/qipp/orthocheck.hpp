// Numerical verification of the joint-orthogonality nullspaces on two
// adjacent triangles and on full interior-vertex patches: the solvability
// facts behind the weight-function construction.

#pragma once

#include "qipp/mesh.hpp"
#include "qipp/poly.hpp"

#include <Eigen/Dense>

namespace qipp {

/// Two adjacent triangles sharing an edge of the reference triangle.
/// Horizontal family: T = conv{(1,0),(0,0),(-c/(d-c), 1/(d-c))} below the
/// x-axis edge; Vertical family: the mirrored configuration across x = y.
struct TwoTriangleConfig {
  enum Family { Horizontal, Vertical } family = Horizontal;
  double c = 0.0;
  double d = 0.0;
  int n = 1;
};

struct NullspaceResult {
  int dimension = 0;
  Frame frame;                // trial monomials live in this frame
  Eigen::MatrixXd basis;      // orthonormal columns (coefficient vectors)
  Eigen::VectorXd singular_values;
};

/// Nullspace of { q in P^n(union) : q orthogonal to P^{n-1} on each
/// triangle }. Throws for degenerate configs (d - c >= 0).
NullspaceResult joint_nullspace(const TwoTriangleConfig& config);

/// dim { q in P^n(Omega_z) : q orthogonal to P^{n-1}(T) for all T in
/// omega_z }; zero is the full-rank condition of the weight solves.
int patch_nullspace(const Mesh& mesh, int z, int n);

/// Coefficient vector of a polynomial in the frame's monomial order.
Eigen::VectorXd poly_coefficients(const Poly2& p, int degree);

/// Angle between span(v) and the subspace spanned by the orthonormal columns
/// of `basis` (radians).
double principal_angle(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v);

/// Predicted nullspace spans for the exceptional cases, expressed in the
/// given frame: P_n^{(0,1)}(1-2x), P_n^{(0,1)}(1-2y), P_n^{(0,1)}(2(x+y)-1),
/// and the n = 2, d = c-1 combination of the mirrored triangle family.
Poly2 predicted_case_c0(int n);
Poly2 predicted_case_d1(int n);
Poly2 predicted_case_c0_vertical(int n);
Poly2 predicted_case_n2_dcm1(double c, TwoTriangleConfig::Family family);

/// In-frame coefficient vector of a global-coordinate polynomial.
Eigen::VectorXd coefficients_in_frame(const Poly2& global_poly, const Frame& frame, int degree);

}  // namespace qipp
