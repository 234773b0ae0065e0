// Quadrature on the reference simplex: Gauss-Legendre on (0,1) and conical
// product rules on the unit triangle. Rules are exact to the requested
// polynomial degree, have positive weights, and are cached by exactness.

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace qipp {

struct QuadRule {
  // Reference coordinates; for d = 1 only x() entries are used (y = 0).
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
  int exactness = 0;
  int dim = 2;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Legendre nodes/weights on (0,1); n points, exact to degree 2n-1.
void gauss_legendre_01(int n, std::vector<double>& pts, std::vector<double>& wts);

/// Rule on the reference interval (0,1), exact for all p with deg p <= exactness.
const QuadRule& interval_rule(int exactness);

/// Rule on the reference triangle {x,y>0, x+y<1}, exact to the given degree.
const QuadRule& triangle_rule(int exactness);

/// Dispatch on dimension.
inline const QuadRule& reference_rule(int dim, int exactness)
{
  return dim == 1 ? interval_rule(exactness) : triangle_rule(exactness);
}

}  // namespace qipp
