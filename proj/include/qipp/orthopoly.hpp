// Jacobi polynomials and the bivariate family orthogonal on the reference
// triangle, in both closed form and series representation.

#pragma once

#include "qipp/poly.hpp"

namespace qipp {

/// Pochhammer symbol (z)_j = z (z+1) ... (z+j-1), (z)_0 = 1.
double pochhammer(double z, int j);

/// P_k^{(alpha,beta)}(t) via the three-term recurrence.
double jacobi_eval(int k, double alpha, double beta, double t);

/// P_{n,k}(x,y) = P_{n-k}^{(0,2k+1)}(1-2x) (1-x)^k P_k^{(0,0)}(1 - 2y/(1-x)),
/// orthogonal on the reference triangle; evaluated through the exact
/// polynomial coefficient form (well defined at x = 1).
double triangle_orthopoly(int n, int k, double x, double y);

/// Same polynomial as an explicit bivariate coefficient form.
Poly2 triangle_orthopoly_poly(int n, int k);

/// The mirrored family p_{n,k}(x,y) = P_{n,k}(y,x).
inline double triangle_orthopoly_mirrored(int n, int k, double x, double y)
{
  return triangle_orthopoly(n, k, y, x);
}

/// Series representation of p_{n,k}(x,y) (independent of the closed form):
/// sum_m [(k-n)_m (n+k+2)_m / (m!)^2] y^m
///   sum_j [(-k)_j (k+1)_j / (j!)^2] x^j (1-y)^{k-j}.
double triangle_orthopoly_series(int n, int k, double x, double y);

}  // namespace qipp
