#include "qipp/orthopoly.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <mutex>

namespace qipp {

double pochhammer(double z, int j)
{
  double r = 1.0;
  for (int k = 0; k < j; ++k) r *= z + k;
  return r;
}

double jacobi_eval(int k, double alpha, double beta, double t)
{
  assert(alpha > -1.0 && beta > -1.0);
  if (k == 0) return 1.0;
  double pm2 = 1.0;
  double pm1 = (alpha + 1.0) + (alpha + beta + 2.0) * (t - 1.0) / 2.0;
  for (int m = 2; m <= k; ++m) {
    const double a = 2.0 * m * (m + alpha + beta) * (2.0 * m + alpha + beta - 2.0);
    const double b = (2.0 * m + alpha + beta - 1.0) * (alpha * alpha - beta * beta);
    const double c =
        (2.0 * m + alpha + beta - 1.0) * (2.0 * m + alpha + beta) * (2.0 * m + alpha + beta - 2.0);
    const double d = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * (2.0 * m + alpha + beta);
    const double p = ((c * t + b) * pm1 - d * pm2) / a;
    pm2 = pm1;
    pm1 = p;
  }
  return pm1;
}

Poly2 triangle_orthopoly_poly(int n, int k)
{
  assert(0 <= k && k <= n);
  static std::map<std::pair<int, int>, Poly2> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({n, k});
  if (it != cache.end()) return it->second;

  // First factor: P_{n-k}^{(0,2k+1)}(1-2x).
  const Poly1 j1 = jacobi_poly1(n - k, 0.0, 2.0 * k + 1.0);
  const Poly2 arg1 = Poly2::constant(1.0) - Poly2::x() * 2.0;
  Poly2 f1 = compose(j1, arg1);

  // Second factor: (1-x)^k P_k^{(0,0)}(1 - 2y/(1-x)) expanded as
  // sum_j c_j (1-x)^{k-j} ((1-x) - 2y)^j, a genuine polynomial.
  const Poly1 j2 = jacobi_poly1(k, 0.0, 0.0);
  const Poly2 one_minus_x = Poly2::constant(1.0) - Poly2::x();
  const Poly2 inner = one_minus_x - Poly2::y() * 2.0;
  Poly2 f2 = Poly2::constant(0.0);
  for (int j = 0; j <= j2.degree(); ++j) {
    Poly2 term = Poly2::constant(j2[j]);
    for (int i = 0; i < k - j; ++i) term = term * one_minus_x;
    for (int i = 0; i < j; ++i) term = term * inner;
    f2 = f2 + term;
  }
  Poly2 result = (f1 * f2).trimmed(0.0);
  cache.emplace(std::make_pair(n, k), result);
  return result;
}

double triangle_orthopoly(int n, int k, double x, double y)
{
  return triangle_orthopoly_poly(n, k).eval(x, y);
}

double triangle_orthopoly_series(int n, int k, double x, double y)
{
  double outer = 0.0;
  for (int m = 0; m <= n - k; ++m) {
    const double cm =
        pochhammer(k - n, m) * pochhammer(n + k + 2, m) / (std::tgamma(m + 1) * std::tgamma(m + 1));
    double inner = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double cj =
          pochhammer(-k, j) * pochhammer(k + 1, j) / (std::tgamma(j + 1) * std::tgamma(j + 1));
      inner += cj * std::pow(x, j) * std::pow(1.0 - y, k - j);
    }
    outer += cm * std::pow(y, m) * inner;
  }
  return outer;
}

}  // namespace qipp
