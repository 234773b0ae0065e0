#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qipp/orthopoly.hpp"
#include "qipp/quadrature.hpp"

#include <cmath>
#include <functional>

using namespace qipp;

namespace {

double triangle_ip(const std::function<double(double, double)>& f,
                   const std::function<double(double, double)>& g, int exactness)
{
  const QuadRule& rule = triangle_rule(exactness);
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q)
    s += rule.weights[q] * f(rule.points(q, 0), rule.points(q, 1)) *
         g(rule.points(q, 0), rule.points(q, 1));
  return s;
}

}  // namespace

TEST_CASE("jacobi basics: P_0 = 1, P_1^{(0,1)} explicit, endpoint value")
{
  for (double t : {-0.9, 0.0, 0.7}) {
    CHECK(jacobi_eval(0, 0.3, 1.7, t) == doctest::Approx(1.0));
    CHECK(jacobi_eval(1, 0.0, 1.0, t) == doctest::Approx((3.0 * t - 1.0) / 2.0).epsilon(1e-14));
  }
  // P_n^{(a,b)}(1) = (a+1)_n / n!
  for (int n : {2, 3, 5})
    CHECK(jacobi_eval(n, 0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("weighted jacobi orthogonality under the (0,1)-substitution")
{
  // int_0^1 P_n^{(0,1)}(1-2t) q(t) (1-t) dt = 0 for deg q < n
  const QuadRule& rule = interval_rule(16);
  for (int n : {1, 2, 3, 4}) {
    for (int dq = 0; dq < n; ++dq) {
      double s = 0.0;
      for (int q = 0; q < rule.size(); ++q) {
        const double t = rule.points(q, 0);
        s += rule.weights[q] * jacobi_eval(n, 0.0, 1.0, 1.0 - 2.0 * t) * std::pow(t, dq) *
             (1.0 - t);
      }
      CHECK(std::abs(s) < 1e-14);
    }
  }
}

TEST_CASE("triangle orthopoly: P_00 = 1 and pairwise orthogonality to 1e-12")
{
  CHECK(triangle_orthopoly(0, 0, 0.3, 0.2) == doctest::Approx(1.0));
  for (int n = 0; n <= 4; ++n)
    for (int k = 0; k <= n; ++k)
      for (int m = 0; m <= 4; ++m)
        for (int l = 0; l <= m; ++l) {
          if (n == m && k == l) continue;
          const double ip = triangle_ip(
              [&](double x, double y) { return triangle_orthopoly(n, k, x, y); },
              [&](double x, double y) { return triangle_orthopoly(m, l, x, y); }, 2 * 4 + 2);
          CHECK(std::abs(ip) < 1e-12);
        }
}

TEST_CASE("triangle orthopoly is orthogonal to lower-degree monomials")
{
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k <= n; ++k)
      for (int a = 0; a <= n - 1; ++a)
        for (int b = 0; a + b <= n - 1; ++b) {
          const double ip = triangle_ip(
              [&](double x, double y) { return triangle_orthopoly(n, k, x, y); },
              [&](double x, double y) { return std::pow(x, a) * std::pow(y, b); }, 2 * n + 2);
          CHECK(std::abs(ip) < 1e-13);
        }
}

TEST_CASE("closed form agrees with the series at 100 random points, n <= 5")
{
  oracle::Rng rng(42);
  for (int n = 0; n <= 5; ++n)
    for (int k = 0; k <= n; ++k)
      for (int pt = 0; pt < 100 / (n + 1); ++pt) {
        // random point in the reference triangle
        double x = 0.5 * (rng() + 1.0), y = 0.5 * (rng() + 1.0);
        if (x + y > 1.0) {
          x = 1.0 - x;
          y = 1.0 - y;
        }
        const double closed = triangle_orthopoly_mirrored(n, k, x, y);
        const double series = triangle_orthopoly_series(n, k, x, y);
        CHECK(closed == doctest::Approx(series).epsilon(1e-10));
      }
}

TEST_CASE("the three k = 0 directions lie in the orthogonal complement")
{
  // P_n^{(0,1)}(1-2x), P_n^{(0,1)}(1-2y), P_n^{(0,1)}(2(x+y)-1) are each
  // orthogonal to all of P^{n-1} on the reference triangle.
  for (int n = 1; n <= 4; ++n) {
    auto check_dir = [&](const std::function<double(double, double)>& f) {
      for (int a = 0; a <= n - 1; ++a)
        for (int b = 0; a + b <= n - 1; ++b) {
          const double ip = triangle_ip(
              f, [&](double x, double y) { return std::pow(x, a) * std::pow(y, b); }, 2 * n + 2);
          CHECK(std::abs(ip) < 1e-13);
        }
    };
    check_dir([&](double x, double) { return jacobi_eval(n, 0.0, 1.0, 1.0 - 2.0 * x); });
    check_dir([&](double, double y) { return jacobi_eval(n, 0.0, 1.0, 1.0 - 2.0 * y); });
    check_dir(
        [&](double x, double y) { return jacobi_eval(n, 0.0, 1.0, 2.0 * (x + y) - 1.0); });
  }
}
