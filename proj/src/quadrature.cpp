#include "qipp/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <mutex>
#include <stdexcept>

namespace qipp {

namespace {

// Golub-Welsch: eigenvalues of the symmetric Jacobi matrix of the monic
// three-term recurrence give the nodes, first eigenvector components the
// weights.
void golub_welsch(const std::vector<double>& a, const std::vector<double>& b, double mu0,
                  std::vector<double>& pts, std::vector<double>& wts)
{
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = a[i];
    if (i + 1 < n) {
      const double s = std::sqrt(b[i + 1]);
      J(i, i + 1) = s;
      J(i + 1, i) = s;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  pts.resize(n);
  wts.resize(n);
  for (int i = 0; i < n; ++i) {
    pts[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    wts[i] = mu0 * v0 * v0;
  }
}

// Recurrence coefficients for Jacobi weight (1-t)^alpha (1+t)^beta on (-1,1),
// monic form: p_{k+1} = (t - a_k) p_k - b_k p_{k-1}.
void jacobi_recurrence(int n, double alpha, double beta, std::vector<double>& a,
                       std::vector<double>& b, double& mu0)
{
  a.resize(n);
  b.resize(n);
  const double ab = alpha + beta;
  mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
        std::tgamma(ab + 2.0);
  for (int k = 0; k < n; ++k) {
    const double kk = k;
    const double den = (2.0 * kk + ab) * (2.0 * kk + ab + 2.0);
    a[k] = den != 0.0 ? (beta * beta - alpha * alpha) / den : (beta - alpha) / (ab + 2.0);
    if (k == 0) {
      b[k] = 0.0;
    } else if (k == 1) {
      b[k] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    } else {
      b[k] = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) /
             ((2.0 * kk + ab) * (2.0 * kk + ab) * (2.0 * kk + ab + 1.0) * (2.0 * kk + ab - 1.0));
    }
  }
}

void gauss_jacobi_m11(int n, double alpha, double beta, std::vector<double>& pts,
                      std::vector<double>& wts)
{
  std::vector<double> a, b;
  double mu0;
  jacobi_recurrence(n, alpha, beta, a, b, mu0);
  golub_welsch(a, b, mu0, pts, wts);
}

std::mutex cache_mutex;

}  // namespace

void gauss_legendre_01(int n, std::vector<double>& pts, std::vector<double>& wts)
{
  gauss_jacobi_m11(n, 0.0, 0.0, pts, wts);
  for (int i = 0; i < n; ++i) {
    pts[i] = 0.5 * (pts[i] + 1.0);
    wts[i] *= 0.5;
  }
}

const QuadRule& interval_rule(int exactness)
{
  if (exactness < 0) throw std::invalid_argument("interval_rule: negative exactness");
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(exactness);
  if (it != cache.end()) return it->second;

  const int n = exactness / 2 + 1;
  std::vector<double> p, w;
  gauss_legendre_01(n, p, w);
  QuadRule rule;
  rule.dim = 1;
  rule.exactness = exactness;
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points(i, 0) = p[i];
    rule.points(i, 1) = 0.0;
    rule.weights[i] = w[i];
  }
  return cache.emplace(exactness, std::move(rule)).first->second;
}

const QuadRule& triangle_rule(int exactness)
{
  if (exactness < 0) throw std::invalid_argument("triangle_rule: negative exactness");
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(exactness);
  if (it != cache.end()) return it->second;

  // Conical product: x = xi (1 - eta), y = eta with Jacobian (1 - eta).
  // Legendre in xi, Jacobi(1,0) in eta absorbs the Jacobian factor.
  const int n = exactness / 2 + 1;
  std::vector<double> px, wx;
  gauss_legendre_01(n, px, wx);
  std::vector<double> pe, we;
  gauss_jacobi_m11(n, 1.0, 0.0, pe, we);
  // Map (-1,1) with weight (1-t)^1 to (0,1) with weight (1-eta):
  // t = 2 eta - 1, (1-t) = 2(1-eta), dt = 2 d eta  =>  scale weights by 1/4.
  for (int i = 0; i < n; ++i) {
    pe[i] = 0.5 * (pe[i] + 1.0);
    we[i] *= 0.25;
  }

  QuadRule rule;
  rule.dim = 2;
  rule.exactness = exactness;
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  int q = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j, ++q) {
      rule.points(q, 0) = px[i] * (1.0 - pe[j]);
      rule.points(q, 1) = pe[j];
      rule.weights[q] = wx[i] * we[j];
    }
  return cache.emplace(exactness, std::move(rule)).first->second;
}

}  // namespace qipp
