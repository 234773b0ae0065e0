#include "qipp/orthocheck.hpp"

#include "qipp/basis.hpp"
#include "qipp/orthopoly.hpp"
#include "qipp/quadrature.hpp"
#include "qipp/weights.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace qipp {

namespace {

struct Tri {
  Eigen::Vector2d v[3];
  double area() const
  {
    return 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) -
                  (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
  }
};

std::array<Tri, 2> config_triangles(const TwoTriangleConfig& cfg)
{
  if (cfg.d - cfg.c >= 0.0)
    throw std::invalid_argument("joint_nullspace: requires d - c < 0");
  const Tri ref{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  Tri adj;
  if (cfg.family == TwoTriangleConfig::Horizontal) {
    adj = Tri{{{1.0, 0.0}, {0.0, 0.0}, {-cfg.c / (cfg.d - cfg.c), 1.0 / (cfg.d - cfg.c)}}};
  } else {
    adj = Tri{{{0.0, 0.0}, {0.0, 1.0}, {1.0 / (cfg.d - cfg.c), -cfg.c / (cfg.d - cfg.c)}}};
  }
  return {ref, adj};
}

// Constraint rows <q, monomial_j(local tri frame)>_Tri for all monomials of
// degree <= n-1, q over the union-frame trial monomials of degree <= n.
void append_constraints(const Tri& tri, const Frame& frame, int n, std::vector<Eigen::VectorXd>& rows)
{
  const auto trial = monomial_exponents(2, n);
  const auto test = monomial_exponents(2, n - 1);
  const QuadRule& rule = triangle_rule(2 * n + 2);
  // local frame of the triangle for a conditioned test basis
  Frame lf;
  lf.center = (tri.v[0] + tri.v[1] + tri.v[2]) / 3.0;
  double diam = 0.0;
  for (int i = 0; i < 3; ++i)
    diam = std::max(diam, (tri.v[i] - tri.v[(i + 1) % 3]).norm());
  lf.len = diam;

  const double jac = 2.0 * tri.area();
  std::vector<Eigen::VectorXd> local(test.size(), Eigen::VectorXd::Zero(trial.size()));
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::Vector2d x = tri.v[0] + rule.points(q, 0) * (tri.v[1] - tri.v[0]) +
                              rule.points(q, 1) * (tri.v[2] - tri.v[0]);
    const Eigen::Vector2d u = frame.to_local(x);
    const Eigen::Vector2d w = lf.to_local(x);
    Eigen::VectorXd tv(trial.size());
    for (std::size_t m = 0; m < trial.size(); ++m)
      tv[static_cast<Eigen::Index>(m)] = std::pow(u[0], trial[m][0]) * std::pow(u[1], trial[m][1]);
    for (std::size_t r = 0; r < test.size(); ++r) {
      const double tw = std::pow(w[0], test[r][0]) * std::pow(w[1], test[r][1]);
      local[r] += rule.weights[q] * jac * tw * tv;
    }
  }
  for (auto& r : local) rows.push_back(std::move(r));
}

}  // namespace

Eigen::VectorXd poly_coefficients(const Poly2& p, int degree)
{
  const auto exps = monomial_exponents(2, degree);
  Eigen::VectorXd c(exps.size());
  for (std::size_t m = 0; m < exps.size(); ++m)
    c[static_cast<Eigen::Index>(m)] = p.coef(exps[m][0], exps[m][1]);
  return c;
}

Eigen::VectorXd coefficients_in_frame(const Poly2& global_poly, const Frame& frame, int degree)
{
  const LocalPoly lp{global_poly, Frame{}};  // global coordinates = identity frame
  return poly_coefficients(lp.in_frame(frame).poly, degree);
}

NullspaceResult joint_nullspace(const TwoTriangleConfig& cfg)
{
  const auto tris = config_triangles(cfg);
  // union frame
  Frame frame;
  Eigen::Vector2d cmin = tris[0].v[0], cmax = tris[0].v[0];
  for (const Tri& t : tris)
    for (int i = 0; i < 3; ++i) {
      cmin = cmin.cwiseMin(t.v[i]);
      cmax = cmax.cwiseMax(t.v[i]);
    }
  frame.center = 0.5 * (cmin + cmax);
  frame.len = (cmax - cmin).norm();

  std::vector<Eigen::VectorXd> rows;
  for (const Tri& t : tris) append_constraints(t, frame, cfg.n, rows);
  Eigen::MatrixXd B(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) B.row(static_cast<Eigen::Index>(r)) = rows[r];

  // Whiten the trial basis by the L2 Gram of the union domain so singular
  // values measure the operator, not the monomial conditioning (anisotropic
  // configs at n = 4 otherwise dip below the rank tolerance spuriously).
  const auto trial = monomial_exponents(2, cfg.n);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(trial.size(), trial.size());
  const QuadRule& rule = triangle_rule(2 * cfg.n + 2);
  for (const Tri& t : tris) {
    const double jac = 2.0 * t.area();
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d x = t.v[0] + rule.points(q, 0) * (t.v[1] - t.v[0]) +
                                rule.points(q, 1) * (t.v[2] - t.v[0]);
      const Eigen::Vector2d u = frame.to_local(x);
      Eigen::VectorXd tv(trial.size());
      for (std::size_t m = 0; m < trial.size(); ++m)
        tv[static_cast<Eigen::Index>(m)] = std::pow(u[0], trial[m][0]) * std::pow(u[1], trial[m][1]);
      gram += rule.weights[q] * jac * tv * tv.transpose();
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const Eigen::MatrixXd Bw = llt.matrixU().template solve<Eigen::OnTheRight>(B);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Bw, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s[i] > kRankTol * smax) ++rank;

  NullspaceResult res;
  res.frame = frame;
  res.singular_values = s;
  res.dimension = static_cast<int>(B.cols()) - rank;
  // map whitened kernel vectors back to monomial coefficients and
  // re-orthonormalize for the principal-angle convention
  Eigen::MatrixXd kernel = llt.matrixU().solve(svd.matrixV().rightCols(res.dimension));
  if (res.dimension > 0) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
    res.basis = qr.householderQ() * Eigen::MatrixXd::Identity(kernel.rows(), res.dimension);
  } else {
    res.basis = kernel;
  }
  return res;
}

int patch_nullspace(const Mesh& mesh, int z, int n)
{
  const PatchRef patch = element_patch(mesh, SeedKind::Vertex, z, 1);
  return kernel_dimension(gram_matrix(mesh, patch, n, n - 1));
}

double principal_angle(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v)
{
  const double vn = v.norm();
  if (vn == 0.0 || basis.cols() == 0) return M_PI / 2.0;
  // atan2 of the orthogonal and parallel components resolves angles all the
  // way down to machine precision (acos flattens below sqrt(eps)).
  const Eigen::VectorXd proj = basis.transpose() * v;
  const double para = proj.norm();
  const double ortho = (v - basis * proj).norm();
  return std::atan2(ortho, para);
}

Poly2 predicted_case_c0(int n)
{
  // P_n^{(0,1)}(1 - 2x)
  return compose(jacobi_poly1(n, 0.0, 1.0), Poly2::constant(1.0) - Poly2::x() * 2.0);
}

Poly2 predicted_case_c0_vertical(int n)
{
  return compose(jacobi_poly1(n, 0.0, 1.0), Poly2::constant(1.0) - Poly2::y() * 2.0);
}

Poly2 predicted_case_d1(int n)
{
  return compose(jacobi_poly1(n, 0.0, 1.0),
                 (Poly2::x() + Poly2::y()) * 2.0 - Poly2::constant(1.0));
}

Poly2 predicted_case_n2_dcm1(double c, TwoTriangleConfig::Family family)
{
  // 40 p_{2,2} + 24 (c-1) p_{2,1} + (3 c^2 - 6 c + 8) p_{2,0}, with
  // p_{n,k}(x,y) = P_{n,k}(y,x); the vertical family swaps the arguments.
  auto p2k = [&](int k) {
    Poly2 P = triangle_orthopoly_poly(2, k);
    // swap x and y
    Poly2 sw = P.compose_affine(Poly2::y(), Poly2::x());
    return family == TwoTriangleConfig::Horizontal ? sw : P;
  };
  return p2k(2) * 40.0 + p2k(1) * (24.0 * (c - 1.0)) +
         p2k(0) * (3.0 * c * c - 6.0 * c + 8.0);
}

}  // namespace qipp
