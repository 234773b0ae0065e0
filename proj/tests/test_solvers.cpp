#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qipp/orthopoly.hpp"
#include "qipp/solvers.hpp"
#include "qipp/studies.hpp"

#include <cmath>

using namespace qipp;

namespace {

double exact_u(const Eigen::Vector2d& x) { return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]); }
double load_f(const Eigen::Vector2d& x) { return 2.0 * M_PI * M_PI * exact_u(x); }

}  // namespace

TEST_CASE("mixed RT0: div sigma = -Pi0 f elementwise")
{
  const Mesh mesh = generate_structured(2, 4);
  const MixedSolution sol = solve_mixed_rt0(mesh, load_f);
  const DiscontinuousField pf = project_broken(mesh, load_f, 0);
  for (int t = 0; t < mesh.num_elements(); ++t)
    CHECK(sol.div_sigma(t) == doctest::Approx(-pf.block(t)[0]).epsilon(1e-9));
}

TEST_CASE("mixed RT0: normal trace is continuous across interior edges")
{
  const Mesh mesh = generate_structured(2, 3);
  const MixedSolution sol = solve_mixed_rt0(mesh, load_f);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (ed.boundary()) continue;
    const Eigen::Vector2d a = mesh.vertex(ed.v[0]), b = mesh.vertex(ed.v[1]);
    const Eigen::Vector2d t = (b - a).normalized();
    const Eigen::Vector2d n{t[1], -t[0]};
    for (double s : {0.25, 0.75}) {
      const Eigen::Vector2d x = a + s * (b - a);
      const double f1 = sol.sigma_at(ed.elems[0], x).dot(n);
      const double f2 = sol.sigma_at(ed.elems[1], x).dot(n);
      CHECK(f1 == doctest::Approx(f2).epsilon(1e-9));
    }
  }
}

TEST_CASE("mixed saddle matrix has exactly nelems negative eigenvalues")
{
  const Mesh mesh = generate_structured(2, 2);
  // rebuild the small dense system through the solver's public pieces:
  // solve once, then check inertia via the assembled operator action.
  // Direct route: assemble dense from scratch using the solution residual
  // identity is awkward; instead use a tiny mesh and finite differences on
  // the energy. Here we simply re-assemble by probing the linear map.
  const int ne = mesh.num_edges(), nt = mesh.num_elements();
  const int n = ne + nt;
  Eigen::MatrixXd K(n, n);
  // probe columns via solve_mixed_rt0 is not possible; assemble directly:
  // mass part via quadrature of RT0 basis, div part by the edge-length rule.
  // (kept in the test so the solver path stays independent)
  const QuadRule& rule = triangle_rule(2);
  K.setZero();
  for (int t = 0; t < nt; ++t) {
    const auto& el = mesh.element(t);
    const auto& ee = mesh.element_edges(t);
    const double area = mesh.element_measure(t);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d xh{rule.points(q, 0), rule.points(q, 1)};
      const Eigen::Vector2d x = mesh.vertex(el[0]) +
                                xh[0] * (mesh.vertex(el[1]) - mesh.vertex(el[0])) +
                                xh[1] * (mesh.vertex(el[2]) - mesh.vertex(el[0]));
      Eigen::Vector2d psi[3];
      for (int le = 0; le < 3; ++le) {
        const Edge& ed = mesh.edge(ee[le]);
        const Eigen::Vector2d tt = (mesh.vertex(ed.v[1]) - mesh.vertex(ed.v[0])).normalized();
        const Eigen::Vector2d nn{tt[1], -tt[0]};
        const Eigen::Vector2d mid =
            0.5 * (mesh.vertex(el[(le + 1) % 3]) + mesh.vertex(el[(le + 2) % 3]));
        const double sgn = (mid - mesh.vertex(el[le])).dot(nn) > 0 ? 1.0 : -1.0;
        const double len = (mesh.vertex(ed.v[1]) - mesh.vertex(ed.v[0])).norm();
        psi[le] = sgn * len / (2.0 * area) * (x - mesh.vertex(el[le]));
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          K(ee[i], ee[j]) += rule.weights[q] * 2.0 * area * psi[i].dot(psi[j]);
    }
    for (int le = 0; le < 3; ++le) {
      const Edge& ed = mesh.edge(ee[le]);
      const Eigen::Vector2d tt = (mesh.vertex(ed.v[1]) - mesh.vertex(ed.v[0])).normalized();
      const Eigen::Vector2d nn{tt[1], -tt[0]};
      const Eigen::Vector2d mid =
          0.5 * (mesh.vertex(el[(le + 1) % 3]) + mesh.vertex(el[(le + 2) % 3]));
      const double sgn = (mid - mesh.vertex(el[le])).dot(nn) > 0 ? 1.0 : -1.0;
      const double len = (mesh.vertex(ed.v[1]) - mesh.vertex(ed.v[0])).norm();
      K(ee[le], ne + t) += sgn * len;
      K(ne + t, ee[le]) += sgn * len;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  int neg = 0;
  for (int i = 0; i < n; ++i)
    if (es.eigenvalues()[i] < -1e-12) ++neg;
  CHECK(neg == nt);
}

TEST_CASE("stenberg: element means pinned, constants reproduced")
{
  const Mesh mesh = generate_structured(2, 4);
  const MixedSolution sol = solve_mixed_rt0(mesh, load_f);
  const DiscontinuousField post = stenberg_postprocess(mesh, sol);
  const DiscontinuousField mean = project_broken(post, 0);
  for (int t = 0; t < mesh.num_elements(); ++t)
    CHECK(mean.block(t)[0] == doctest::Approx(sol.u[t]).epsilon(1e-12));

  // zero flux and constant scalar reproduce the constant
  MixedSolution flat;
  flat.mesh = &mesh;
  flat.sigma = Eigen::VectorXd::Zero(mesh.num_edges());
  flat.u = Eigen::VectorXd::Constant(mesh.num_elements(), 3.25);
  const DiscontinuousField cpost = stenberg_postprocess(mesh, flat);
  CHECK(error_L2(cpost, [](const Eigen::Vector2d&) { return 3.25; }) < 1e-12);
}

TEST_CASE("P1 poisson: zero load, symmetry, and manufactured convergence")
{
  const Mesh mesh = generate_structured(2, 8);
  const ContinuousField zero =
      solve_poisson_p1(mesh, [](const Eigen::Vector2d&) { return 0.0; });
  CHECK(zero.values().cwiseAbs().maxCoeff() < 1e-14);

  std::vector<double> errs, hs;
  for (int n : {8, 16, 32}) {
    const Mesh m = generate_structured(2, n);
    const ContinuousField u = solve_poisson_p1(m, load_f);
    errs.push_back(error_L2(u, exact_u));
    hs.push_back(m.mesh_size());
  }
  const auto eoc = compute_eoc(errs, hs);
  CHECK(eoc.back().rate == doctest::Approx(2.0).epsilon(0.075));
}

TEST_CASE("HDG: boundary traces are zero by construction and tau is validated")
{
  const Mesh mesh = generate_structured(2, 4);
  CHECK_THROWS(solve_hdg(mesh, load_f, 1, 0.0));
  CHECK_THROWS(solve_hdg(mesh, load_f, 0, 1.0));
  // uhat only stores interior edges, so the boundary condition is structural;
  // check the vector length matches the interior count.
  const HDGSolution sol = solve_hdg(mesh, load_f, 1, 1.0);
  int interior = 0;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.edge_on_boundary(e)) ++interior;
  CHECK(sol.uhat.size() == interior * 2);
}

TEST_CASE("HDG: local conservation identity per element")
{
  const Mesh mesh = generate_structured(2, 4);
  for (int p : {1, 2}) {
    const HDGSolution sol = solve_hdg(mesh, load_f, p, 1.0);
    for (int t = 0; t < mesh.num_elements(); t += 7)
      CHECK(std::abs(sol.conservation_defect(t, load_f)) < 1e-9);
  }
}

TEST_CASE("HDG: flux continuity across interior edges")
{
  const Mesh mesh = generate_structured(2, 3);
  const int p = 2;
  const HDGSolution sol = solve_hdg(mesh, load_f, p, 1.0);
  const QuadRule& erule = interval_rule(2 * p + 2);
  int base = 0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (ed.boundary()) continue;
    const Eigen::Vector2d a = mesh.vertex(ed.v[0]), b = mesh.vertex(ed.v[1]);
    const Eigen::Vector2d tt = (b - a).normalized();
    const Eigen::Vector2d n{tt[1], -tt[0]};
    for (int k = 0; k <= p; ++k) {
      double jump = 0.0;
      for (int q = 0; q < erule.size(); ++q) {
        const double s = erule.points(q, 0);
        const Eigen::Vector2d x = a + s * (b - a);
        double uh = 0.0;
        for (int l = 0; l <= p; ++l)
          uh += sol.uhat[base + l] * jacobi_eval(l, 0.0, 0.0, 2.0 * s - 1.0);
        const double mu = jacobi_eval(k, 0.0, 0.0, 2.0 * s - 1.0);
        for (int side = 0; side < 2; ++side) {
          const int t = ed.elems[side];
          const double sign = side == 0 ? 1.0 : -1.0;  // opposite outward normals
          // outward normal of this element equals sign * n only up to the
          // rt0 sign; recompute via the midpoint test
          const auto& el = mesh.element(t);
          int le = -1;
          for (int l2 = 0; l2 < 3; ++l2)
            if (mesh.element_edges(t)[l2] == e) le = l2;
          const Eigen::Vector2d mid =
              0.5 * (mesh.vertex(el[(le + 1) % 3]) + mesh.vertex(el[(le + 2) % 3]));
          const double outward = (mid - mesh.vertex(el[le])).dot(n) > 0 ? 1.0 : -1.0;
          (void)sign;
          const double qn =
              (sol.qx.eval(t, x) * n[0] + sol.qy.eval(t, x) * n[1]) * outward +
              sol.tau * (sol.u.eval(t, x) - uh);
          jump += erule.weights[q] * mu * qn;
        }
      }
      CHECK(std::abs(jump) < 1e-9);
    }
    base += p + 1;
  }
}

TEST_CASE("HDG: condensed matrix is symmetric positive definite for tau > 0")
{
  for (int p : {1, 2}) {
    const Mesh mesh = generate_structured(2, 3);
    Eigen::SparseMatrix<double> S;
    const HDGSolution sol = solve_hdg(mesh, load_f, p, 1.0, &S);
    CHECK(sol.u.coeffs().allFinite());
    const Eigen::MatrixXd D(S);
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-11 * D.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (D + D.transpose()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("HDG supercloseness: || Pi0 u - u_T || at EOC p + 2")
{
  const int p = 1;
  std::vector<double> errs, hs;
  for (int n : {4, 8, 16}) {
    const Mesh mesh = generate_structured(2, n);
    const HDGSolution sol = solve_hdg(mesh, load_f, p, 1.0);
    const DiscontinuousField pi0u = project_broken(mesh, exact_u, 0);
    DiscontinuousField diff = pi0u;
    diff.coeffs() -= project_broken(sol.u, 0).coeffs();
    errs.push_back(norm_L2(diff));
    hs.push_back(mesh.mesh_size());
  }
  const auto eoc = compute_eoc(errs, hs);
  CHECK(eoc.back().rate == doctest::Approx(p + 2.0).epsilon(0.1));
}


TEST_CASE("bowtie vertex links are rejected")
{
  // two triangles joined only at one vertex
  std::vector<Eigen::Vector2d> verts{{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::vector<std::vector<int>> elems{{0, 1, 2}, {0, 3, 4}};
  CHECK_THROWS_WITH_AS(Mesh(2, verts, elems), doctest::Contains("vertex link"),
                       std::runtime_error);
}
