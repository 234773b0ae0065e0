#include "qipp/solvers.hpp"

#include "qipp/basis.hpp"
#include "qipp/orthopoly.hpp"
#include "qipp/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <stdexcept>

namespace qipp {

namespace {

// Global unit normal of an edge: the lo->hi tangent rotated by -90 degrees.
Eigen::Vector2d edge_normal(const Mesh& mesh, int e)
{
  const Edge& ed = mesh.edge(e);
  const Eigen::Vector2d t = (mesh.vertex(ed.v[1]) - mesh.vertex(ed.v[0])).normalized();
  return {t[1], -t[0]};
}

double edge_length(const Mesh& mesh, int e)
{
  const Edge& ed = mesh.edge(e);
  return (mesh.vertex(ed.v[1]) - mesh.vertex(ed.v[0])).norm();
}

// Sign of the global edge normal relative to the outward normal of t on its
// local edge le (local edge le is opposite local vertex le).
double rt0_sign(const Mesh& mesh, int t, int le)
{
  const auto& el = mesh.element(t);
  const int e = mesh.element_edges(t)[le];
  const Eigen::Vector2d a = mesh.vertex(el[(le + 1) % 3]);
  const Eigen::Vector2d b = mesh.vertex(el[(le + 2) % 3]);
  const Eigen::Vector2d mid = 0.5 * (a + b);
  const Eigen::Vector2d opp = mesh.vertex(el[le]);
  const Eigen::Vector2d outward = mid - opp;  // points away from the opposite vertex
  return outward.dot(edge_normal(mesh, e)) > 0.0 ? 1.0 : -1.0;
}

// RT0 basis function of local edge le evaluated at x.
Eigen::Vector2d rt0_basis(const Mesh& mesh, int t, int le, const Eigen::Vector2d& x)
{
  const auto& el = mesh.element(t);
  const int e = mesh.element_edges(t)[le];
  const double c = rt0_sign(mesh, t, le) * edge_length(mesh, e) / (2.0 * mesh.element_measure(t));
  return c * (x - mesh.vertex(el[le]));
}

}  // namespace

//------------------------------------------------------------------------
// Mixed RT0
//------------------------------------------------------------------------

MixedSolution solve_mixed_rt0(const Mesh& mesh, const ScalarFn& f)
{
  if (mesh.dim() != 2) throw std::invalid_argument("solve_mixed_rt0: 2D meshes only");
  const int ne = mesh.num_edges();
  const int nt = mesh.num_elements();

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ne + nt);
  const QuadRule& rule = triangle_rule(2);
  const QuadRule& frule = triangle_rule(error_exactness(0));

  for (int t = 0; t < nt; ++t) {
    const ElementMap map = element_map(mesh, t);
    const auto& ee = mesh.element_edges(t);
    Eigen::Matrix3d Aloc = Eigen::Matrix3d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d x = map.to_physical(rule.points.row(q).transpose());
      Eigen::Vector2d psi[3];
      for (int le = 0; le < 3; ++le) psi[le] = rt0_basis(mesh, t, le, x);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          Aloc(i, j) += rule.weights[q] * map.detJ * psi[i].dot(psi[j]);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) trips.emplace_back(ee[i], ee[j], Aloc(i, j));
      const double div_int = rt0_sign(mesh, t, i) * edge_length(mesh, ee[i]);
      trips.emplace_back(ee[i], ne + t, div_int);  // <u, div psi>
      trips.emplace_back(ne + t, ee[i], div_int);  // <div sigma, v>
    }
    double fint = 0.0;
    for (int q = 0; q < frule.size(); ++q)
      fint += frule.weights[q] * map.detJ * f(map.to_physical(frule.points.row(q).transpose()));
    rhs[ne + t] = -fint;
  }

  Eigen::SparseMatrix<double> K(ne + nt, ne + nt);
  K.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(K);
  if (lu.info() != Eigen::Success) throw std::runtime_error("solve_mixed_rt0: singular system");
  const Eigen::VectorXd sol = lu.solve(rhs);
  const double res = (K * sol - rhs).norm();
  if (res > 1e-10 * std::max(1.0, rhs.norm()))
    throw std::runtime_error("solve_mixed_rt0: residual too large");

  MixedSolution m;
  m.mesh = &mesh;
  m.sigma = sol.head(ne);
  m.u = sol.tail(nt);
  return m;
}

DiscontinuousField MixedSolution::scalar_field() const
{
  DiscontinuousField out(*mesh, 0);
  for (int t = 0; t < mesh->num_elements(); ++t) out.block(t)[0] = u[t];
  return out;
}

Eigen::Vector2d MixedSolution::sigma_at(int t, const Eigen::Vector2d& x) const
{
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  const auto& ee = mesh->element_edges(t);
  for (int le = 0; le < 3; ++le) v += sigma[ee[le]] * rt0_basis(*mesh, t, le, x);
  return v;
}

double MixedSolution::div_sigma(int t) const
{
  double d = 0.0;
  const auto& ee = mesh->element_edges(t);
  for (int le = 0; le < 3; ++le)
    d += sigma[ee[le]] * rt0_sign(*mesh, t, le) * edge_length(*mesh, ee[le]) /
         mesh->element_measure(t);
  return d;
}

DiscontinuousField stenberg_postprocess(const Mesh& mesh, const MixedSolution& mixed)
{
  if (mixed.mesh != &mesh) throw std::invalid_argument("stenberg_postprocess: mesh mismatch");
  DiscontinuousField out(mesh, 1);
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& el = mesh.element(t);
    const double area = mesh.element_measure(t);
    // Barycentric gradients: grad lambda_i = rot(edge opposite i) / (2|T|).
    Eigen::Matrix<double, 2, 3> grad;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d a = mesh.vertex(el[(i + 1) % 3]);
      const Eigen::Vector2d b = mesh.vertex(el[(i + 2) % 3]);
      grad.col(i) = Eigen::Vector2d{a[1] - b[1], b[0] - a[0]} / (2.0 * area);
    }
    // sigma is affine; its element integral is area * value at the centroid.
    const Eigen::Vector2d sint = area * mixed.sigma_at(t, mesh.element_centroid(t));
    Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
    Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) K(i, j) = area * grad.col(i).dot(grad.col(j));
      K(i, 3) = K(3, i) = area / 3.0;  // int lambda_i
      rhs[i] = grad.col(i).dot(sint);
    }
    rhs[3] = area * mixed.u[t];
    const Eigen::Vector4d sol = K.partialPivLu().solve(rhs);
    out.block(t) = sol.head(3);
  }
  return out;
}

//------------------------------------------------------------------------
// HDG
//------------------------------------------------------------------------

HDGSolution solve_hdg(const Mesh& mesh, const ScalarFn& f, int p, double tau,
                      Eigen::SparseMatrix<double>* condensed_out)
{
  if (mesh.dim() != 2) throw std::invalid_argument("solve_hdg: 2D meshes only");
  if (p < 1) throw std::invalid_argument("solve_hdg: p >= 1 required");
  if (tau <= 0.0) throw std::invalid_argument("solve_hdg: tau must be positive");

  const int m = poly_space_dim(2, p);
  const int em = p + 1;  // facet modes per edge
  const int nt = mesh.num_elements();

  // Interior-edge numbering for the condensed system.
  std::vector<int> edge_index(mesh.num_edges(), -1);
  int n_int = 0;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.edge_on_boundary(e)) edge_index[e] = n_int++;
  const int ndof = n_int * em;

  const QuadRule& vrule = triangle_rule(2 * p + 2);
  const QuadRule& erule = interval_rule(2 * p + 2);
  const QuadRule& frule = triangle_rule(error_exactness(p));

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::MatrixXd> Kinv_store(nt);
  std::vector<Eigen::MatrixXd> B_store(nt);
  std::vector<Eigen::VectorXd> F_store(nt);

  auto& cache = BasisCache::instance();
  for (int t = 0; t < nt; ++t) {
    const unsigned oc = element_orientation(mesh, t);
    const ReferenceBasis& ref = cache.basis(2, p, oc);
    const ElementMap map = element_map(mesh, t);
    const Eigen::MatrixXd M = map.detJ * cache.cross_mass(2, p, p, oc);

    // Gx(i,j) = int eta_j dx(eta_i), physical derivatives via the inverse map.
    const Eigen::MatrixXd& vals = ref.values_at(vrule);
    const Eigen::MatrixXd& dx = ref.dx_at(vrule);
    const Eigen::MatrixXd& dy = ref.dy_at(vrule);
    const Eigen::MatrixXd DX = map.Jinv(0, 0) * dx + map.Jinv(1, 0) * dy;
    const Eigen::MatrixXd DY = map.Jinv(0, 1) * dx + map.Jinv(1, 1) * dy;
    const Eigen::MatrixXd Gx = map.detJ * DX * vrule.weights.asDiagonal() * vals.transpose();
    const Eigen::MatrixXd Gy = map.detJ * DY * vrule.weights.asDiagonal() * vals.transpose();

    // Edge trace couplings per local edge: S (element x element traces),
    // Etr (element trace x facet mode), facet mass.
    Eigen::MatrixXd S[3], Etr[3];
    Eigen::Vector2d nrm[3];
    double sgn[3];
    for (int le = 0; le < 3; ++le) {
      const int e = mesh.element_edges(t)[le];
      const Edge& ed = mesh.edge(e);
      const double len = edge_length(mesh, e);
      nrm[le] = edge_normal(mesh, e);
      sgn[le] = rt0_sign(mesh, t, le);  // +1 when global normal is outward of t
      S[le] = Eigen::MatrixXd::Zero(m, m);
      Etr[le] = Eigen::MatrixXd::Zero(m, em);
      const Eigen::Vector2d xlo = mesh.vertex(ed.v[0]);
      const Eigen::Vector2d xhi = mesh.vertex(ed.v[1]);
      for (int q = 0; q < erule.size(); ++q) {
        const double s = erule.points(q, 0);
        const Eigen::Vector2d xhat = map.to_reference(xlo + s * (xhi - xlo));
        Eigen::VectorXd ev(m);
        for (int i = 0; i < m; ++i) ev[i] = ref.function(i).eval(xhat[0], xhat[1]);
        Eigen::VectorXd mu(em);
        for (int k = 0; k < em; ++k) mu[k] = jacobi_eval(k, 0.0, 0.0, 2.0 * s - 1.0);
        S[le] += (erule.weights[q] * len) * ev * ev.transpose();
        Etr[le] += (erule.weights[q] * len) * ev * mu.transpose();
      }
    }

    // Local system over X = (qx, qy, u); outward normal = sgn * global normal.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(3 * m, 3 * m);
    K.block(0, 0, m, m) = M;
    K.block(m, m, m, m) = M;
    K.block(0, 2 * m, m, m) = -Gx;
    K.block(m, 2 * m, m, m) = -Gy;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3 * m, 3 * em);
    for (int le = 0; le < 3; ++le) {
      const double nx = sgn[le] * nrm[le][0], ny = sgn[le] * nrm[le][1];
      K.block(2 * m, 0, m, m) += nx * S[le];
      K.block(2 * m, m, m, m) += ny * S[le];
      K.block(2 * m, 2 * m, m, m) += tau * S[le];
      B.block(0, le * em, m, em) = nx * Etr[le];
      B.block(m, le * em, m, em) = ny * Etr[le];
      B.block(2 * m, le * em, m, em) = -tau * Etr[le];
    }
    K.block(2 * m, 0, m, m) -= Gx;
    K.block(2 * m, m, m, m) -= Gy;

    Eigen::VectorXd F = Eigen::VectorXd::Zero(3 * m);
    const Eigen::MatrixXd& fvals = ref.values_at(frule);
    for (int q = 0; q < frule.size(); ++q)
      F.tail(m) += frule.weights[q] * map.detJ *
                   f(map.to_physical(frule.points.row(q).transpose())) * fvals.col(q);

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    const Eigen::MatrixXd KinvB = lu.solve(B);
    const Eigen::VectorXd KinvF = lu.solve(F);
    Kinv_store[t] = KinvB;
    B_store[t] = B;
    F_store[t] = KinvF;

    // Flux continuity rows: for each interior local edge,
    // G X + H Lambda with G = [nx Etr^T, ny Etr^T, tau Etr^T], H = -tau M_e.
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3 * em, 3 * m);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3 * em, 3 * em);
    for (int le = 0; le < 3; ++le) {
      const double nx = sgn[le] * nrm[le][0], ny = sgn[le] * nrm[le][1];
      G.block(le * em, 0, em, m) = nx * Etr[le].transpose();
      G.block(le * em, m, em, m) = ny * Etr[le].transpose();
      G.block(le * em, 2 * m, em, m) = tau * Etr[le].transpose();
      const double len = edge_length(mesh, mesh.element_edges(t)[le]);
      for (int k = 0; k < em; ++k) H(le * em + k, le * em + k) = -tau * len / (2.0 * k + 1.0);
    }
    // Negated so the assembled condensed system is symmetric positive
    // definite (the raw flux-balance rows give its negative).
    const Eigen::MatrixXd Scond = G * KinvB - H;
    const Eigen::VectorXd rcond = G * KinvF;

    // Scatter into the global condensed system (boundary facets are zero).
    std::array<int, 3> gbase;
    for (int le = 0; le < 3; ++le) {
      const int e = mesh.element_edges(t)[le];
      gbase[le] = edge_index[e] < 0 ? -1 : edge_index[e] * em;
    }
    for (int le = 0; le < 3; ++le) {
      if (gbase[le] < 0) continue;
      for (int k = 0; k < em; ++k) {
        rhs[gbase[le] + k] += rcond[le * em + k];
        for (int lf = 0; lf < 3; ++lf) {
          if (gbase[lf] < 0) continue;
          for (int l = 0; l < em; ++l)
            trips.emplace_back(gbase[le] + k, gbase[lf] + l, Scond(le * em + k, lf * em + l));
        }
      }
    }
  }

  Eigen::SparseMatrix<double> Sg(ndof, ndof);
  Sg.setFromTriplets(trips.begin(), trips.end());
  if (condensed_out) *condensed_out = Sg;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> slu(Sg);
  if (slu.info() != Eigen::Success) throw std::runtime_error("solve_hdg: condensed solve failed");
  const Eigen::VectorXd lambda = slu.solve(rhs);

  HDGSolution sol;
  sol.mesh = &mesh;
  sol.p = p;
  sol.tau = tau;
  sol.u = DiscontinuousField(mesh, p);
  sol.qx = DiscontinuousField(mesh, p);
  sol.qy = DiscontinuousField(mesh, p);
  sol.uhat = lambda;
  for (int t = 0; t < nt; ++t) {
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(3 * em);
    for (int le = 0; le < 3; ++le) {
      const int e = mesh.element_edges(t)[le];
      if (edge_index[e] >= 0) lam.segment(le * em, em) = lambda.segment(edge_index[e] * em, em);
    }
    const Eigen::VectorXd X = F_store[t] - Kinv_store[t] * lam;
    sol.qx.block(t) = X.head(m);
    sol.qy.block(t) = X.segment(m, m);
    sol.u.block(t) = X.tail(m);
  }
  return sol;
}

double HDGSolution::conservation_defect(int t, const ScalarFn& f) const
{
  const int em = p + 1;
  const QuadRule& erule = interval_rule(2 * p + 2);
  const ElementMap map = element_map(*mesh, t);
  double flux = 0.0;
  for (int le = 0; le < 3; ++le) {
    const int e = mesh->element_edges(t)[le];
    const Edge& ed = mesh->edge(e);
    const double len = edge_length(*mesh, e);
    const Eigen::Vector2d n = rt0_sign(*mesh, t, le) * edge_normal(*mesh, e);
    const Eigen::Vector2d xlo = mesh->vertex(ed.v[0]);
    const Eigen::Vector2d xhi = mesh->vertex(ed.v[1]);
    // index of this edge in the interior numbering
    int base = -1, cnt = 0;
    for (int ee2 = 0; ee2 < e; ++ee2)
      if (!mesh->edge_on_boundary(ee2)) ++cnt;
    if (!mesh->edge_on_boundary(e)) base = cnt * em;
    for (int q = 0; q < erule.size(); ++q) {
      const double s = erule.points(q, 0);
      const Eigen::Vector2d x = xlo + s * (xhi - xlo);
      const double qn = qx.eval(t, x) * n[0] + qy.eval(t, x) * n[1];
      double uh = 0.0;
      if (base >= 0)
        for (int k = 0; k < em; ++k)
          uh += uhat[base + k] * jacobi_eval(k, 0.0, 0.0, 2.0 * s - 1.0);
      flux += erule.weights[q] * len * (qn + tau * (u.eval(t, x) - uh));
    }
  }
  const QuadRule& frule = triangle_rule(error_exactness(p));
  double fint = 0.0;
  for (int q = 0; q < frule.size(); ++q)
    fint += frule.weights[q] * map.detJ * f(map.to_physical(frule.points.row(q).transpose()));
  return flux - fint;
}

//------------------------------------------------------------------------
// Conforming P1 Poisson
//------------------------------------------------------------------------

namespace {

ContinuousField poisson_p1_impl(const Mesh& mesh, const std::function<double(int, const Eigen::Vector2d&)>& load,
                                int exactness, Eigen::VectorXd* load_vec_out)
{
  if (mesh.dim() != 2) throw std::invalid_argument("solve_poisson_p1: 2D meshes only");
  const int nv = mesh.num_vertices();
  std::vector<int> idx(nv, -1);
  int n = 0;
  for (int v : mesh.interior_vertices()) idx[v] = n++;

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  const QuadRule& rule = triangle_rule(exactness);
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& el = mesh.element(t);
    const double area = mesh.element_measure(t);
    Eigen::Matrix<double, 2, 3> grad;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d a = mesh.vertex(el[(i + 1) % 3]);
      const Eigen::Vector2d bb = mesh.vertex(el[(i + 2) % 3]);
      grad.col(i) = Eigen::Vector2d{a[1] - bb[1], bb[0] - a[0]} / (2.0 * area);
    }
    const ElementMap map = element_map(mesh, t);
    for (int i = 0; i < 3; ++i) {
      if (idx[el[i]] < 0) continue;
      for (int j = 0; j < 3; ++j)
        if (idx[el[j]] >= 0)
          trips.emplace_back(idx[el[i]], idx[el[j]], area * grad.col(i).dot(grad.col(j)));
      double li = 0.0;
      for (int q = 0; q < rule.size(); ++q) {
        const double lam =
            i == 0 ? 1.0 - rule.points(q, 0) - rule.points(q, 1) : rule.points(q, i - 1);
        li += rule.weights[q] * map.detJ * lam *
              load(t, map.to_physical(rule.points.row(q).transpose()));
      }
      b[idx[el[i]]] += li;
    }
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(K);
  if (chol.info() != Eigen::Success) throw std::runtime_error("solve_poisson_p1: factorization failed");
  const Eigen::VectorXd w = chol.solve(b);
  if ((K * w - b).norm() > 1e-10 * std::max(1.0, b.norm()))
    throw std::runtime_error("solve_poisson_p1: residual too large");

  ContinuousField out(mesh, 1, true);
  for (int v = 0; v < nv; ++v)
    if (idx[v] >= 0) out.values()[v] = w[idx[v]];
  if (load_vec_out) {
    // <load, w_h> for the discrete negative-norm surrogate
    load_vec_out->resize(1);
    (*load_vec_out)[0] = b.dot(w);
  }
  return out;
}

}  // namespace

ContinuousField solve_poisson_p1(const Mesh& mesh, const ScalarFn& load)
{
  return poisson_p1_impl(
      mesh, [&](int, const Eigen::Vector2d& x) { return load(x); }, error_exactness(1), nullptr);
}

ContinuousField solve_poisson_p1(const Mesh& mesh, const DiscontinuousField& load)
{
  if (&load.mesh() != &mesh) throw std::invalid_argument("solve_poisson_p1: mesh mismatch");
  return poisson_p1_impl(
      mesh, [&](int t, const Eigen::Vector2d& x) { return load.eval(t, x); },
      assembly_exactness(load.degree()), nullptr);
}

double discrete_hminus1_norm(const Mesh& riesz_mesh, const ScalarFn& g)
{
  Eigen::VectorXd dual;
  poisson_p1_impl(
      riesz_mesh, [&](int, const Eigen::Vector2d& x) { return g(x); }, error_exactness(1) + 4,
      &dual);
  return std::sqrt(std::max(dual[0], 0.0));
}

}  // namespace qipp
