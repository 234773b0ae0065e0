#include "qipp/weights.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qipp {

namespace {

// Local index of `dof` within the anchor element's basis, matching the
// oriented reference ordering (vertices, edge modes per local edge, interior
// modes).
int local_index_of_dof(const Mesh& mesh, int anchor, const DofKey& dof, int degree)
{
  const ReferenceBasis& ref =
      BasisCache::instance().basis(mesh.dim(), degree, element_orientation(mesh, anchor));
  const auto& el = mesh.element(anchor);
  for (int i = 0; i < ref.size(); ++i) {
    const DofDesc& d = ref.dof(i);
    switch (dof.kind) {
      case EntityKind::Vertex:
        if (d.kind == DofDesc::VertexFn && el[d.entity] == dof.id) return i;
        break;
      case EntityKind::Edge:
        if (d.kind == DofDesc::EdgeFn && mesh.element_edges(anchor)[d.entity] == dof.id &&
            d.index == dof.mode)
          return i;
        break;
      case EntityKind::Element:
        if (d.kind == DofDesc::InteriorFn && anchor == dof.id && d.index == dof.mode) return i;
        break;
    }
  }
  throw std::invalid_argument("solve_weight: dof is not a local dof of the anchor element");
}

}  // namespace

Eigen::MatrixXd gram_matrix(const Mesh& mesh, const PatchRef& patch, int trial_degree,
                            int test_degree)
{
  if (patch.elements.empty()) throw std::invalid_argument("gram_matrix: empty patch");
  const Frame frame = patch_frame(mesh, patch);
  const auto exps = monomial_exponents(mesh.dim(), trial_degree);
  const int ncols = static_cast<int>(exps.size());
  const int bs = poly_space_dim(mesh.dim(), test_degree);
  Eigen::MatrixXd B(bs * patch.size(), ncols);

  const QuadRule& rule = reference_rule(mesh.dim(), trial_degree + test_degree);
  for (int pos = 0; pos < patch.size(); ++pos) {
    const int t = patch.elements[pos];
    const ElementMap map = element_map(mesh, t);
    const ReferenceBasis& ref =
        BasisCache::instance().basis(mesh.dim(), test_degree, element_orientation(mesh, t));
    const Eigen::MatrixXd& vals = ref.values_at(rule);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(bs, ncols);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d u = frame.to_local(map.to_physical(rule.points.row(q).transpose()));
      for (int c = 0; c < ncols; ++c) {
        const double mono = std::pow(u[0], exps[c][0]) * std::pow(u[1], exps[c][1]);
        local.col(c) += rule.weights[q] * map.detJ * mono * vals.col(q);
      }
    }
    B.middleRows(pos * bs, bs) = local;
  }
  return B;
}

int kernel_dimension(const Eigen::MatrixXd& B, double tol)
{
  const int n = static_cast<int>(B.cols());
  const double smax = B.cwiseAbs().maxCoeff();
  if (smax == 0.0) return n;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > tol * s[0]) ++rank;
  return n - rank;
}

PatchRef grow_vicinity(const Mesh& mesh, int z, int p, int start_order)
{
  if (mesh.vertex_on_boundary(z)) throw std::invalid_argument("grow_vicinity: z must be interior");
  PatchRef patch = element_patch(mesh, SeedKind::Vertex, z, start_order);
  for (;;) {
    const Eigen::MatrixXd B = gram_matrix(mesh, patch, p + 1, 0);
    if (kernel_dimension(B) == 0) return patch;
    if (patch.size() == mesh.num_elements())
      throw std::runtime_error(
          "grow_vicinity: vicinity growth exhausted the mesh; the global P^0 Gram against "
          "P^{p+1} is rank deficient");
    patch = grow_patch(mesh, patch);
  }
}

double WeightFunction::eval(const Mesh& mesh, const Eigen::Vector2d& x, int element) const
{
  const auto it = std::lower_bound(support.elements.begin(), support.elements.end(), element);
  if (it == support.elements.end() || *it != element) return 0.0;
  const int pos = static_cast<int>(it - support.elements.begin());
  const ReferenceBasis& ref =
      BasisCache::instance().basis(mesh.dim(), degree, element_orientation(mesh, element));
  const Eigen::Vector2d xhat = element_map(mesh, element).to_reference(x);
  double v = 0.0;
  const auto b = block(mesh, pos);
  for (int i = 0; i < ref.size(); ++i) v += b[i] * ref.function(i).eval(xhat[0], xhat[1]);
  return v;
}

double WeightFunction::sup_norm_estimate(const Mesh& mesh) const
{
  const QuadRule& rule = reference_rule(mesh.dim(), 2 * degree + 6);
  double sup = 0.0;
  for (int pos = 0; pos < support.size(); ++pos) {
    const int t = support.elements[pos];
    const ReferenceBasis& ref =
        BasisCache::instance().basis(mesh.dim(), degree, element_orientation(mesh, t));
    const Eigen::MatrixXd& vals = ref.values_at(rule);
    const auto b = block(mesh, pos);
    for (int q = 0; q < rule.size(); ++q) sup = std::max(sup, std::abs(b.dot(vals.col(q))));
    // include vertices where polynomials attain extrema in the affine case
    for (int v : mesh.element(t)) {
      const Eigen::Vector2d xhat = element_map(mesh, t).to_reference(mesh.vertex(v));
      double val = 0.0;
      for (int i = 0; i < ref.size(); ++i) val += b[i] * ref.function(i).eval(xhat[0], xhat[1]);
      sup = std::max(sup, std::abs(val));
    }
  }
  return sup;
}

WeightFunction solve_weight(const Mesh& mesh, const DofKey& dof, const PatchRef& patch,
                            int anchor_element, int weight_degree, int target_degree)
{
  if (!patch.contains(anchor_element))
    throw std::invalid_argument("solve_weight: anchor element outside patch");
  const int d = mesh.dim();
  const int bs = poly_space_dim(d, weight_degree);
  const int nb = bs * patch.size();
  const Frame frame = patch_frame(mesh, patch);

  // Extended shape functions of the anchor element over the patch domain.
  const std::vector<LocalPoly> constraints =
      element_basis_polys(mesh, anchor_element, target_degree, frame);
  const int nc = static_cast<int>(constraints.size());
  const int star = local_index_of_dof(mesh, anchor_element, dof, target_degree);

  // Constraint coefficients over patch-frame monomials (rows = constraints).
  const auto exps = monomial_exponents(d, target_degree);
  const int nm = static_cast<int>(exps.size());
  Eigen::MatrixXd C(nc, nm);
  for (int c = 0; c < nc; ++c)
    for (int m = 0; m < nm; ++m) C(c, m) = constraints[c].poly.coef(exps[m][0], exps[m][1]);

  // Broken mass (block diagonal) and constraint matrix.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nc, nb);
  const QuadRule& rule = reference_rule(d, assembly_exactness(target_degree - 1));
  const int nq = rule.size();
  Eigen::MatrixXd monos(nm, nq);
  for (int pos = 0; pos < patch.size(); ++pos) {
    const int t = patch.elements[pos];
    const unsigned oc = element_orientation(mesh, t);
    const ElementMap map = element_map(mesh, t);
    M.block(pos * bs, pos * bs, bs, bs) =
        map.detJ * BasisCache::instance().cross_mass(d, weight_degree, weight_degree, oc);
    const ReferenceBasis& ref = BasisCache::instance().basis(d, weight_degree, oc);
    const Eigen::MatrixXd& vals = ref.values_at(rule);
    for (int q = 0; q < nq; ++q) {
      const Eigen::Vector2d u = frame.to_local(map.to_physical(rule.points.row(q).transpose()));
      double pu[16], pv[16];
      pu[0] = pv[0] = 1.0;
      for (int k = 1; k <= target_degree; ++k) {
        pu[k] = pu[k - 1] * u[0];
        pv[k] = pv[k - 1] * u[1];
      }
      for (int m = 0; m < nm; ++m) monos(m, q) = pu[exps[m][0]] * pv[exps[m][1]];
    }
    A.middleCols(pos * bs, bs) +=
        map.detJ * (C * monos) * rule.weights.asDiagonal() * vals.transpose();
  }

  // Measure-normalized saddle matrix keeps the factorization well scaled
  // across refinement levels.
  const double s = patch_measure(mesh, patch);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nb + nc, nb + nc);
  K.topLeftCorner(nb, nb) = M / s;
  K.topRightCorner(nb, nc) = A.transpose() / s;
  K.bottomLeftCorner(nc, nb) = A / s;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb + nc);
  rhs[nb + star] = 1.0;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd sol = lu.solve(rhs);
  sol += lu.solve(rhs - K * sol);  // one refinement step
  WeightFunction w;
  w.dof = dof;
  w.support = patch;
  w.degree = weight_degree;
  w.target_degree = target_degree;
  w.anchor_element = anchor_element;
  w.coeffs = sol.head(nb) / s;

  Eigen::VectorXd e = Eigen::VectorXd::Zero(nc);
  e[star] = 1.0;
  const double residual = (A * w.coeffs - e).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-10)
    throw std::runtime_error(
        "solve_weight: singular saddle system (constraint residual " + std::to_string(residual) +
        "); the patch Gram has a nontrivial kernel - grow the vicinity");
  return w;
}

double biorthogonality_defect(const Mesh& mesh, const WeightFunction& w, int extra_exactness)
{
  const Frame frame = patch_frame(mesh, w.support);
  const std::vector<LocalPoly> constraints =
      element_basis_polys(mesh, w.anchor_element, w.target_degree, frame);
  const int star = local_index_of_dof(mesh, w.anchor_element, w.dof, w.target_degree);
  const QuadRule& rule =
      reference_rule(mesh.dim(), assembly_exactness(w.target_degree - 1) + extra_exactness);

  Eigen::VectorXd ip = Eigen::VectorXd::Zero(constraints.size());
  for (int pos = 0; pos < w.support.size(); ++pos) {
    const int t = w.support.elements[pos];
    const ElementMap map = element_map(mesh, t);
    const ReferenceBasis& ref =
        BasisCache::instance().basis(mesh.dim(), w.degree, element_orientation(mesh, t));
    const Eigen::MatrixXd& vals = ref.values_at(rule);
    const auto b = w.block(mesh, pos);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d x = map.to_physical(rule.points.row(q).transpose());
      const double phi = b.dot(vals.col(q));
      for (Eigen::Index c = 0; c < ip.size(); ++c)
        ip[c] += rule.weights[q] * map.detJ * phi * constraints[c].eval(x);
    }
  }
  ip[star] -= 1.0;
  return ip.cwiseAbs().maxCoeff();
}

//------------------------------------------------------------------------
// Lowest-order barycentric construction
//------------------------------------------------------------------------

LowestOrderWeights lowest_order_vertex_weights(const Mesh& mesh, int z)
{
  if (mesh.vertex_on_boundary(z))
    throw std::invalid_argument("lowest_order_vertex_weights: z must be interior");
  PatchRef patch = element_patch(mesh, SeedKind::Vertex, z, 1);
  const int m = patch.size();
  const int nr = mesh.dim() + 1;  // barycenter rows + sum row
  Eigen::MatrixXd E(nr, m);
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector2d s = mesh.element_centroid(patch.elements[i]);
    E(0, i) = s[0];
    if (mesh.dim() == 2) E(1, i) = s[1];
    E(nr - 1, i) = 1.0;
  }
  Eigen::VectorXd f(nr);
  f[0] = mesh.vertex(z)[0];
  if (mesh.dim() == 2) f[1] = mesh.vertex(z)[1];
  f[nr - 1] = 1.0;

  // Minimum-norm feasible point with alpha >= 0: primal active set on the
  // equality-constrained QP.
  std::vector<bool> active(m, false);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
  const double tol = 1e-12;
  for (int iter = 0; iter < 4 * m + 8; ++iter) {
    std::vector<int> free;
    for (int i = 0; i < m; ++i)
      if (!active[i]) free.push_back(i);
    if (free.empty()) throw std::runtime_error("lowest_order_vertex_weights: infeasible");
    Eigen::MatrixXd Ef(nr, free.size());
    for (std::size_t c = 0; c < free.size(); ++c) Ef.col(static_cast<Eigen::Index>(c)) = E.col(free[c]);
    const Eigen::VectorXd af = Ef.completeOrthogonalDecomposition().solve(f);
    if ((Ef * af - f).norm() > 1e-10)
      throw std::runtime_error("lowest_order_vertex_weights: infeasible active set");
    int worst = -1;
    double worst_val = -tol;
    for (Eigen::Index c = 0; c < af.size(); ++c)
      if (af[c] < worst_val) {
        worst_val = af[c];
        worst = free[static_cast<std::size_t>(c)];
      }
    if (worst >= 0) {
      active[worst] = true;
      continue;
    }
    alpha.setZero();
    for (std::size_t c = 0; c < free.size(); ++c)
      alpha[free[c]] = std::max(af[static_cast<Eigen::Index>(c)], 0.0);
    // Optimality of the active bounds: multipliers -(E^T nu)_i must be >= 0.
    const Eigen::VectorXd nu = Ef.transpose().colPivHouseholderQr().solve(af);
    bool released = false;
    for (int i = 0; i < m; ++i)
      if (active[i] && -(E.col(i).dot(nu)) < -1e-10) {
        active[i] = false;
        released = true;
        break;
      }
    if (!released) return {std::move(patch), std::move(alpha)};
  }
  throw std::runtime_error("lowest_order_vertex_weights: active-set iteration did not converge");
}

WeightFunction lowest_order_weight_function(const Mesh& mesh, int z)
{
  LowestOrderWeights lw = lowest_order_vertex_weights(mesh, z);
  WeightFunction w;
  w.dof = {EntityKind::Vertex, z, 0};
  w.degree = 0;
  w.target_degree = 1;
  w.anchor_element = *std::min_element(lw.patch.elements.begin(), lw.patch.elements.end());
  w.coeffs.resize(lw.patch.size());
  for (int i = 0; i < lw.patch.size(); ++i)
    w.coeffs[i] = lw.alpha[i] / mesh.element_measure(lw.patch.elements[i]);
  w.support = std::move(lw.patch);
  return w;
}

}  // namespace qipp
