#include "qipp/negproj.hpp"

#include <map>
#include <stdexcept>

namespace qipp {

BubbleDualBasis dual_bubble_basis(const Mesh& mesh, int p)
{
  BubbleDualBasis duals;
  duals.mesh = &mesh;
  duals.p = p;
  duals.coeffs.resize(mesh.num_elements());
  auto& cache = BasisCache::instance();
  std::map<unsigned, Eigen::MatrixXd> ginv;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const unsigned oc = element_orientation(mesh, t);
    auto it = ginv.find(oc);
    if (it == ginv.end()) {
      const Eigen::MatrixXd& G = cache.bubble_gram(mesh.dim(), p, oc);
      it = ginv.emplace(oc, G.inverse()).first;
    }
    duals.coeffs[t] = it->second / element_map(mesh, t).detJ;
  }
  return duals;
}

double BubbleDualBasis::eval(int t, int bullet, const Eigen::Vector2d& x) const
{
  const unsigned oc = element_orientation(*mesh, t);
  const ReferenceBasis& ref = BasisCache::instance().basis(mesh->dim(), p, oc);
  const Eigen::Vector2d xh = element_map(*mesh, t).to_reference(x);
  const double bubble = mesh->dim() == 1 ? (1.0 - xh[0]) * xh[0]
                                         : (1.0 - xh[0] - xh[1]) * xh[0] * xh[1];
  double v = 0.0;
  for (int g = 0; g < ref.size(); ++g)
    v += coeffs[t](g, bullet) * ref.function(g).eval(xh[0], xh[1]) * bubble;
  return v;
}

namespace {

// Per-orientation block of B^p on degree-s inputs (detJ-free):
//   Conv * Ghat^{-1} * Mcross(p, s)
// with Conv expressing eta_gamma * bubble in the degree-(p+dim+1) basis.
// SPD solve with one refinement step; the bubble Grams are moderately
// conditioned and the result feeds long cancellation chains.
Eigen::MatrixXd refined_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
{
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  Eigen::MatrixXd X = ldlt.solve(B);
  X += ldlt.solve(B - A * X);
  return X;
}

Eigen::MatrixXd bp_block(int dim, int p, int s, unsigned oc)
{
  auto& cache = BasisCache::instance();
  const int pb = p + dim + 1;
  const Eigen::MatrixXd& Mpb = cache.cross_mass(dim, pb, pb, oc);
  const Eigen::MatrixXd& R = cache.bubble_cross(dim, pb, p, oc);  // pb x p sizes
  const Eigen::MatrixXd conv = refined_solve(Mpb, R);
  const Eigen::MatrixXd& G = cache.bubble_gram(dim, p, oc);
  const Eigen::MatrixXd& Mps = cache.cross_mass(dim, p, s, oc);
  return conv * refined_solve(G, Mps);
}

// Dual pairing block: phi (degree s) -> coefficients <phi, nu_bullet> over
// the degree-p basis: Ghat^{-1} R(s,p)^T.
Eigen::MatrixXd dual_pairing_block(int dim, int p, int s, unsigned oc)
{
  auto& cache = BasisCache::instance();
  const Eigen::MatrixXd& R = cache.bubble_cross(dim, s, p, oc);  // s x p
  const Eigen::MatrixXd& G = cache.bubble_gram(dim, p, oc);
  return refined_solve(G, R.transpose());
}

Eigen::SparseMatrix<double> block_diagonal(const Mesh& mesh,
                                           const std::function<const Eigen::MatrixXd&(unsigned)>& block)
{
  std::vector<Eigen::Triplet<double>> trips;
  int rows = 0, cols = 0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const Eigen::MatrixXd& b = block(element_orientation(mesh, t));
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j)
        trips.emplace_back(rows + i, cols + j, b(i, j));
    rows += static_cast<int>(b.rows());
    cols += static_cast<int>(b.cols());
  }
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace

Eigen::SparseMatrix<double> build_Bp(const Mesh& mesh, int p, int source_degree)
{
  std::map<unsigned, Eigen::MatrixXd> blocks;
  return block_diagonal(mesh, [&](unsigned oc) -> const Eigen::MatrixXd& {
    auto it = blocks.find(oc);
    if (it == blocks.end()) it = blocks.emplace(oc, bp_block(mesh.dim(), p, source_degree, oc)).first;
    return it->second;
  });
}

DiscontinuousField apply_Bp(const BubbleDualBasis& duals, const DiscontinuousField& v)
{
  const Mesh& mesh = *duals.mesh;
  const int pb = duals.bubble_poly_degree();
  DiscontinuousField out(mesh, pb);
  std::map<unsigned, Eigen::MatrixXd> blocks;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const unsigned oc = element_orientation(mesh, t);
    auto it = blocks.find(oc);
    if (it == blocks.end())
      it = blocks.emplace(oc, bp_block(mesh.dim(), duals.p, v.degree(), oc)).first;
    out.block(t) = it->second * v.block(t);
  }
  return out;
}

Eigen::SparseMatrix<double> build_negative_projection(const Mesh& mesh, int p,
                                                      ProjectionVariant variant, int source_degree)
{
  const OperatorKind kind =
      variant == ProjectionVariant::ZeroBoundary ? OperatorKind::J0 : OperatorKind::J;
  const QuasiInterpolator J = build_interpolator(mesh, p, kind);

  const int bs_p = poly_space_dim(mesh.dim(), p);
  const Eigen::Index np = static_cast<Eigen::Index>(bs_p) * mesh.num_elements();

  // Columns of W are the weight functions as broken P^p fields.
  std::vector<Eigen::Triplet<double>> wtrips;
  for (std::size_t wi = 0; wi < J.weights().size(); ++wi) {
    const WeightFunction& w = J.weights()[wi];
    int col = -1;
    switch (w.dof.kind) {
      case EntityKind::Vertex: col = J.target_dofs().vertex_dof(w.dof.id); break;
      case EntityKind::Edge: col = J.target_dofs().edge_dof(w.dof.id, w.dof.mode); break;
      case EntityKind::Element: col = J.target_dofs().element_dof(w.dof.id, w.dof.mode); break;
    }
    for (int pos = 0; pos < w.support.size(); ++pos) {
      const int t = w.support.elements[pos];
      const auto b = w.block(mesh, pos);
      for (int i = 0; i < bs_p; ++i) wtrips.emplace_back(t * bs_p + i, col, b[i]);
    }
  }
  Eigen::SparseMatrix<double> W(np, J.target_dofs().total());
  W.setFromTriplets(wtrips.begin(), wtrips.end());

  // J' phi = sum_star <phi, eta_star> phi_star: pair with the conforming
  // basis functions (boundary columns of W are empty for the J0 variant).
  const Eigen::SparseMatrix<double> Hs = conforming_pairing_matrix(J.target_dofs(), source_degree);
  const Eigen::SparseMatrix<double> Hp = conforming_pairing_matrix(J.target_dofs(), p);

  std::map<unsigned, Eigen::MatrixXd> dblocks;
  const Eigen::SparseMatrix<double> BD =
      block_diagonal(mesh, [&](unsigned oc) -> const Eigen::MatrixXd& {
        auto it = dblocks.find(oc);
        if (it == dblocks.end())
          it = dblocks.emplace(oc, dual_pairing_block(mesh.dim(), p, source_degree, oc)).first;
        return it->second;
      });

  // Q = W Hs + (I - W Hp) BD
  Eigen::SparseMatrix<double> I(np, np);
  I.setIdentity();
  const Eigen::SparseMatrix<double> WHp = W * Hp;
  return Eigen::SparseMatrix<double>(W * Hs + (I - WHp) * BD);
}

DiscontinuousField apply_projection(const Eigen::SparseMatrix<double>& Q,
                                    const DiscontinuousField& phi, int p)
{
  if (Q.cols() != phi.coeffs().size())
    throw std::invalid_argument("apply_projection: size mismatch");
  DiscontinuousField out(phi.mesh(), p);
  out.coeffs() = Q * phi.coeffs();
  return out;
}

}  // namespace qipp
