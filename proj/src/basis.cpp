#include "qipp/basis.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace qipp {

namespace {

// Reference barycentric coordinates as polynomials.
std::vector<Poly2> reference_barycentrics(int dim)
{
  if (dim == 1)
    return {Poly2::constant(1.0) - Poly2::x(), Poly2::x()};
  return {Poly2::constant(1.0) - Poly2::x() - Poly2::y(), Poly2::x(), Poly2::y()};
}

}  // namespace

ReferenceBasis::ReferenceBasis(int dim, int p, unsigned orient_code) : dim_(dim), p_(p)
{
  if (p < 0) throw std::invalid_argument("ReferenceBasis: negative degree");
  const auto lam = reference_barycentrics(dim);

  if (p == 0) {
    funcs_.push_back(Poly2::constant(1.0));
    dofs_.push_back({DofDesc::InteriorFn, 0, 1});
    return;
  }

  for (int v = 0; v < dim + 1; ++v) {
    funcs_.push_back(lam[v]);
    dofs_.push_back({DofDesc::VertexFn, v, 0});
  }

  if (dim == 2) {
    const int N = edge_mode_count(dim, p);
    for (int e = 0; e < 3; ++e) {
      int a = (e + 1) % 3, b = (e + 2) % 3;
      if (orient_code & (1u << e)) std::swap(a, b);
      for (int j = 1; j <= N; ++j) {
        const Poly1 kernel = jacobi_poly1(j - 1, 1.0, 1.0);
        funcs_.push_back(lam[a] * lam[b] * compose(kernel, lam[b] - lam[a]));
        dofs_.push_back({DofDesc::EdgeFn, e, j});
      }
    }
    const Poly2 bubble = lam[0] * lam[1] * lam[2];
    int k = 1;
    for (const auto& [ea, eb] : monomial_exponents(2, p - 3)) {
      Poly2 m = Poly2::constant(1.0);
      for (int i = 0; i < ea; ++i) m = m * lam[1];
      for (int i = 0; i < eb; ++i) m = m * lam[2];
      funcs_.push_back(bubble * m);
      dofs_.push_back({DofDesc::InteriorFn, 0, k++});
    }
  } else {
    for (int j = 1; j <= interior_mode_count(1, p); ++j) {
      const Poly1 kernel = jacobi_poly1(j - 1, 1.0, 1.0);
      funcs_.push_back(lam[0] * lam[1] * compose(kernel, lam[1] - lam[0]));
      dofs_.push_back({DofDesc::InteriorFn, 0, j});
    }
  }

  if (static_cast<int>(funcs_.size()) != poly_space_dim(dim, p))
    throw std::logic_error("ReferenceBasis: wrong dimension count");
}

const Eigen::MatrixXd& ReferenceBasis::values_at(const QuadRule& rule) const
{
  const std::size_t slot = static_cast<std::size_t>(rule.exactness);
  if (value_cache_.size() <= slot) value_cache_.resize(slot + 1);
  auto& entry = value_cache_[slot];
  if (entry[0].size() == 0) {
    const int n = size(), q = rule.size();
    entry[0].resize(n, q);
    entry[1].resize(n, q);
    entry[2].resize(n, q);
    for (int i = 0; i < n; ++i) {
      const Poly2 gx = funcs_[i].dx(), gy = funcs_[i].dy();
      for (int k = 0; k < q; ++k) {
        const double x = rule.points(k, 0), y = rule.points(k, 1);
        entry[0](i, k) = funcs_[i].eval(x, y);
        entry[1](i, k) = gx.eval(x, y);
        entry[2](i, k) = gy.eval(x, y);
      }
    }
  }
  return entry[0];
}

const Eigen::MatrixXd& ReferenceBasis::dx_at(const QuadRule& rule) const
{
  values_at(rule);
  return value_cache_[rule.exactness][1];
}

const Eigen::MatrixXd& ReferenceBasis::dy_at(const QuadRule& rule) const
{
  values_at(rule);
  return value_cache_[rule.exactness][2];
}

//------------------------------------------------------------------------
// BasisCache
//------------------------------------------------------------------------

struct BasisCache::Impl {
  std::mutex mutex;
  std::map<std::tuple<int, int, unsigned>, std::unique_ptr<ReferenceBasis>> bases;
  std::map<std::tuple<int, int, int, unsigned>, Eigen::MatrixXd> cross;
  std::map<std::tuple<int, int, unsigned>, Eigen::MatrixXd> bgram;
  std::map<std::tuple<int, int, int, unsigned>, Eigen::MatrixXd> bcross;
};

BasisCache& BasisCache::instance()
{
  static BasisCache cache;
  return cache;
}

const ReferenceBasis& BasisCache::basis(int dim, int p, unsigned orient_code)
{
  if (!impl_) impl_ = std::make_shared<Impl>();
  std::lock_guard<std::mutex> lock(impl_->mutex);
  auto key = std::make_tuple(dim, p, dim == 1 ? 0u : orient_code);
  auto it = impl_->bases.find(key);
  if (it == impl_->bases.end())
    it = impl_->bases
             .emplace(key, std::make_unique<ReferenceBasis>(dim, p, dim == 1 ? 0u : orient_code))
             .first;
  return *it->second;
}

const Eigen::MatrixXd& BasisCache::cross_mass(int dim, int a, int b, unsigned orient_code)
{
  const ReferenceBasis& A = basis(dim, a, orient_code);
  const ReferenceBasis& B = basis(dim, b, orient_code);
  std::lock_guard<std::mutex> lock(impl_->mutex);
  auto key = std::make_tuple(dim, a, b, dim == 1 ? 0u : orient_code);
  auto it = impl_->cross.find(key);
  if (it == impl_->cross.end()) {
    const QuadRule& rule = reference_rule(dim, a + b);
    const Eigen::MatrixXd& va = A.values_at(rule);
    const Eigen::MatrixXd& vb = B.values_at(rule);
    Eigen::MatrixXd m = va * rule.weights.asDiagonal() * vb.transpose();
    it = impl_->cross.emplace(key, std::move(m)).first;
  }
  return it->second;
}

const Eigen::MatrixXd& BasisCache::bubble_gram(int dim, int p, unsigned orient_code)
{
  const ReferenceBasis& B = basis(dim, p, orient_code);
  std::lock_guard<std::mutex> lock(impl_->mutex);
  auto key = std::make_tuple(dim, p, dim == 1 ? 0u : orient_code);
  auto it = impl_->bgram.find(key);
  if (it == impl_->bgram.end()) {
    const int bdeg = dim + 1;
    const QuadRule& rule = reference_rule(dim, 2 * p + bdeg);
    const Eigen::MatrixXd& v = B.values_at(rule);
    Eigen::VectorXd w = rule.weights;
    for (int q = 0; q < rule.size(); ++q) {
      const double x = rule.points(q, 0), y = rule.points(q, 1);
      w[q] *= dim == 1 ? (1.0 - x) * x : (1.0 - x - y) * x * y;
    }
    Eigen::MatrixXd m = v * w.asDiagonal() * v.transpose();
    it = impl_->bgram.emplace(key, std::move(m)).first;
  }
  return it->second;
}

const Eigen::MatrixXd& BasisCache::bubble_cross(int dim, int s, int p, unsigned orient_code)
{
  const ReferenceBasis& S = basis(dim, s, orient_code);
  const ReferenceBasis& P = basis(dim, p, orient_code);
  std::lock_guard<std::mutex> lock(impl_->mutex);
  auto key = std::make_tuple(dim, s, p, dim == 1 ? 0u : orient_code);
  auto it = impl_->bcross.find(key);
  if (it == impl_->bcross.end()) {
    const int bdeg = dim + 1;
    const QuadRule& rule = reference_rule(dim, s + p + bdeg);
    const Eigen::MatrixXd& vs = S.values_at(rule);
    const Eigen::MatrixXd& vp = P.values_at(rule);
    Eigen::VectorXd w = rule.weights;
    for (int q = 0; q < rule.size(); ++q) {
      const double x = rule.points(q, 0), y = rule.points(q, 1);
      w[q] *= dim == 1 ? (1.0 - x) * x : (1.0 - x - y) * x * y;
    }
    Eigen::MatrixXd m = vs * w.asDiagonal() * vp.transpose();
    it = impl_->bcross.emplace(key, std::move(m)).first;
  }
  return it->second;
}

//------------------------------------------------------------------------
// Element geometry
//------------------------------------------------------------------------

ElementMap element_map(const Mesh& mesh, int t)
{
  ElementMap m;
  const auto& el = mesh.element(t);
  m.v0 = mesh.vertex(el[0]);
  m.J.setIdentity();
  if (mesh.dim() == 1) {
    m.J(0, 0) = mesh.vertex(el[1])[0] - m.v0[0];
    m.detJ = m.J(0, 0);
    m.Jinv.setIdentity();
    m.Jinv(0, 0) = 1.0 / m.J(0, 0);
  } else {
    m.J.col(0) = mesh.vertex(el[1]) - m.v0;
    m.J.col(1) = mesh.vertex(el[2]) - m.v0;
    m.detJ = m.J.determinant();
    m.Jinv = m.J.inverse();
  }
  return m;
}

unsigned element_orientation(const Mesh& mesh, int t)
{
  if (mesh.dim() == 1) return 0;
  const auto& el = mesh.element(t);
  unsigned code = 0;
  for (int e = 0; e < 3; ++e)
    if (el[(e + 1) % 3] > el[(e + 2) % 3]) code |= 1u << e;
  return code;
}

std::vector<LocalPoly> element_basis_polys(const Mesh& mesh, int t, int p, const Frame& frame)
{
  const ReferenceBasis& ref = BasisCache::instance().basis(mesh.dim(), p, element_orientation(mesh, t));
  const ElementMap map = element_map(mesh, t);
  // xhat = Jinv (x - v0), with x = center + len * u
  const Eigen::Vector2d shift = map.Jinv * (frame.center - map.v0);
  const Eigen::Matrix2d A = frame.len * map.Jinv;
  Poly2 lu = Poly2::x() * A(0, 0) + Poly2::y() * A(0, 1) + Poly2::constant(shift[0]);
  Poly2 lv = Poly2::x() * A(1, 0) + Poly2::y() * A(1, 1) + Poly2::constant(shift[1]);
  if (mesh.dim() == 1) lv = Poly2::constant(0.0);

  std::vector<LocalPoly> out;
  out.reserve(ref.size());
  for (int i = 0; i < ref.size(); ++i)
    out.push_back({ref.function(i).compose_affine(lu, lv), frame});
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> mapped_points(const Mesh& mesh, int t,
                                                       const QuadRule& rule)
{
  const ElementMap map = element_map(mesh, t);
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(rule.size(), 2);
  for (int q = 0; q < rule.size(); ++q)
    pts.row(q) = map.to_physical(rule.points.row(q).transpose()).transpose();
  return pts;
}

}  // namespace qipp
