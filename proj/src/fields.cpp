#include "qipp/fields.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace qipp {

DofMap::DofMap(const Mesh& m, int g) : mesh(&m), degree(g)
{
  n_vertex = m.num_vertices();
  n_edge_modes = edge_mode_count(m.dim(), g);
  n_elem_modes = interior_mode_count(m.dim(), g);
  if (g == 0) throw std::invalid_argument("DofMap: conforming spaces need degree >= 1");
}

bool DofMap::is_boundary_dof(int dof) const
{
  if (dof < n_vertex) return mesh->vertex_on_boundary(dof);
  dof -= n_vertex;
  const int ne = mesh->num_edges() * n_edge_modes;
  if (dof < ne) return mesh->edge_on_boundary(dof / n_edge_modes);
  return false;
}

std::vector<int> DofMap::element_dofs(int t) const
{
  std::vector<int> ids;
  const auto& el = mesh->element(t);
  for (int v : el) ids.push_back(vertex_dof(v));
  if (mesh->dim() == 2) {
    const auto& ee = mesh->element_edges(t);
    for (int e = 0; e < 3; ++e)
      for (int j = 1; j <= n_edge_modes; ++j) ids.push_back(edge_dof(ee[e], j));
  }
  for (int k = 1; k <= n_elem_modes; ++k) ids.push_back(element_dof(t, k));
  return ids;
}

//------------------------------------------------------------------------

DiscontinuousField::DiscontinuousField(const Mesh& mesh, int degree)
    : mesh_(&mesh),
      degree_(degree),
      block_(poly_space_dim(mesh.dim(), degree)),
      coeffs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(block_) * mesh.num_elements()))
{
}

double DiscontinuousField::eval(int t, const Eigen::Vector2d& x) const
{
  const ReferenceBasis& ref =
      BasisCache::instance().basis(mesh_->dim(), degree_, element_orientation(*mesh_, t));
  const Eigen::Vector2d xhat = element_map(*mesh_, t).to_reference(x);
  double v = 0.0;
  const auto b = block(t);
  for (int i = 0; i < block_; ++i) v += b[i] * ref.function(i).eval(xhat[0], xhat[1]);
  return v;
}

ContinuousField::ContinuousField(const Mesh& mesh, int degree, bool zero_boundary)
    : dofs_(mesh, degree),
      zero_boundary_(zero_boundary),
      values_(Eigen::VectorXd::Zero(dofs_.total()))
{
}

double ContinuousField::eval(int t, const Eigen::Vector2d& x) const
{
  const Mesh& m = mesh();
  const ReferenceBasis& ref =
      BasisCache::instance().basis(m.dim(), degree(), element_orientation(m, t));
  const Eigen::Vector2d xhat = element_map(m, t).to_reference(x);
  const std::vector<int> ids = dofs_.element_dofs(t);
  double v = 0.0;
  for (int i = 0; i < ref.size(); ++i)
    v += values_[ids[i]] * ref.function(i).eval(xhat[0], xhat[1]);
  return v;
}

DiscontinuousField ContinuousField::to_broken() const
{
  DiscontinuousField out(mesh(), degree());
  for (int t = 0; t < mesh().num_elements(); ++t) {
    const std::vector<int> ids = dofs_.element_dofs(t);
    auto b = out.block(t);
    for (std::size_t i = 0; i < ids.size(); ++i) b[static_cast<Eigen::Index>(i)] = values_[ids[i]];
  }
  return out;
}

//------------------------------------------------------------------------

DiscontinuousField project_broken(const Mesh& mesh, const ScalarFn& f, int p, int exactness)
{
  if (exactness < 0) exactness = error_exactness(p);
  DiscontinuousField out(mesh, p);
  const QuadRule& rule = reference_rule(mesh.dim(), exactness);
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const unsigned oc = element_orientation(mesh, t);
    const ReferenceBasis& ref = BasisCache::instance().basis(mesh.dim(), p, oc);
    const Eigen::MatrixXd& vals = ref.values_at(rule);
    const ElementMap map = element_map(mesh, t);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ref.size());
    for (int q = 0; q < rule.size(); ++q) {
      const double fx = f(map.to_physical(rule.points.row(q).transpose()));
      rhs += rule.weights[q] * fx * vals.col(q);
    }
    // detJ cancels between mass and rhs.
    const Eigen::MatrixXd& mass = BasisCache::instance().cross_mass(mesh.dim(), p, p, oc);
    out.block(t) = mass.ldlt().solve(rhs);
  }
  return out;
}

DiscontinuousField project_broken(const DiscontinuousField& f, int p)
{
  const Mesh& mesh = f.mesh();
  DiscontinuousField out(mesh, p);
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const unsigned oc = element_orientation(mesh, t);
    const Eigen::MatrixXd& mass = BasisCache::instance().cross_mass(mesh.dim(), p, p, oc);
    const Eigen::MatrixXd& cross = BasisCache::instance().cross_mass(mesh.dim(), p, f.degree(), oc);
    out.block(t) = mass.ldlt().solve(cross * f.block(t));
  }
  return out;
}

namespace {

template <typename EvalFn>
double error_L2_impl(const Mesh& mesh, int degree, const ScalarFn& f, const EvalFn& eval)
{
  const QuadRule& rule = reference_rule(mesh.dim(), error_exactness(degree));
  double err2 = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const ElementMap map = element_map(mesh, t);
    const ReferenceBasis& ref =
        BasisCache::instance().basis(mesh.dim(), degree, element_orientation(mesh, t));
    const Eigen::MatrixXd& vals = ref.values_at(rule);
    const Eigen::VectorXd local = eval(t);
    for (int q = 0; q < rule.size(); ++q) {
      const double fh = local.dot(vals.col(q));
      const double fx = f(map.to_physical(rule.points.row(q).transpose()));
      err2 += rule.weights[q] * map.detJ * (fx - fh) * (fx - fh);
    }
  }
  return std::sqrt(err2);
}

}  // namespace

double error_L2(const DiscontinuousField& field, const ScalarFn& f)
{
  return error_L2_impl(field.mesh(), field.degree(), f,
                       [&](int t) { return Eigen::VectorXd(field.block(t)); });
}

double error_L2(const ContinuousField& field, const ScalarFn& f)
{
  const DofMap& dm = field.dof_map();
  return error_L2_impl(field.mesh(), field.degree(), f, [&](int t) {
    const std::vector<int> ids = dm.element_dofs(t);
    Eigen::VectorXd local(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) local[static_cast<Eigen::Index>(i)] = field.values()[ids[i]];
    return local;
  });
}

double norm_L2(const DiscontinuousField& field)
{
  const Mesh& mesh = field.mesh();
  double n2 = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const unsigned oc = element_orientation(mesh, t);
    const Eigen::MatrixXd& mass =
        BasisCache::instance().cross_mass(mesh.dim(), field.degree(), field.degree(), oc);
    const Eigen::VectorXd b = field.block(t);
    n2 += element_map(mesh, t).detJ * b.dot(mass * b);
  }
  return std::sqrt(n2);
}

Eigen::SparseMatrix<double> conforming_pairing_matrix(const DofMap& dofs, int source_degree)
{
  const Mesh& mesh = *dofs.mesh;
  const int d = mesh.dim();
  const int bs = poly_space_dim(d, source_degree);
  auto& cache = BasisCache::instance();
  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const unsigned oc = element_orientation(mesh, t);
    const Eigen::MatrixXd block =
        element_map(mesh, t).detJ * cache.cross_mass(d, dofs.degree, source_degree, oc);
    const std::vector<int> rows = dofs.element_dofs(t);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < bs; ++j)
        trips.emplace_back(rows[i], t * bs + j, block(static_cast<Eigen::Index>(i), j));
  }
  Eigen::SparseMatrix<double> m(dofs.total(),
                                static_cast<Eigen::Index>(bs) * mesh.num_elements());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

double difference_L2(const DiscontinuousField& a, const DiscontinuousField& b)
{
  const Mesh& mesh = a.mesh();
  if (&mesh != &b.mesh()) throw std::invalid_argument("difference_L2: mesh mismatch");
  // Pointwise differences at quadrature nodes: resolves differences far below
  // the sqrt(eps) floor of the expanded quadratic form.
  const QuadRule& rule = reference_rule(mesh.dim(), a.degree() + b.degree());
  double n2 = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const unsigned oc = element_orientation(mesh, t);
    auto& cache = BasisCache::instance();
    const Eigen::MatrixXd& va = cache.basis(mesh.dim(), a.degree(), oc).values_at(rule);
    const Eigen::MatrixXd& vb = cache.basis(mesh.dim(), b.degree(), oc).values_at(rule);
    const Eigen::VectorXd da = a.block(t);
    const Eigen::VectorXd db = b.block(t);
    const double detJ = element_map(mesh, t).detJ;
    for (int q = 0; q < rule.size(); ++q) {
      const double diff = da.dot(va.col(q)) - db.dot(vb.col(q));
      n2 += rule.weights[q] * detJ * diff * diff;
    }
  }
  return std::sqrt(n2);
}

}  // namespace qipp
