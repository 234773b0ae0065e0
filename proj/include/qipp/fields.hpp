// Coefficient containers for broken P^p(T) and conforming P^p_c(T) spaces,
// the elementwise L^2 projection, evaluation, and error norms.

#pragma once

#include "qipp/basis.hpp"
#include "qipp/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>

namespace qipp {

using ScalarFn = std::function<double(const Eigen::Vector2d&)>;

/// Default assembly exactness 2(p+2); error norms use max(2p+6, 12).
inline int assembly_exactness(int p) { return 2 * (p + 2); }
inline int error_exactness(int p) { return std::max(2 * p + 6, 12); }

//------------------------------------------------------------------------
// Global DOF numbering for conforming P^g spaces
//------------------------------------------------------------------------

struct DofMap {
  const Mesh* mesh = nullptr;
  int degree = 0;
  int n_vertex = 0, n_edge_modes = 0, n_elem_modes = 0;

  DofMap() = default;
  DofMap(const Mesh& m, int g);

  int total() const
  {
    return n_vertex + n_edge_modes * mesh->num_edges() + n_elem_modes * mesh->num_elements();
  }
  int vertex_dof(int z) const { return z; }
  int edge_dof(int e, int j) const { return n_vertex + e * n_edge_modes + (j - 1); }
  int element_dof(int t, int k) const
  {
    return n_vertex + mesh->num_edges() * n_edge_modes + t * n_elem_modes + (k - 1);
  }
  bool is_boundary_dof(int dof) const;

  /// Global ids of element t's local basis functions, in local basis order.
  std::vector<int> element_dofs(int t) const;
};

//------------------------------------------------------------------------
// Fields
//------------------------------------------------------------------------

class DiscontinuousField {
public:
  DiscontinuousField() = default;
  DiscontinuousField(const Mesh& mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int block_size() const { return block_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorBlock<Eigen::VectorXd> block(int t) { return coeffs_.segment(t * block_, block_); }
  Eigen::VectorBlock<const Eigen::VectorXd> block(int t) const
  {
    return coeffs_.segment(t * block_, block_);
  }

  double eval(int t, const Eigen::Vector2d& x) const;

private:
  const Mesh* mesh_ = nullptr;
  int degree_ = 0;
  int block_ = 0;
  Eigen::VectorXd coeffs_;
};

class ContinuousField {
public:
  ContinuousField() = default;
  ContinuousField(const Mesh& mesh, int degree, bool zero_boundary);

  const Mesh& mesh() const { return *dofs_.mesh; }
  const DofMap& dof_map() const { return dofs_; }
  int degree() const { return dofs_.degree; }
  bool zero_boundary() const { return zero_boundary_; }
  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }

  double eval(int t, const Eigen::Vector2d& x) const;

  /// Broken representation (exact: conforming spaces are subspaces).
  DiscontinuousField to_broken() const;

private:
  DofMap dofs_;
  bool zero_boundary_ = false;
  Eigen::VectorXd values_;
};

//------------------------------------------------------------------------
// Projection and norms
//------------------------------------------------------------------------

/// Elementwise L^2 projection Pi^p of a callable (quadrature exactness
/// max(2p+6, 12) unless overridden).
DiscontinuousField project_broken(const Mesh& mesh, const ScalarFn& f, int p, int exactness = -1);
/// Pi^p of a discrete field (exact by quadrature).
DiscontinuousField project_broken(const DiscontinuousField& f, int p);

/// || f - field ||_{L^2(Omega)} with high-exactness quadrature.
double error_L2(const DiscontinuousField& field, const ScalarFn& f);
double error_L2(const ContinuousField& field, const ScalarFn& f);

double norm_L2(const DiscontinuousField& field);
double difference_L2(const DiscontinuousField& a, const DiscontinuousField& b);

/// Pairings of broken degree-s fields with the conforming basis functions:
/// row star = <., eta_star>, columns over broken source dofs.
Eigen::SparseMatrix<double> conforming_pairing_matrix(const DofMap& dofs, int source_degree);

}  // namespace qipp
