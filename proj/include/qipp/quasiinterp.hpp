// Assembly and application of the quasi-interpolation operators: weight
// functions of degree p (J kinds) or degree 0 (I kinds) paired against
// broken fields produce conforming P^{p+1} coefficients.

#pragma once

#include "qipp/fields.hpp"
#include "qipp/weights.hpp"

#include <Eigen/Sparse>

#include <iosfwd>

namespace qipp {

enum class OperatorKind { J0, J, I0, I };
enum class PatchPolicy { Default, Small };

inline bool zero_boundary_kind(OperatorKind k)
{
  return k == OperatorKind::J0 || k == OperatorKind::I0;
}
inline bool constant_weight_kind(OperatorKind k)
{
  return k == OperatorKind::I0 || k == OperatorKind::I;
}

class QuasiInterpolator {
public:
  OperatorKind kind() const { return kind_; }
  int p() const { return p_; }
  int target_degree() const { return p_ + 1; }
  /// Fields of lower degree are rejected by apply; I kinds only see Pi^0.
  int source_degree() const { return constant_weight_kind(kind_) ? 0 : p_; }
  const Mesh& mesh() const { return *mesh_; }
  const DofMap& target_dofs() const { return target_; }
  PatchPolicy policy() const { return policy_; }

  const std::vector<WeightFunction>& weights() const { return weights_; }
  /// Weight index for a target dof, -1 for inactive (boundary) dofs.
  int weight_of_dof(int dof) const { return dof_to_weight_[dof]; }

  int mesh_constant() const { return R_; }
  int max_vicinity_order() const { return max_vicinity_order_; }

  /// Coefficient star = <field, phi_star>; requires field.degree() >=
  /// source_degree() on the same mesh.
  ContinuousField apply(const DiscontinuousField& field) const;

  /// Matrix with rows over the full target numbering (boundary rows empty for
  /// J0/I0) and columns over broken dofs of the given source degree;
  /// reproduces apply exactly on fields of that degree.
  Eigen::SparseMatrix<double> matrix(int source_degree) const;
  Eigen::SparseMatrix<double> operator_matrix() const { return matrix(source_degree()); }

  friend QuasiInterpolator build_interpolator(const Mesh& mesh, int p, OperatorKind kind,
                                              PatchPolicy policy);

private:
  OperatorKind kind_ = OperatorKind::J0;
  int p_ = 0;
  PatchPolicy policy_ = PatchPolicy::Default;
  const Mesh* mesh_ = nullptr;
  DofMap target_;
  std::vector<WeightFunction> weights_;
  std::vector<int> dof_to_weight_;
  int R_ = 1;
  int max_vicinity_order_ = 0;
};

QuasiInterpolator build_interpolator(const Mesh& mesh, int p, OperatorKind kind,
                                     PatchPolicy policy = PatchPolicy::Default);

/// Triplet text dump "row col value" per line, 16 significant digits.
void write_triplets(std::ostream& out, const Eigen::SparseMatrix<double>& m);

}  // namespace qipp
