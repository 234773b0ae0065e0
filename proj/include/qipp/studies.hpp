// Convergence ladders on the unit square with the manufactured solution
// u = sin(pi x) sin(pi y): interpolation error studies, mixed-FEM and HDG
// postprocessing studies, the negative-norm projection study, EOC
// computation, and CSV emission.

#pragma once

#include "qipp/quasiinterp.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qipp {

struct ConvergenceRow {
  int level = 0;
  int nelems = 0;
  double h = 0.0;
  std::vector<double> errors;
  std::vector<double> eocs;  // NaN on the first row or when saturated
};

struct StudyResult {
  std::vector<std::string> error_names;
  std::vector<ConvergenceRow> rows;
  int mesh_constant_R = 1;
  int max_vicinity_order = 0;

  /// EOC of column c on the last row, NaN when unavailable.
  double terminal_eoc(std::size_t c) const;
  /// Second-to-last EOC, for ladders asserted on the last two increments.
  double penultimate_eoc(std::size_t c) const;
};

struct EocEntry {
  double rate;
  bool saturated;  // an error hit the quadrature floor (zero entry)
};

/// rate_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k); zero errors flag saturation.
std::vector<EocEntry> compute_eoc(const std::vector<double>& errors,
                                  const std::vector<double>& hs);

/// Ladder of structured meshes n = 4, 8, ..., 4 * 2^(levels-1).
std::vector<int> default_ladder(int levels);

/// || u - Op(Pi^src u) || per level for Op in {J0, J, I0, I}.
StudyResult run_interp_study(int p, OperatorKind kind, int levels,
                             PatchPolicy policy = PatchPolicy::Default);

/// Mixed RT0 study: field error, local postprocessing, J0^1 u_T, I0^2 u_T,
/// and the supercloseness column ||Pi^0 u - u_T||.
StudyResult run_mixed_study(int levels);

/// HDG study: ||u - I0^{p+1} u_T|| (small patches for p >= 2).
StudyResult run_hdg_study(int p, int levels, double tau = 1.0);

/// Negative-norm projection study: discrete H^-1 surrogate of (1 - Q^p) phi
/// on a twice-refined Riesz mesh, plus the L^2 operator ratio per level.
StudyResult run_negproj_study(int p, int levels);

/// CSV: header "level,nelems,h,<err...>,<eoc...>", floats with 16 significant
/// digits, then comment lines recording R and the vicinity order.
void write_csv(std::ostream& out, const StudyResult& result);

}  // namespace qipp
