#include "qipp/studies.hpp"

#include "qipp/negproj.hpp"
#include "qipp/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace qipp {

namespace {

double manufactured(const Eigen::Vector2d& x)
{
  return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
}

double manufactured_load(const Eigen::Vector2d& x)
{
  return 2.0 * M_PI * M_PI * manufactured(x);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void finish_rows(StudyResult& res)
{
  const std::size_t ncols = res.error_names.size();
  std::vector<double> hs;
  for (const auto& r : res.rows) hs.push_back(r.h);
  for (std::size_t c = 0; c < ncols; ++c) {
    std::vector<double> errs;
    for (const auto& r : res.rows) errs.push_back(r.errors[c]);
    const auto eocs = compute_eoc(errs, hs);
    for (std::size_t k = 0; k < res.rows.size(); ++k)
      res.rows[k].eocs.push_back(k == 0 ? kNaN : eocs[k - 1].rate);
  }
}

}  // namespace

double StudyResult::terminal_eoc(std::size_t c) const
{
  return rows.size() < 2 ? kNaN : rows.back().eocs[c];
}

double StudyResult::penultimate_eoc(std::size_t c) const
{
  return rows.size() < 3 ? kNaN : rows[rows.size() - 2].eocs[c];
}

std::vector<EocEntry> compute_eoc(const std::vector<double>& errors, const std::vector<double>& hs)
{
  if (errors.size() != hs.size() || errors.size() < 2)
    throw std::invalid_argument("compute_eoc: need equal lengths >= 2");
  std::vector<EocEntry> out;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k] <= 0.0 || errors[k - 1] <= 0.0) {
      out.push_back({kNaN, true});
    } else {
      out.push_back({std::log(errors[k - 1] / errors[k]) / std::log(hs[k - 1] / hs[k]), false});
    }
  }
  return out;
}

std::vector<int> default_ladder(int levels)
{
  std::vector<int> ns;
  for (int l = 0; l < levels; ++l) ns.push_back(4 << l);
  return ns;
}

StudyResult run_interp_study(int p, OperatorKind kind, int levels, PatchPolicy policy)
{
  StudyResult res;
  res.error_names = {"errL2"};
  int level = 0;
  for (int n : default_ladder(levels)) {
    const Mesh mesh = generate_structured(2, n);
    const QuasiInterpolator op = build_interpolator(mesh, p, kind, policy);
    const DiscontinuousField proj = project_broken(mesh, manufactured, op.source_degree());
    const ContinuousField result = op.apply(proj);
    ConvergenceRow row;
    row.level = level++;
    row.nelems = mesh.num_elements();
    row.h = mesh.mesh_size();
    row.errors.push_back(error_L2(result, manufactured));
    res.rows.push_back(std::move(row));
    res.mesh_constant_R = std::max(res.mesh_constant_R, mesh_constant_R(mesh));
    res.max_vicinity_order = std::max(res.max_vicinity_order, op.max_vicinity_order());
  }
  finish_rows(res);
  return res;
}

StudyResult run_mixed_study(int levels)
{
  StudyResult res;
  res.error_names = {"errU", "errUstarST", "errUstarJ01", "errUstarI02", "errSuperclose"};
  int level = 0;
  for (int n : default_ladder(levels)) {
    const Mesh mesh = generate_structured(2, n);
    const MixedSolution mixed = solve_mixed_rt0(mesh, manufactured_load);
    const DiscontinuousField u_T = mixed.scalar_field();

    const DiscontinuousField stenberg = stenberg_postprocess(mesh, mixed);
    const QuasiInterpolator J01 = build_interpolator(mesh, 0, OperatorKind::J0);
    const QuasiInterpolator I02 = build_interpolator(mesh, 1, OperatorKind::I0);

    const DiscontinuousField pi0u = project_broken(mesh, manufactured, 0);
    DiscontinuousField diff = pi0u;
    diff.coeffs() -= u_T.coeffs();

    ConvergenceRow row;
    row.level = level++;
    row.nelems = mesh.num_elements();
    row.h = mesh.mesh_size();
    row.errors.push_back(error_L2(u_T, manufactured));
    row.errors.push_back(error_L2(stenberg, manufactured));
    row.errors.push_back(error_L2(J01.apply(u_T), manufactured));
    row.errors.push_back(error_L2(I02.apply(u_T), manufactured));
    row.errors.push_back(norm_L2(diff));
    res.rows.push_back(std::move(row));
    res.mesh_constant_R = std::max(res.mesh_constant_R, mesh_constant_R(mesh));
    res.max_vicinity_order = std::max(res.max_vicinity_order, I02.max_vicinity_order());
  }
  finish_rows(res);
  return res;
}

StudyResult run_hdg_study(int p, int levels, double tau)
{
  StudyResult res;
  res.error_names = {"errUstar", "errSuperclose"};
  const PatchPolicy policy = p >= 2 ? PatchPolicy::Small : PatchPolicy::Default;
  int level = 0;
  for (int n : default_ladder(levels)) {
    const Mesh mesh = generate_structured(2, n);
    const HDGSolution hdg = solve_hdg(mesh, manufactured_load, p, tau);
    const QuasiInterpolator I = build_interpolator(mesh, p, OperatorKind::I0, policy);

    const DiscontinuousField pi0u = project_broken(mesh, manufactured, 0);
    DiscontinuousField diff = pi0u;
    diff.coeffs() -= project_broken(hdg.u, 0).coeffs();

    ConvergenceRow row;
    row.level = level++;
    row.nelems = mesh.num_elements();
    row.h = mesh.mesh_size();
    row.errors.push_back(error_L2(I.apply(hdg.u), manufactured));
    row.errors.push_back(norm_L2(diff));
    res.rows.push_back(std::move(row));
    res.mesh_constant_R = std::max(res.mesh_constant_R, mesh_constant_R(mesh));
    res.max_vicinity_order = std::max(res.max_vicinity_order, I.max_vicinity_order());
  }
  finish_rows(res);
  return res;
}

StudyResult run_negproj_study(int p, int levels)
{
  StudyResult res;
  res.error_names = {"errHm1", "ratioL2"};
  std::mt19937_64 rng(20240518);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int level = 0;
  for (int n : default_ladder(levels)) {
    const Mesh mesh = generate_structured(2, n);
    // Q phi on smooth phi: inputs of degree p+3 make the pairings with the
    // dual bubbles (degree p+3) exact.
    const int s = p + 3;
    const Eigen::SparseMatrix<double> Q =
        build_negative_projection(mesh, p, ProjectionVariant::ZeroBoundary, s);
    const DiscontinuousField phi = project_broken(mesh, manufactured, s);
    const DiscontinuousField qphi = apply_projection(Q, phi, p);

    // Riesz mesh: two extra uniform refinements. Points are located on the
    // coarse structured criss-cross grid directly.
    const Mesh riesz = refine_uniform(refine_uniform(mesh));
    auto locate = [&](const Eigen::Vector2d& x) {
      const double hx = 1.0 / n;
      const int i = std::min(static_cast<int>(x[0] / hx), n - 1);
      const int j = std::min(static_cast<int>(x[1] / hx), n - 1);
      const double fx = x[0] / hx - i, fy = x[1] / hx - j;
      const int cell = 2 * (i + j * n);
      return fy <= fx ? cell : cell + 1;
    };
    const double errHm1 = discrete_hminus1_norm(
        riesz, [&](const Eigen::Vector2d& x) { return manufactured(x) - qphi.eval(locate(x), x); });

    // L2 operator ratio over random broken fields of degree p.
    double ratio = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      DiscontinuousField r(mesh, s);
      for (Eigen::Index i = 0; i < r.coeffs().size(); ++i) r.coeffs()[i] = unif(rng);
      const DiscontinuousField qr = apply_projection(Q, r, p);
      ratio = std::max(ratio, norm_L2(qr) / norm_L2(r));
    }

    ConvergenceRow row;
    row.level = level++;
    row.nelems = mesh.num_elements();
    row.h = mesh.mesh_size();
    row.errors.push_back(errHm1);
    row.errors.push_back(ratio);
    res.rows.push_back(std::move(row));
  }
  finish_rows(res);
  return res;
}

void write_csv(std::ostream& out, const StudyResult& res)
{
  out << "level,nelems,h";
  for (const auto& name : res.error_names) out << ',' << name;
  for (const auto& name : res.error_names) out << ",eoc_" << name;
  out << '\n';
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.16g", v);
    out << ',' << buf;
  };
  for (const auto& row : res.rows) {
    out << row.level << ',' << row.nelems;
    emit(row.h);
    for (double e : row.errors) emit(e);
    for (double e : row.eocs) emit(e);
    out << '\n';
  }
  out << "# R=" << res.mesh_constant_R << '\n';
  out << "# max_vicinity_order=" << res.max_vicinity_order << '\n';
}

}  // namespace qipp
