// Command-line driver: mesh generation and refinement, convergence studies
// with CSV output, and the rank / two-triangle verification tables.

#include "qipp/negproj.hpp"
#include "qipp/orthocheck.hpp"
#include "qipp/orthopoly.hpp"
#include "qipp/solvers.hpp"
#include "qipp/studies.hpp"
#include "qipp/weights.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

namespace {

using namespace qipp;

std::ostream& open_output(const std::string& path, std::ofstream& file)
{
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

// EOC assertions: both of the last two increments, or the terminal one.
bool eoc_within(const StudyResult& res, std::size_t col, double expected, double tol)
{
  const double a = res.terminal_eoc(col);
  const double b = res.penultimate_eoc(col);
  return std::isfinite(a) && std::isfinite(b) && std::abs(a - expected) <= tol &&
         std::abs(b - expected) <= tol;
}

bool eoc_terminal(const StudyResult& res, std::size_t col, double expected, double tol)
{
  const double a = res.terminal_eoc(col);
  return std::isfinite(a) && std::abs(a - expected) <= tol;
}

OperatorKind parse_kind(const std::string& s)
{
  if (s == "J0") return OperatorKind::J0;
  if (s == "J") return OperatorKind::J;
  if (s == "I0") return OperatorKind::I0;
  if (s == "I") return OperatorKind::I;
  throw CLI::ValidationError("--kind must be one of J0, J, I0, I");
}

int run_verify_rank(int p, int trials, bool do_assert)
{
  std::cout << "case,p,trial,kernel_dim,vicinity_order\n";
  bool ok = true;
  std::uint64_t seed = 31415;
  for (int trial = 0; trial < trials; ++trial) {
    const Mesh mesh = random_delaunay_mesh(6 + trial % 5, seed + trial);
    const auto& interior = mesh.interior_vertices();
    const int z = interior[trial % interior.size()];
    const PatchRef patch = element_patch(mesh, SeedKind::Vertex, z, 1);
    const int kd = kernel_dimension(gram_matrix(mesh, patch, p + 1, p));
    std::cout << "random_patch," << p << ',' << trial << ',' << kd << ",1\n";
    ok = ok && kd == 0;
  }
  // Vicinity algorithm on a structured mesh
  const Mesh mesh = generate_structured(2, 8);
  int max_order = 0;
  for (int z : mesh.interior_vertices()) {
    const PatchRef v = grow_vicinity(mesh, z, p);
    max_order = std::max(max_order, v.order);
    if (p == 0) ok = ok && v.order == 1;
  }
  std::cout << "vicinity_structured," << p << ",0,0," << max_order << '\n';
  ok = ok && max_order <= p + 1;
  return do_assert && !ok ? 1 : 0;
}

int run_verify_appendix(int nmax, int grid, bool do_assert)
{
  std::cout << "case,c,d,n,nullspace_dim,principal_angle\n";
  bool ok = true;
  char buf[128];
  auto report = [&](const char* label, double c, double d, int n, const NullspaceResult& res,
                    double angle) {
    std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g,%d,%d,%.3e\n", label, c, d, n, res.dimension,
                  angle);
    std::cout << buf;
  };

  for (int n = 2; n <= nmax; ++n) {
    // generic grid at distance >= 0.1 from the loci c=0, d=1, d-c=-1
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        const double c = 0.15 + 0.35 * i + (i >= 3 ? 0.05 * (i - 2) : 0.0);
        const double delta = 0.4 + 0.45 * j + (j >= 2 ? 0.15 * (j - 1) : 0.0);
        const double d = c - delta;
        TwoTriangleConfig cfg{TwoTriangleConfig::Horizontal, c, d, n};
        const NullspaceResult res = joint_nullspace(cfg);
        report("generic", c, d, n, res, 0.0);
        ok = ok && res.dimension == 0;
      }
    // exceptional: c = 0
    {
      TwoTriangleConfig cfg{TwoTriangleConfig::Horizontal, 0.0, -0.5, n};
      const NullspaceResult res = joint_nullspace(cfg);
      const double angle = principal_angle(
          res.basis, coefficients_in_frame(predicted_case_c0(n), res.frame, n));
      report("c=0", 0.0, -0.5, n, res, angle);
      ok = ok && res.dimension == 1 && angle <= 1e-8;
    }
    // exceptional: d = 1 (requires c > 1)
    {
      TwoTriangleConfig cfg{TwoTriangleConfig::Horizontal, 1.7, 1.0, n};
      const NullspaceResult res = joint_nullspace(cfg);
      const double angle = principal_angle(
          res.basis, coefficients_in_frame(predicted_case_d1(n), res.frame, n));
      report("d=1", 1.7, 1.0, n, res, angle);
      ok = ok && res.dimension == 1 && angle <= 1e-8;
    }
  }
  // exceptional: n = 2, d = c - 1
  {
    const double c = 0.5;
    TwoTriangleConfig cfg{TwoTriangleConfig::Horizontal, c, c - 1.0, 2};
    const NullspaceResult res = joint_nullspace(cfg);
    const double angle = principal_angle(
        res.basis,
        coefficients_in_frame(predicted_case_n2_dcm1(c, TwoTriangleConfig::Horizontal), res.frame, 2));
    report("n=2_d=c-1", c, c - 1.0, 2, res, angle);
    ok = ok && res.dimension == 1 && angle <= 1e-8;
  }
  return do_assert && !ok ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"quasi-interpolation postprocessing toolkit"};
  app.require_subcommand(1);

  // mesh gen / refine
  auto* mesh_cmd = app.add_subcommand("mesh", "mesh generation and refinement");
  mesh_cmd->require_subcommand(1);
  int gen_d = 2, gen_n = 4;
  std::string mesh_out, mesh_in;
  auto* gen = mesh_cmd->add_subcommand("gen", "structured mesh of the unit domain");
  gen->add_option("--d", gen_d, "dimension (1 or 2)");
  gen->add_option("--n", gen_n, "subdivisions per side");
  gen->add_option("--out", mesh_out, "output file (default stdout)");
  auto* refine = mesh_cmd->add_subcommand("refine", "uniform refinement");
  refine->add_option("--in", mesh_in, "input mesh file")->required();
  refine->add_option("--out", mesh_out, "output file (default stdout)");

  // interp
  auto* interp = app.add_subcommand("interp", "interpolation convergence study");
  int ip = 0, ilevels = 5;
  std::string ikind = "J0", ipatch = "default", iout, idump;
  bool iassert = false;
  interp->add_option("--p", ip, "polynomial degree of the weights");
  interp->add_option("--kind", ikind, "operator kind: J0, J, I0, I");
  interp->add_option("--levels", ilevels, "ladder levels (n = 4, 8, ...)");
  interp->add_option("--patch", ipatch, "patch policy: default or small");
  interp->add_option("--out", iout, "CSV output file (default stdout)");
  interp->add_option("--dump-operator", idump, "triplet dump of the operator matrix");
  interp->add_flag("--assert", iassert, "nonzero exit if the expected EOC fails");

  // mixed
  auto* mixed = app.add_subcommand("mixed", "mixed RT0 postprocessing study");
  int mlevels = 6;
  std::string mout;
  bool massert = false;
  mixed->add_option("--levels", mlevels, "ladder levels");
  mixed->add_option("--out", mout, "CSV output file (default stdout)");
  mixed->add_flag("--assert", massert, "nonzero exit if the expected EOC fails");

  // hdg
  auto* hdg = app.add_subcommand("hdg", "HDG postprocessing study");
  int hp = 1, hlevels = 5;
  double htau = 1.0;
  std::string hout;
  bool hassert = false;
  hdg->add_option("--p", hp, "polynomial degree (1, 2, or 3)");
  hdg->add_option("--tau", htau, "stabilization parameter");
  hdg->add_option("--levels", hlevels, "ladder levels");
  hdg->add_option("--out", hout, "CSV output file (default stdout)");
  hdg->add_flag("--assert", hassert, "nonzero exit if the expected EOC fails");

  // negproj
  auto* negp = app.add_subcommand("negproj", "negative-norm projection study");
  int np = 0, nlevels = 4;
  std::string nout;
  bool nassert = false;
  negp->add_option("--p", np, "projection degree");
  negp->add_option("--levels", nlevels, "ladder levels");
  negp->add_option("--out", nout, "CSV output file (default stdout)");
  negp->add_flag("--assert", nassert, "nonzero exit if the expected EOC fails");

  // verify
  auto* verify = app.add_subcommand("verify", "rank and appendix verification");
  verify->require_subcommand(1);
  auto* vrank = verify->add_subcommand("rank", "full-rank condition on random patches");
  int vp = 1, vtrials = 100;
  bool vassert = false;
  vrank->add_option("--p", vp, "polynomial degree");
  vrank->add_option("--trials", vtrials, "number of random patches");
  vrank->add_flag("--assert", vassert, "nonzero exit on failure");
  auto* vapp = verify->add_subcommand("appendix", "two-triangle nullspace table");
  int vn = 4, vgrid = 5;
  bool vaassert = false;
  vapp->add_option("--n", vn, "maximum polynomial degree");
  vapp->add_option("--grid", vgrid, "generic (c,d) grid size per degree");
  vapp->add_flag("--assert", vaassert, "nonzero exit on failure");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      std::ofstream file;
      write_mesh(open_output(mesh_out, file), generate_structured(gen_d, gen_n));
      return 0;
    }
    if (refine->parsed()) {
      std::ofstream file;
      write_mesh(open_output(mesh_out, file), refine_uniform(read_mesh_file(mesh_in)));
      return 0;
    }
    if (interp->parsed()) {
      const OperatorKind kind = parse_kind(ikind);
      const PatchPolicy policy = ipatch == "small" ? PatchPolicy::Small : PatchPolicy::Default;
      const StudyResult res = run_interp_study(ip, kind, ilevels, policy);
      std::ofstream file;
      write_csv(open_output(iout, file), res);
      if (!idump.empty()) {
        const Mesh mesh = generate_structured(2, 4);
        const QuasiInterpolator op = build_interpolator(mesh, ip, kind, policy);
        std::ofstream dump(idump);
        write_triplets(dump, op.operator_matrix());
      }
      if (iassert && !eoc_within(res, 0, ip + 2.0, 0.2)) return 1;
      return 0;
    }
    if (mixed->parsed()) {
      const StudyResult res = run_mixed_study(mlevels);
      std::ofstream file;
      write_csv(open_output(mout, file), res);
      if (massert) {
        // the I0^2 column settles from above; assert the terminal increment
        const bool ok = eoc_terminal(res, 0, 1.0, 0.15) && eoc_terminal(res, 1, 2.0, 0.2) &&
                        eoc_terminal(res, 2, 2.0, 0.2) && eoc_terminal(res, 3, 2.0, 0.2) &&
                        eoc_terminal(res, 4, 2.0, 0.2);
        if (!ok) return 1;
      }
      return 0;
    }
    if (hdg->parsed()) {
      const StudyResult res = run_hdg_study(hp, hlevels, htau);
      std::ofstream file;
      write_csv(open_output(hout, file), res);
      if (hassert && !eoc_within(res, 0, hp + 2.0, 0.25)) return 1;
      return 0;
    }
    if (negp->parsed()) {
      const StudyResult res = run_negproj_study(np, nlevels);
      std::ofstream file;
      write_csv(open_output(nout, file), res);
      if (nassert && !(std::isfinite(res.terminal_eoc(0)) &&
                       std::abs(res.terminal_eoc(0) - (np + 2.0)) <= 0.3))
        return 1;
      return 0;
    }
    if (vrank->parsed()) return run_verify_rank(vp, vtrials, vassert);
    if (vapp->parsed()) return run_verify_appendix(vn, vgrid, vaassert);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
