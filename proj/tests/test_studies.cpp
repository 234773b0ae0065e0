#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qipp/studies.hpp"

#include <cmath>
#include <sstream>

using namespace qipp;

TEST_CASE("compute_eoc: halving ladder, constants, saturation flag")
{
  const std::vector<double> hs{1.0, 0.5, 0.25};
  const auto r1 = compute_eoc({1.0, 0.25, 0.0625}, hs);
  CHECK(r1[0].rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r1[1].rate == doctest::Approx(2.0).epsilon(1e-12));
  const auto r2 = compute_eoc({0.3, 0.3, 0.3}, hs);
  CHECK(r2[0].rate == doctest::Approx(0.0));
  const auto r3 = compute_eoc({1.0, 0.0, 0.0}, hs);
  CHECK(r3[0].saturated);
  CHECK(std::isnan(r3[0].rate));
  CHECK_THROWS(compute_eoc({1.0}, {1.0}));
}

TEST_CASE("default ladder doubles n starting at 4")
{
  const auto ns = default_ladder(4);
  CHECK(ns == std::vector<int>{4, 8, 16, 32});
}

TEST_CASE("interp study: h halves between rows, csv reruns byte-identical")
{
  const StudyResult res = run_interp_study(0, OperatorKind::J0, 3);
  REQUIRE(res.rows.size() == 3);
  for (std::size_t k = 1; k < res.rows.size(); ++k)
    CHECK(res.rows[k].h == doctest::Approx(0.5 * res.rows[k - 1].h).epsilon(1e-14));
  CHECK(res.terminal_eoc(0) == doctest::Approx(2.0).epsilon(0.1));

  std::stringstream s1, s2;
  write_csv(s1, res);
  write_csv(s2, run_interp_study(0, OperatorKind::J0, 3));
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().find("level,nelems,h,errL2,eoc_errL2") == 0);
  CHECK(s1.str().find("# R=") != std::string::npos);
}

TEST_CASE("interp study records vicinity order for I kinds")
{
  const StudyResult res = run_interp_study(1, OperatorKind::I0, 2);
  CHECK(res.max_vicinity_order >= 2);  // default policy starts at p + 1
  CHECK(res.max_vicinity_order <= 3);
  CHECK(res.mesh_constant_R == 2);
}

TEST_CASE("eoc columns are NaN on the first row and finite afterwards")
{
  const StudyResult res = run_interp_study(0, OperatorKind::J, 3);
  CHECK(std::isnan(res.rows[0].eocs[0]));
  CHECK(std::isfinite(res.rows[1].eocs[0]));
  CHECK(res.terminal_eoc(0) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("small vicinities: same rate, smaller absolute error at p = 2")
{
  const StudyResult big = run_interp_study(2, OperatorKind::I0, 4, PatchPolicy::Default);
  const StudyResult small = run_interp_study(2, OperatorKind::I0, 4, PatchPolicy::Small);
  CHECK(big.terminal_eoc(0) == doctest::Approx(4.0).epsilon(0.06));
  CHECK(small.terminal_eoc(0) == doctest::Approx(4.0).epsilon(0.06));
  CHECK(small.rows.back().errors[0] < big.rows.back().errors[0]);
  CHECK(small.max_vicinity_order < big.max_vicinity_order);
}

TEST_CASE("mixed study: I0^2 beats the local postprocessing on the finest level")
{
  const StudyResult res = run_mixed_study(4);
  CHECK(res.rows.back().errors[3] < res.rows.back().errors[1]);
}
