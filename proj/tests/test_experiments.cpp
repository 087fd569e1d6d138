#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polykde/experiments.hpp"
#include "polykde/specfun.hpp"

using namespace polykde;

TEST_CASE("efficiency table layout and spot values") {
  const auto table = efficiency_table({1, 2, 10}, {1, 2}, {1.0, 10.0, 100.0});
  REQUIRE(table.size() == 6);
  // r = 2, d = 2, vMF -> 75.00.
  const auto& row = table[4];
  CHECK(row.r == 2);
  CHECK(row.d == 2);
  CHECK(row.vmf == doctest::Approx(75.00).epsilon(1e-6));
  // r = 2, d = 10, Epa^P -> 71.72.
  CHECK(table[5].epa_product == doctest::Approx(71.72).epsilon(2e-4));
  // r = 1: product Epa is the spherical Epa, efficiency 100.
  for (int i = 0; i < 3; ++i) CHECK(table[static_cast<std::size_t>(i)].epa_product ==
                                    doctest::Approx(100.0).epsilon(1e-10));
}

TEST_CASE("ks distance of an exact normal grid is small") {
  std::vector<double> z;
  for (int i = 1; i < 2000; ++i) {
    // Inverse-CDF grid: the empirical CDF hugs the normal CDF.
    const double u = i / 2000.0;
    // crude inverse via bisection
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (polykde::specfun::norm_cdf(mid) < u ? lo : hi) = mid;
    }
    z.push_back(0.5 * (lo + hi));
  }
  CHECK(ks_distance_normal(z) < 2.0 / 2000.0);
}

TEST_CASE("normality harness: sd(Z1) equals sd(Z2) and both near one") {
  NormalityRun cfg;
  cfg.d = 2;
  cfg.r = 2;
  cfg.kappa = Vector(2);
  cfg.kappa << 5.0, 5.0;
  cfg.deltas = {0.0};
  cfg.ns = {256};
  cfg.M = 400;
  const auto cells = run_normality(cfg, 99);
  REQUIRE(cells.size() == 1);
  const auto& cell = cells[0];
  CHECK(cell.sd_z1 == doctest::Approx(cell.sd_z2).epsilon(1e-12));
  CHECK(cell.sd_z1 > 0.5);
  CHECK(cell.sd_z1 < 1.5);
  CHECK(std::isfinite(cell.ks_z1));
  CHECK(cell.ks_z1 < 0.25);
  CHECK(cell.bandwidth > 0.0);
}
