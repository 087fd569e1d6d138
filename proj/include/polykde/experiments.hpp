#pragma once

#include <cstdint>
#include <vector>

#include "polykde/kernels.hpp"
#include "polykde/types.hpp"

namespace polykde {

// Asymptotic-normality study: Z-statistics of f-hat(mu; h_{n,delta} 1_r) under
// a PvMF truth, for bandwidth rates h_{n,delta} = C n^{-1/(dr+4+delta)}.
struct NormalityRun {
  int d = 2;
  int r = 2;
  Vector kappa;
  std::vector<double> deltas{-1.0, 0.0, 4.0};
  std::vector<Eigen::Index> ns{128, 512, 2048};
  int M = 2000;
  KernelSpec spec = KernelSpec::vmf();
};

struct NormalityCell {
  Eigen::Index n = 0;
  double delta = 0.0;
  double bandwidth = 0.0;
  double mean_z1 = 0.0, sd_z1 = 0.0, ks_z1 = 0.0;
  double mean_z2 = 0.0, sd_z2 = 0.0, ks_z2 = 0.0;
};

std::vector<NormalityCell> run_normality(const NormalityRun& cfg, std::uint64_t seed);

// One row of the kernel efficiency table (percentages, as reported).
struct EfficiencyRow {
  int r = 0;
  int d = 0;
  double vmf = 0.0;
  std::vector<double> sfp_spherical;  // one per upsilon
  double epa_product = 0.0;
  std::vector<double> sfp_product;
};

std::vector<EfficiencyRow> efficiency_table(const std::vector<int>& ds, const std::vector<int>& rs,
                                            const std::vector<double>& upsilons);

// One-sample Kolmogorov-Smirnov distance to the standard normal.
double ks_distance_normal(std::vector<double> z);

}  // namespace polykde
