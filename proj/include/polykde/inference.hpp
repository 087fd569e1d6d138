#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "polykde/bandwidth.hpp"
#include "polykde/kernels.hpp"
#include "polykde/types.hpp"

namespace polykde {

struct TestResult {
  double statistic = 0.0;
  std::vector<double> replicates;
  double p_value = 1.0;
  std::uint64_t seed = 0;
  int B = 0;
};

// Pooled sample with class labels; every class must have >= 2 points.
class GroupedSample {
 public:
  GroupedSample(PolySample pooled, int k);
  static GroupedSample from_labels(PolySample pooled);

  const PolySample& pooled() const { return pooled_; }
  int k() const { return k_; }
  const std::vector<int>& labels() const { return *pooled_.labels(); }
  const std::vector<Eigen::Index>& class_sizes() const { return sizes_; }

 private:
  PolySample pooled_;
  int k_;
  std::vector<Eigen::Index> sizes_;
};

// Jensen-Shannon statistic T_{n,JSD}(h) with leave-one-out entropies and
// self terms excluded, all in log space.
double jsd_statistic(const GroupedSample& g, const KernelSpec& spec, const Bandwidths& h);

// Statistic recomputed from shuffled labels; class sizes never change.
using LabelStatistic = std::function<double(const std::vector<int>& labels)>;

// Generic permutation test: B label shuffles of the pooled sample,
// p = B^{-1} #\{T*_b > T\} (strict), deterministic given the seed.
// With plus_one the smoothed (1 + #)/(B + 1) estimate is reported instead.
TestResult permutation_test(const GroupedSample& g, const LabelStatistic& statistic, int B,
                            std::uint64_t seed, bool plus_one = false);

// Closure evaluating T_{n,JSD} from precomputed Gram log-kernel rows; used
// by permutation_test so each replicate costs O(n^2) arithmetic only.
LabelStatistic jsd_label_statistic(const GroupedSample& g, const KernelSpec& spec, const Bandwidths& h);

enum class LocScatter { Location, Scatter };

// Two-sample max-discrepancy statistics across spheres: location
// ||mu_1 - mu_2|| and scatter d_P(Sigma_1, Sigma_2).
double loc_scatter_statistic(const GroupedSample& g, LocScatter which);
double loc_scatter_statistic(const PolySample& pooled, const std::vector<int>& labels, LocScatter which);

// Affine-invariant distance ||log lambda(A^{-1}B)||_2 between SPD matrices,
// via Cholesky whitening and a symmetric eigensolve.
double spd_affine_distance(const Matrix& A, const Matrix& B);

enum class FdrMethod { BenjaminiYekutieli, BenjaminiHochberg };

// Step-up adjusted p-values, Benjamini-Yekutieli by default.
std::vector<double> fdr_adjust(const std::vector<double>& p,
                               FdrMethod method = FdrMethod::BenjaminiYekutieli);

// Driver: optional ROT bandwidth on the pooled sample scaled by c, then the
// JSD permutation test. One result per multiplier, independent substreams.
TestResult k_sample_test(const GroupedSample& g, const KernelSpec& spec, const Bandwidths& h, int B,
                         std::uint64_t seed);
std::vector<TestResult> k_sample_test_rot(const GroupedSample& g, const KernelSpec& spec,
                                          const std::vector<double>& c_multipliers, int B,
                                          std::uint64_t seed);

}  // namespace polykde
