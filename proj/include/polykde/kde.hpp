#pragma once

#include <vector>

#include "polykde/kernels.hpp"
#include "polykde/types.hpp"

namespace polykde {

// Fitted estimator: sample, bandwidths, kernel and the cached log normalizing
// constant. With uniform_offset the reported log-density is taken with
// respect to the uniform measure 1/omega_d (adds log omega_d).
class KdeModel {
 public:
  KdeModel(PolySample sample, Bandwidths h, KernelSpec spec,
           std::optional<bool> uniform_offset = std::nullopt);

  const PolySample& sample() const { return sample_; }
  const Bandwidths& h() const { return h_; }
  const KernelSpec& spec() const { return spec_; }
  double log_c() const { return log_c_; }
  double log_omega() const { return log_omega_; }
  bool uniform_offset() const { return uniform_offset_; }

  // log kernel value log L(s(x, X_i)), without the normalizing constant.
  double log_kernel_term(const double* x, Eigen::Index i) const;

 private:
  PolySample sample_;
  Bandwidths h_;
  KernelSpec spec_;
  double log_c_;
  double log_omega_;
  bool uniform_offset_;
};

// log f-hat(x; h); -inf when a compact kernel vanishes over the whole sample.
double log_kde(const KdeModel& model, const PolyPoint& x);

// Batch evaluation, OpenMP over evaluation points; per-point accumulation is
// serial so results are identical for any thread count.
std::vector<double> log_kde_batch(const KdeModel& model, const Matrix& at);

// Plain double loop kept as the reference for the parallel path.
std::vector<double> log_kde_batch_serial(const KdeModel& model, const Matrix& at);

// Leave-one-out log estimator ell_i = log f-hat^{-i}(X_i; h), length n.
std::vector<double> loo_log_kde(const KdeModel& model);
std::vector<double> loo_log_kde_serial(const KdeModel& model);

// Rank 1..n by decreasing leave-one-out log-density; ties broken by index.
// With use_loo = false the self term enters each density instead.
std::vector<int> rank_by_density(const KdeModel& model, bool use_loo = true);

}  // namespace polykde
