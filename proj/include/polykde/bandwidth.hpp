#pragma once

#include <string>

#include "polykde/kernels.hpp"
#include "polykde/types.hpp"

namespace polykde {

// r x r curvature matrix R(kappa) of the PvMF reference density, with the
// kappa vector it was built from.
struct CurvatureMatrix {
  Matrix R;
  Vector kappa;
};

struct SelectorResult {
  Bandwidths h = Bandwidths::common(1.0, 1);
  double residual_norm = 0.0;  // norm of the plug-in system at h (ROT)
  double loss = 0.0;           // CV loss / AMISE value where applicable
  int iterations = 0;
  bool converged = true;
  std::string method;
};

// Blockwise vMF concentration MLE: kappa_j = A_{d_j}^{-1}(||mean of block j||),
// with the resultant length clamped to 1 - 1e-12.
Vector kappa_mle(const PolySample& sample);

CurvatureMatrix curvature_matrix(const Vector& kappa, const Dims& dims);

// Marginal rule-of-thumb bandwidth for one sphere (Algorithm step with the
// vMF-kernel closed form).
double rot_marginal_bandwidth(int d, double kappa, Eigen::Index n);

// Plug-in selector: kappa MLE, marginal starters, then damped Newton in log-h
// on the r-dimensional AMISE system for the requested kernel.
SelectorResult rot_bandwidth(const PolySample& sample, const KernelSpec& spec);

// Raw residual of the plug-in system at h (diagnostic; zero at the solution).
Vector rot_system_residual(const CurvatureMatrix& curv, const KernelSpec& spec, const Dims& dims,
                           Eigen::Index n, const Bandwidths& h);

// Equal-bandwidth AMISE closed form given the curvature quadratic form
// b'R(kappa)b, plus the attained AMISE value.
SelectorResult amise_bandwidth(const CurvatureMatrix& curv, const KernelSpec& spec, const Dims& dims,
                               Eigen::Index n);
// Common-dimension variant from a known curvature functional R(nabla^2 f).
SelectorResult amise_bandwidth_common(double curvature_R, const KernelSpec& spec, int d, int r,
                                      Eigen::Index n);

// Closed-form LSCV loss; vMF product kernel only.
double lscv_loss(const PolySample& sample, const KernelSpec& spec, const Bandwidths& h);

// Likelihood cross-validation loss: sum_i log f-hat^{-i}(X_i; h).
double lcv_loss(const PolySample& sample, const KernelSpec& spec, const Bandwidths& h);

// Smallest common bandwidth with finite Epa leave-one-out likelihood.
double critical_lcv_bandwidth(const PolySample& sample);

enum class CvMethod { Lscv, Lcv };
enum class CvSearch { Common, PerSphere };

// Golden-section optimization of the CV loss over a log-scale bracket
// anchored at the ROT bandwidth; per-sphere mode sweeps coordinates.
SelectorResult select_bandwidth_cv(const PolySample& sample, const KernelSpec& spec, CvMethod method,
                                   CvSearch search = CvSearch::Common);

}  // namespace polykde
