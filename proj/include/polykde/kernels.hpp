#pragma once

#include <span>

#include "polykde/types.hpp"

namespace polykde {

enum class KernelFamily { vMF, Epa, Sfp };
enum class KernelCombine { Product, Spherical };
enum class NormMode { Exact, Asymptotic, Auto };

// Kernel family plus combination rule. For vMF the product and spherically
// symmetric combinations coincide.
struct KernelSpec {
  KernelFamily family = KernelFamily::vMF;
  KernelCombine combine = KernelCombine::Product;
  double upsilon = 100.0;  // sfp only

  static KernelSpec vmf() { return {KernelFamily::vMF, KernelCombine::Product, 0.0}; }
  static KernelSpec epa(KernelCombine c = KernelCombine::Product) { return {KernelFamily::Epa, c, 0.0}; }
  static KernelSpec sfp(double upsilon, KernelCombine c = KernelCombine::Product) {
    if (!(upsilon > 0.0)) throw UnsupportedKernel("sfp kernel requires upsilon > 0");
    return {KernelFamily::Sfp, c, upsilon};
  }
};

// b_d(L), v_d(L) and the mass functional lambda_d(L) for a scalar kernel at
// one effective dimension.
struct KernelMoments {
  double b_d = 0.0;
  double v_d = 0.0;
  double lambda_d = 0.0;
};

// L evaluated at the scaled distances s_j >= 0 (product or spherical rule).
double kernel_eval(const KernelSpec& spec, std::span<const double> s);
double log_kernel_eval(const KernelSpec& spec, std::span<const double> s);

// Scalar kernel L(t) and log L(t) for one nonnegative argument.
double kernel_scalar(KernelFamily family, double upsilon, double t);
double log_kernel_scalar(KernelFamily family, double upsilon, double t);

// log c_{d,L}(h). Exact closed forms where the kernel theory provides them,
// reduced-integral cubature otherwise; Asymptotic returns -log(rho(h) lambda_d(L)).
double log_norm_const(const KernelSpec& spec, const Dims& dims, const Bandwidths& h,
                      NormMode mode = NormMode::Auto);

// Closed-form/quadrature moments at effective dimension d (spherical kernels
// on S^{d} use d = d_tilde via the moment reduction).
KernelMoments kernel_moments(KernelFamily family, double upsilon, int d_effective);

// Moments of the full polysphere kernel: per-block b, scalar v and log lambda.
struct PolyMoments {
  Vector b;          // b_{d,j}(L), length r
  double v = 0.0;    // v_d(L)
  double log_lambda = 0.0;
};
PolyMoments poly_kernel_moments(const KernelSpec& spec, const Dims& dims);

// AMISE kernel constant C_{d,r}(L) (common dimension d, equal bandwidths).
double amise_constant(const KernelSpec& spec, int d, int r);
// c_{d,r} = (dr/4)^{4/(dr+4)} (1 + 4/(dr)).
double amise_prefactor(int d, int r);

// eff_{d,r}(L) relative to the spherically symmetric Epa kernel.
double efficiency(const KernelSpec& spec, int d, int r);

// 1-D normalizing constants on S^d used by samplers and selectors.
double log_norm_const_1d(KernelFamily family, double upsilon, int d, double h);
// log c_d^vMF(kappa), with the kappa = 0 limit 1/omega_d.
double log_vmf_const(int d, double kappa);

}  // namespace polykde
