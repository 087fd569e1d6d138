#pragma once

#include "polykde/kde.hpp"
#include "polykde/kernels.hpp"
#include "polykde/rng.hpp"
#include "polykde/types.hpp"

namespace polykde {

// Law of the angular part T = Y'mu on [max(m_h, -1), 1] for a normalized
// kernel on S^d: f(t) proportional to L((1-t)/h^2) (1-t^2)^{d/2-1}.
struct AngularLaw {
  int d = 2;
  KernelFamily family = KernelFamily::Epa;
  double upsilon = 0.0;  // sfp
  double h = 1.0;        // Epa/sfp bandwidth
  double kappa = 0.0;    // vMF concentration

  static AngularLaw vmf(int d, double kappa) { return {d, KernelFamily::vMF, 0.0, 0.0, kappa}; }
  static AngularLaw epa(int d, double h) { return {d, KernelFamily::Epa, 0.0, h, 0.0}; }
  static AngularLaw sfp(int d, double upsilon, double h) { return {d, KernelFamily::Sfp, upsilon, h, 0.0}; }
};

double angular_cdf(const AngularLaw& law, double t);
double angular_quantile(const AngularLaw& law, double u);
// One draw of T (closed-form inverse, rejection, or bisection as available).
double sample_angular(const AngularLaw& law, RngStream& rng);

// Exact vMF draw on S^d via the tangent-normal decomposition with a
// Wood-style envelope for the angular part. kappa = 0 gives the uniform law.
Vector sample_vmf(const Vector& mu, double kappa, RngStream& rng);

// One draw from the normalized kernel density L_h(., mu) on the polysphere.
// Product kernels sample blocks independently; spherical kernels use
// acceptance-rejection from the product vMF envelope.
Vector sample_kernel_polysphere(const KernelSpec& spec, const PolyPoint& mu, const Dims& dims,
                                const Bandwidths& h, RngStream& rng);

// m iid draws from the fitted mixture f-hat: pick a center uniformly, then
// sample its kernel bump. Deterministic given the seed and thread count.
PolySample sample_kde(const KdeModel& model, Eigen::Index m, RngStream& rng);

}  // namespace polykde
