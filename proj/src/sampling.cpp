#include "polykde/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "polykde/geometry.hpp"
#include "polykde/parallel.hpp"
#include "polykde/specfun.hpp"

namespace polykde {

namespace sf = specfun;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gamma_draw(double a, RngStream& rng) {
  // Marsaglia-Tsang; a < 1 boosted through Gamma(a+1).
  if (a < 1.0) return gamma_draw(a + 1.0, rng) * std::pow(rng.uniform(), 1.0 / a);
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double beta_symmetric_draw(double a, RngStream& rng) {
  const double g1 = gamma_draw(a, rng);
  const double g2 = gamma_draw(a, rng);
  return g1 / (g1 + g2);
}

// Wood-style envelope rejection for the vMF angular part on S^d.
double sample_vmf_angular(int d, double kappa, RngStream& rng) {
  if (kappa <= 0.0) return 1.0 - 2.0 * beta_symmetric_draw(0.5 * d, rng);
  const double dd = static_cast<double>(d);
  const double b = dd / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dd * dd));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + dd * std::log1p(-x0 * x0);
  for (;;) {
    const double z = beta_symmetric_draw(0.5 * dd, rng);
    const double w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = rng.uniform();
    if (kappa * w + dd * std::log1p(-x0 * w) - c >= std::log(u)) return w;
  }
}

// Largest bandwidth-scaled distance reachable on the law's support.
double support_smax(const AngularLaw& law) { return 2.0 / (law.h * law.h); }

// log of the max over s >= 0 of L_sfp(s) e^{s}: the inflation needed for the
// vMF envelope, zero when the envelope already dominates. The objective is
// concave in s, so bisection on its derivative finds the max.
double sfp_envelope_log_inflation(double upsilon, double s_hi) {
  auto phi = [&](double s) {
    return sf::log_softplus(upsilon * (1.0 - s)) - sf::log_softplus(upsilon) + s;
  };
  auto dphi = [&](double s) {
    const double x = upsilon * (1.0 - s);
    const double sig = 1.0 / (1.0 + std::exp(-x));
    return 1.0 - upsilon * sig / sf::softplus(x);
  };
  if (dphi(0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = s_hi;
  if (dphi(hi) > 0.0) return std::max(0.0, phi(hi));
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dphi(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::max(0.0, phi(0.5 * (lo + hi)));
}

// Acceptance test shared by the 1-D and polysphere AR paths.
bool ar_accept(KernelFamily family, double upsilon, double s, double log_inflation,
               RngStream& rng) {
  const double log_ratio =
      log_kernel_scalar(family, upsilon, s) + s - log_inflation;  // vs vMF envelope e^{-s}
  if (log_ratio > 1e-12)
    throw EnvelopeViolation("acceptance-rejection: kernel exceeded its vMF envelope");
  return std::log(rng.uniform()) <= log_ratio;
}

double epa_quantile_s2(double h, double u) {
  const double h2 = h * h;
  const double m = std::max(-1.0, 1.0 - h2);
  const double disc =
      (h2 - 1.0) * (h2 - 1.0) - m + (m + u * (1.0 - m)) * (2.0 * h2 - 1.0 + m);
  return 1.0 - h2 + std::sqrt(std::max(0.0, disc));
}

}  // namespace

double angular_cdf(const AngularLaw& law, double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  switch (law.family) {
    case KernelFamily::Epa: {
      const double h2 = law.h * law.h;
      const double m = std::max(-1.0, 1.0 - h2);
      if (t <= m) return 0.0;
      const int d = law.d;
      const double log_c = log_norm_const_1d(KernelFamily::Epa, 0.0, d, law.h);
      const double omega_dm1 = sf::sphere_area(d - 1);
      const double omega_d = sf::sphere_area(d);
      const double fd_gap = sf::proj_unif_cdf(d, t) - sf::proj_unif_cdf(d, m);
      const double pow_gap =
          std::pow(1.0 - t * t, 0.5 * d) - std::pow(std::max(0.0, 1.0 - m * m), 0.5 * d);
      const double val = omega_dm1 * std::exp(log_c) / h2 *
                         ((h2 - 1.0) * omega_d / omega_dm1 * fd_gap - pow_gap / d);
      return std::clamp(val, 0.0, 1.0);
    }
    case KernelFamily::Sfp: {
      if (law.d != 2) throw UnsupportedLaw("sfp angular cdf is only available for d = 2");
      const double h2 = law.h * law.h;
      const double u = law.upsilon;
      const double li_lo = -std::exp(sf::log_abs_polylog_neg_exp(2.0, u * (1.0 - 2.0 / h2)));
      const double li_t = -std::exp(sf::log_abs_polylog_neg_exp(2.0, u * (1.0 - (1.0 - t) / h2)));
      const double li_up = -std::exp(sf::log_abs_polylog_neg_exp(2.0, u));
      return std::clamp((li_lo - li_t) / (li_lo - li_up), 0.0, 1.0);
    }
    case KernelFamily::vMF: {
      // Quadrature of e^{kappa(u-1)} (1-u^2)^{d/2-1}, scaled so large kappa
      // cannot overflow; panels refine geometrically toward u = 1.
      auto piece = [&](double a, double b) {
        return sf::gauss_legendre(a, b, [&](double x) {
          return std::exp(law.kappa * (x - 1.0)) * std::pow(1.0 - x * x, 0.5 * law.d - 1.0);
        });
      };
      std::vector<double> edges{-1.0, 1.0};
      double width = std::min(1.0, 0.25 / std::max(1.0, law.kappa));
      while (width < 2.0 && edges.size() < 64) {
        edges.push_back(1.0 - width);
        width *= 2.0;
      }
      std::sort(edges.begin(), edges.end());
      auto integrate = [&](double upper) {
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
          if (edges[k] >= upper) break;
          acc += piece(edges[k], std::min(edges[k + 1], upper));
        }
        return acc;
      };
      return std::clamp(integrate(t) / integrate(1.0), 0.0, 1.0);
    }
  }
  return 0.0;
}

double angular_quantile(const AngularLaw& law, double u) {
  if (!(u > 0.0 && u < 1.0)) throw UnsupportedLaw("angular_quantile: u must lie in (0, 1)");
  if (law.family == KernelFamily::Epa && law.d == 2) return epa_quantile_s2(law.h, u);
  if (law.family == KernelFamily::Sfp && law.d != 2)
    throw UnsupportedLaw("sfp angular quantile is only available for d = 2");
  double lo = -1.0, hi = 1.0;
  if (law.family == KernelFamily::Epa) lo = std::max(-1.0, 1.0 - law.h * law.h);
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    (angular_cdf(law, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sample_angular(const AngularLaw& law, RngStream& rng) {
  switch (law.family) {
    case KernelFamily::vMF:
      return sample_vmf_angular(law.d, law.kappa, rng);
    case KernelFamily::Epa: {
      if (law.d == 2) return epa_quantile_s2(law.h, rng.uniform());
      const double kappa = 1.0 / (law.h * law.h);
      for (int attempt = 0; attempt < 500; ++attempt) {
        const double t = sample_vmf_angular(law.d, kappa, rng);
        const double s = (1.0 - t) * kappa;
        if (ar_accept(KernelFamily::Epa, 0.0, s, 0.0, rng)) return t;
      }
      // Tiny-h regime safety net; in practice acceptance stays high.
      return angular_quantile(law, rng.uniform());
    }
    case KernelFamily::Sfp: {
      if (law.upsilon < 1.0)
        throw UnsupportedLaw("sfp sampling requires upsilon >= 1 for the vMF envelope");
      const double kappa = 1.0 / (law.h * law.h);
      const double log_m = sfp_envelope_log_inflation(law.upsilon, support_smax(law));
      for (;;) {
        const double t = sample_vmf_angular(law.d, kappa, rng);
        const double s = (1.0 - t) * kappa;
        if (ar_accept(KernelFamily::Sfp, law.upsilon, s, log_m, rng)) return t;
      }
    }
  }
  return 1.0;
}

namespace {

// y = t mu + sqrt(1-t^2) * (tangent direction from xi), with the tangent
// frame realized implicitly through the Householder reflection of
// complement_basis (O(d) per draw).
Vector compose_tangent(const Vector& mu, double t, const Vector& xi) {
  const Eigen::Index p = mu.size();
  const double sign = mu[0] >= 0.0 ? 1.0 : -1.0;
  Vector v = mu;
  v[0] += sign;
  const double vtv = v.squaredNorm();
  // w = (0, xi')': reflect w across v.
  double vw = 0.0;
  for (Eigen::Index i = 1; i < p; ++i) vw += v[i] * xi[i - 1];
  Vector tangent = -2.0 * vw / vtv * v;
  for (Eigen::Index i = 1; i < p; ++i) tangent[i] += xi[i - 1];
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  return t * mu + s * tangent;
}

}  // namespace

Vector sample_vmf(const Vector& mu, double kappa, RngStream& rng) {
  const int d = static_cast<int>(mu.size()) - 1;
  const double t = sample_vmf_angular(d, kappa, rng);
  const Vector xi = sample_uniform_sphere(d - 1, rng);
  return compose_tangent(mu, t, xi);
}

Vector sample_kernel_polysphere(const KernelSpec& spec, const PolyPoint& mu, const Dims& dims,
                                const Bandwidths& h, RngStream& rng) {
  Vector out(dims.ambient());
  const bool product_like =
      spec.family == KernelFamily::vMF || spec.combine == KernelCombine::Product;
  if (product_like) {
    for (int j = 0; j < dims.r(); ++j) {
      const Vector mu_j = mu.block(dims, j);
      AngularLaw law{dims.d(j), spec.family, spec.upsilon, h[j], 1.0 / (h[j] * h[j])};
      const double t = sample_angular(law, rng);
      const Vector xi = sample_uniform_sphere(dims.d(j) - 1, rng);
      out.segment(dims.offset(j), dims.block_size(j)) = compose_tangent(mu_j, t, xi);
    }
    return out;
  }
  // Spherically symmetric Epa/sfp: acceptance-rejection against the product
  // vMF envelope on the whole polysphere.
  double s_hi = 0.0;
  for (int j = 0; j < dims.r(); ++j) s_hi += 2.0 / (h[j] * h[j]);
  const double log_m = spec.family == KernelFamily::Sfp
                           ? sfp_envelope_log_inflation(spec.upsilon, s_hi)
                           : 0.0;
  if (spec.family == KernelFamily::Sfp && spec.upsilon < 1.0)
    throw UnsupportedLaw("sfp sampling requires upsilon >= 1 for the vMF envelope");
  for (;;) {
    double s_total = 0.0;
    for (int j = 0; j < dims.r(); ++j) {
      const Vector mu_j = mu.block(dims, j);
      const double kappa = 1.0 / (h[j] * h[j]);
      const double t = sample_vmf_angular(dims.d(j), kappa, rng);
      const Vector xi = sample_uniform_sphere(dims.d(j) - 1, rng);
      out.segment(dims.offset(j), dims.block_size(j)) = compose_tangent(mu_j, t, xi);
      s_total += (1.0 - t) * kappa;
    }
    if (ar_accept(spec.family, spec.upsilon, s_total, log_m, rng)) return out;
  }
}

PolySample sample_kde(const KdeModel& model, Eigen::Index m, RngStream& rng) {
  const Dims& dims = model.sample().dims();
  Matrix draws(m, dims.ambient());
  const Eigen::Index n = model.sample().n();
  parallel_for(m, [&](std::int64_t i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    const Eigen::Index center = static_cast<Eigen::Index>(sub.below(static_cast<std::uint64_t>(n)));
    const PolyPoint mu = model.sample().point(center);
    draws.row(i) = sample_kernel_polysphere(model.spec(), mu, dims, model.h(), sub).transpose();
  });
  return PolySample(std::move(draws), dims);
}

}  // namespace polykde
