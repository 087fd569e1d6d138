#include "polykde/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "polykde/specfun.hpp"

namespace polykde {

namespace sf = specfun;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct LogMoments {
  double log_b, log_v, log_lambda;
};

// log-space moments of the scalar kernel at effective dimension d.
LogMoments log_moments(KernelFamily family, double upsilon, int d) {
  switch (family) {
    case KernelFamily::vMF:
      return {-std::log(2.0), -d * std::log(2.0 * std::sqrt(kPi)), 0.5 * d * std::log(2.0 * kPi)};
    case KernelFamily::Epa:
      return {-std::log(d + 4.0),
              std::log(4.0) + std::lgamma(0.5 * d + 2.0) - 0.5 * d * std::log(2.0 * kPi) -
                  std::log(d + 4.0),
              0.5 * d * std::log(2.0 * kPi) - std::lgamma(0.5 * d) + std::log(4.0) -
                  std::log(static_cast<double>(d)) - std::log(d + 2.0)};
    case KernelFamily::Sfp: {
      const double li1 = sf::log_abs_polylog_neg_exp(0.5 * d + 1.0, upsilon);
      const double li2 = sf::log_abs_polylog_neg_exp(0.5 * d + 2.0, upsilon);
      const double logJ = sf::log_J(d, upsilon);
      const double log_b = li2 - li1 - std::log(2.0 * upsilon);
      const double log_v = d * std::log(upsilon) + logJ - 0.5 * d * std::log(2.0 * kPi) -
                           std::lgamma(0.5 * d) - 2.0 * li1;
      const double log_lambda =
          0.5 * d * std::log(2.0 * kPi / upsilon) + li1 - std::log(sf::softplus(upsilon));
      return {log_b, log_v, log_lambda};
    }
  }
  return {};
}

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// --- reduced-integral cubature --------------------------------------------
//
// c^{-1} = prod_j omega_{d_j-1} * int_{[-1,1]^r} L(s(t)) prod_j (1-t_j^2)^{d_j/2-1} dt,
// s_j = (1-t_j)/h_j^2. Each axis is split at t = 0 with the substitutions
// u = sqrt(1-t) and q = sqrt(1+t), which remove both endpoint singularities;
// panels refine geometrically toward t = 1 where small-h kernels concentrate.

struct Axis {
  std::vector<double> s;  // scaled distance at each node
  std::vector<double> w;  // quadrature weight including the (1-t^2) factor
};

Axis make_axis(int d, double h, int nodes_per_panel) {
  Axis ax;
  std::vector<double> edges{0.0};
  const double start = std::clamp(0.25 * h, 1e-3, 0.25);
  double e = start;
  while (e < 1.0) {
    edges.push_back(e);
    e *= 2.0;
  }
  edges.push_back(1.0);

  std::vector<double> gx, gw;
  sf::gauss_legendre_nodes(nodes_per_panel, gx, gw);

  // u-side: t = 1 - u^2, weight 2 u^{d-1} (2-u^2)^{d/2-1}, s = u^2/h^2.
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    for (int i = 0; i < nodes_per_panel; ++i) {
      const double u = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
      const double wt = 0.5 * (b - a) * gw[i] * 2.0 * std::pow(u, d - 1.0) *
                        std::pow(2.0 - u * u, 0.5 * d - 1.0);
      ax.s.push_back(u * u / (h * h));
      ax.w.push_back(wt);
    }
  }
  // q-side: t = q^2 - 1, weight 2 q^{d-1} (2-q^2)^{d/2-1}, s = (2-q^2)/h^2.
  const int qpanels = 4;
  for (int p = 0; p < qpanels; ++p) {
    const double a = static_cast<double>(p) / qpanels, b = static_cast<double>(p + 1) / qpanels;
    for (int i = 0; i < nodes_per_panel; ++i) {
      const double q = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
      const double wt = 0.5 * (b - a) * gw[i] * 2.0 * std::pow(q, d - 1.0) *
                        std::pow(2.0 - q * q, 0.5 * d - 1.0);
      ax.s.push_back((2.0 - q * q) / (h * h));
      ax.w.push_back(wt);
    }
  }
  return ax;
}

// Tensor cubature of the reduced integral at one resolution.
double cubature_pass(const KernelSpec& spec, const Dims& dims, const Bandwidths& h, int nodes) {
  const int r = dims.r();
  std::vector<Axis> axes;
  axes.reserve(r);
  for (int j = 0; j < r; ++j) axes.push_back(make_axis(dims.d(j), h[j], nodes));

  std::vector<std::size_t> idx(r, 0);
  std::vector<double> s(r);
  long double total = 0.0L;
  bool done = false;
  while (!done) {
    double wt = 1.0;
    for (int j = 0; j < r; ++j) {
      wt *= axes[j].w[idx[j]];
      s[j] = axes[j].s[idx[j]];
    }
    total += wt * kernel_eval(spec, s);
    for (int j = r - 1; j >= 0; --j) {
      if (++idx[j] < axes[j].s.size()) break;
      idx[j] = 0;
      if (j == 0) done = true;
    }
  }
  double log_omega = 0.0;
  for (int j = 0; j < r; ++j) log_omega += sf::log_sphere_area(dims.d(j) - 1);
  return static_cast<double>(total) * std::exp(log_omega);
}

// log c: two-resolution tensor cubature with a relative tolerance check.
double log_norm_const_cubature(const KernelSpec& spec, const Dims& dims, const Bandwidths& h) {
  const double coarse = cubature_pass(spec, dims, h, 32);
  const double fine = cubature_pass(spec, dims, h, 64);
  if (!(fine > 0.0) || std::abs(fine - coarse) > 1e-8 * std::abs(fine))
    throw QuadratureFailure("log_norm_const: cubature did not reach 1e-8 relative accuracy");
  return -std::log(fine);
}

// Exact Epa c^{-1} on S^d, any h.
double epa_inv_const(int d, double h) {
  const double h2 = h * h;
  const double omega_d = sf::sphere_area(d);
  if (h2 >= 2.0) return omega_d * (1.0 - 1.0 / h2);
  const double m = 1.0 - h2;
  const double omega_dm1 = sf::sphere_area(d - 1);
  const double tail = 1.0 - sf::proj_unif_cdf(d, m);
  const double one_minus_m2 = h2 * (2.0 - h2);  // 1 - m^2 without cancellation
  return omega_d * (1.0 - 1.0 / h2) * tail +
         omega_dm1 * std::pow(one_minus_m2, 0.5 * d) / (d * h2);
}

// Exact sfp log c on S^2 via the dilogarithm difference.
double sfp2_log_const(double upsilon, double h) {
  const double h2 = h * h;
  const double w_low = upsilon * (1.0 - 2.0 / h2);
  // Li_2 at both arguments is negative; the difference below is positive.
  const double li_low = -std::exp(sf::log_abs_polylog_neg_exp(2.0, w_low));
  const double li_up = -std::exp(sf::log_abs_polylog_neg_exp(2.0, upsilon));
  const double diff = li_low - li_up;
  const double log_inv = std::log(2.0 * kPi) + 2.0 * std::log(h) + std::log(diff) -
                         std::log(sf::softplus(upsilon)) - std::log(upsilon);
  return -log_inv;
}

bool all_d_equal(const Dims& dims, int value) {
  for (int j = 0; j < dims.r(); ++j)
    if (dims.d(j) != value) return false;
  return true;
}

bool common_bandwidth(const Bandwidths& h) {
  for (int j = 1; j < h.r(); ++j)
    if (h[j] != h[0]) return false;
  return true;
}

// Prop.-style exact spherical Epa constant on (S^2)^r with common h;
// returns c^{-1} or a negative value when cancellation is too severe.
double spherical_epa2_inv_const(int r, double h) {
  const double h2 = h * h;
  double lead = r * (std::log(2.0 * kPi) + 2.0 * std::log(h)) - std::lgamma(r + 2.0);
  if (h2 < 2.0) return std::exp(lead);
  const int l0 = std::max(0, static_cast<int>(std::ceil(r - 0.5 * h2)));
  double sum = 0.0, max_term = 0.0;
  for (int l = l0; l <= r; ++l) {
    const double base = 1.0 - 2.0 * (r - l) / h2;
    const double term = binomial(r, l) * ((r - l) % 2 == 0 ? 1.0 : -1.0) *
                        std::pow(base, r + 1.0);
    sum += term;
    max_term = std::max(max_term, std::abs(term));
  }
  if (!(sum > 0.0) || max_term > 1e10 * sum) return -1.0;
  return std::exp(lead) * sum;
}

double spherical_sfp2_inv_const(int r, double upsilon, double h) {
  const double b = upsilon / (h * h);
  const double a = upsilon - r * b;
  double sum = 0.0, max_term = 0.0;
  for (int l = 0; l <= r; ++l) {
    const double w = a + b * (2.0 * l - r);
    const double li = -std::exp(sf::log_abs_polylog_neg_exp(r + 1.0, std::max(w, -745.0)));
    const double term = binomial(r, l) * (l % 2 == 0 ? 1.0 : -1.0) * li;
    sum += term;
    max_term = std::max(max_term, std::abs(term));
  }
  sum *= (r % 2 == 0 ? -1.0 : 1.0);
  if (!(sum > 0.0) || max_term > 1e10 * sum) return -1.0;
  const double lead = r * (std::log(2.0 * kPi) + 2.0 * std::log(h)) - r * std::log(upsilon) -
                      std::log(sf::softplus(upsilon));
  return std::exp(lead) * sum;
}

}  // namespace

double kernel_scalar(KernelFamily family, double upsilon, double t) {
  switch (family) {
    case KernelFamily::vMF:
      return std::exp(-t);
    case KernelFamily::Epa:
      return t < 1.0 ? 1.0 - t : 0.0;
    case KernelFamily::Sfp:
      return sf::softplus(upsilon * (1.0 - t)) / sf::softplus(upsilon);
  }
  return 0.0;
}

double log_kernel_scalar(KernelFamily family, double upsilon, double t) {
  switch (family) {
    case KernelFamily::vMF:
      return -t;
    case KernelFamily::Epa:
      return t < 1.0 ? std::log1p(-t) : -kInf;
    case KernelFamily::Sfp:
      return sf::log_softplus(upsilon * (1.0 - t)) - sf::log_softplus(upsilon);
  }
  return -kInf;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> s) {
  if (spec.family == KernelFamily::vMF || spec.combine == KernelCombine::Spherical) {
    double total = 0.0;
    for (double sj : s) total += sj;
    return kernel_scalar(spec.family, spec.upsilon, total);
  }
  double prod = 1.0;
  for (double sj : s) {
    prod *= kernel_scalar(spec.family, spec.upsilon, sj);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

double log_kernel_eval(const KernelSpec& spec, std::span<const double> s) {
  if (spec.family == KernelFamily::vMF || spec.combine == KernelCombine::Spherical) {
    double total = 0.0;
    for (double sj : s) total += sj;
    return log_kernel_scalar(spec.family, spec.upsilon, total);
  }
  double acc = 0.0;
  for (double sj : s) {
    acc += log_kernel_scalar(spec.family, spec.upsilon, sj);
    if (acc == -kInf) return -kInf;
  }
  return acc;
}

double log_vmf_const(int d, double kappa) {
  if (kappa <= 0.0) return -sf::log_sphere_area(d);
  return 0.5 * (d - 1) * std::log(kappa) - 0.5 * (d + 1) * std::log(2.0 * kPi) -
         sf::log_bessel_i(0.5 * (d - 1), kappa);
}

double log_norm_const_1d(KernelFamily family, double upsilon, int d, double h) {
  switch (family) {
    case KernelFamily::vMF: {
      if (d == 2) {
        // Stable small-h form on S^2.
        return -(std::log(2.0 * kPi) + 2.0 * std::log(h) + std::log1p(-std::exp(-2.0 / (h * h))));
      }
      const double kappa = 1.0 / (h * h);
      return log_vmf_const(d, kappa) + kappa;
    }
    case KernelFamily::Epa:
      return -std::log(epa_inv_const(d, h));
    case KernelFamily::Sfp: {
      if (d == 2) return sfp2_log_const(upsilon, h);
      // No closed form: 1-D reduced-integral quadrature.
      Dims dims({d});
      return log_norm_const_cubature(KernelSpec::sfp(upsilon), dims, Bandwidths::common(h, 1));
    }
  }
  return 0.0;
}

double log_norm_const(const KernelSpec& spec, const Dims& dims, const Bandwidths& h, NormMode mode) {
  if (h.r() != dims.r()) throw DimensionMismatch("log_norm_const: bandwidth length != r");
  if (mode == NormMode::Asymptotic) {
    const PolyMoments m = poly_kernel_moments(spec, dims);
    return -(h.log_rho(dims) + m.log_lambda);
  }

  const bool product_like =
      spec.family == KernelFamily::vMF || spec.combine == KernelCombine::Product;
  if (product_like) {
    double total = 0.0;
    for (int j = 0; j < dims.r(); ++j)
      total += log_norm_const_1d(spec.family, spec.upsilon, dims.d(j), h[j]);
    return total;
  }

  // Spherically symmetric Epa/sfp.
  if (all_d_equal(dims, 2) && common_bandwidth(h)) {
    const double inv = spec.family == KernelFamily::Epa
                           ? spherical_epa2_inv_const(dims.r(), h[0])
                           : spherical_sfp2_inv_const(dims.r(), spec.upsilon, h[0]);
    if (inv > 0.0) return -std::log(inv);
  }

  int max_d = 0;
  double min_h = kInf;
  for (int j = 0; j < dims.r(); ++j) {
    max_d = std::max(max_d, dims.d(j));
    min_h = std::min(min_h, h[j]);
  }
  const bool cubature_ok = dims.r() <= 3 && dims.r() * max_d <= 8 && min_h > 0.05;
  if (cubature_ok) return log_norm_const_cubature(spec, dims, h);
  if (mode == NormMode::Exact)
    throw QuadratureFailure("log_norm_const: no exact form and cubature infeasible here");
  const PolyMoments m = poly_kernel_moments(spec, dims);
  return -(h.log_rho(dims) + m.log_lambda);
}

KernelMoments kernel_moments(KernelFamily family, double upsilon, int d_effective) {
  if (d_effective < 1) throw DimensionMismatch("kernel_moments: d must be >= 1");
  const LogMoments lm = log_moments(family, upsilon, d_effective);
  return {std::exp(lm.log_b), std::exp(lm.log_v), std::exp(lm.log_lambda)};
}

PolyMoments poly_kernel_moments(const KernelSpec& spec, const Dims& dims) {
  PolyMoments out;
  out.b = Vector(dims.r());
  if (spec.combine == KernelCombine::Spherical && spec.family != KernelFamily::vMF) {
    const LogMoments lm = log_moments(spec.family, spec.upsilon, dims.d_tilde());
    out.b.setConstant(std::exp(lm.log_b));
    out.v = std::exp(lm.log_v);
    out.log_lambda = lm.log_lambda;
    return out;
  }
  double log_v = 0.0, log_lambda = 0.0;
  for (int j = 0; j < dims.r(); ++j) {
    const LogMoments lm = log_moments(spec.family, spec.upsilon, dims.d(j));
    out.b[j] = std::exp(lm.log_b);
    log_v += lm.log_v;
    log_lambda += lm.log_lambda;
  }
  out.v = std::exp(log_v);
  out.log_lambda = log_lambda;
  return out;
}

namespace {

// log C_{d,r}(L): AMISE kernel constant at common dimension d.
double log_amise_constant(const KernelSpec& spec, int d, int r) {
  const int dr = d * r;
  if (spec.combine == KernelCombine::Spherical && spec.family != KernelFamily::vMF) {
    const LogMoments lm = log_moments(spec.family, spec.upsilon, dr);
    return (4.0 * lm.log_v + 2.0 * dr * lm.log_b) / (dr + 4.0);
  }
  const LogMoments lm = log_moments(spec.family, spec.upsilon, d);
  return (4.0 * r * lm.log_v + 2.0 * dr * lm.log_b) / (dr + 4.0);
}

}  // namespace

double amise_constant(const KernelSpec& spec, int d, int r) {
  return std::exp(log_amise_constant(spec, d, r));
}

double amise_prefactor(int d, int r) {
  const double dr = static_cast<double>(d) * r;
  return std::pow(0.25 * dr, 4.0 / (dr + 4.0)) * (1.0 + 4.0 / dr);
}

double efficiency(const KernelSpec& spec, int d, int r) {
  if (spec.family == KernelFamily::Epa && spec.combine == KernelCombine::Spherical) return 1.0;
  const double dr = static_cast<double>(d) * r;
  const double log_ref = log_amise_constant(KernelSpec::epa(KernelCombine::Spherical), d, r);
  const double log_eff = (dr + 4.0) / 4.0 * (log_ref - log_amise_constant(spec, d, r));
  return std::exp(log_eff);
}

}  // namespace polykde
