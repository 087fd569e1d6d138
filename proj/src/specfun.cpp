#include "polykde/specfun.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "polykde/errors.hpp"

namespace polykde::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Gauss64 {
  std::vector<double> x, w;
  Gauss64() { gauss_legendre_nodes(64, x, w); }
};

const Gauss64& gauss64() {
  static const Gauss64 g;
  return g;
}

// eta(2k) = (1 - 2^{1-2k}) zeta(2k); eta(0) = 1/2. Closed forms through
// zeta(20); the tail of the direct series is negligible past that.
double dirichlet_eta_even(int k) {
  if (k == 0) return 0.5;
  const double s = 2.0 * k;
  static const double zeta_table[] = {
      1.6449340668482264365,    // zeta(2)
      1.0823232337111381916,    // zeta(4)
      1.0173430619844491397,    // zeta(6)
      1.0040773561979443394,    // zeta(8)
      1.0009945751278180853,    // zeta(10)
      1.0002460865533080483,    // zeta(12)
      1.0000612481350587048,    // zeta(14)
      1.0000152822594086519,    // zeta(16)
      1.0000038172932649998,    // zeta(18)
      1.0000009539620338728,    // zeta(20)
  };
  double zeta;
  if (k <= 10) {
    zeta = zeta_table[k - 1];
  } else {
    zeta = 1.0;
    for (int n = 2; n <= 8; ++n) zeta += std::pow(static_cast<double>(n), -s);
  }
  return (1.0 - std::pow(2.0, 1.0 - s)) * zeta;
}

}  // namespace

void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  // Newton on Legendre P_n from the Chebyshev initial guess.
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

double gauss_legendre(double a, double b, const std::function<double(double)>& f) {
  const auto& g = gauss64();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 64; ++i) s += g.w[i] * f(mid + half * g.x[i]);
  return s * half;
}

double log_sphere_area(int d) {
  return std::log(2.0) + 0.5 * (d + 1) * std::log(kPi) - std::lgamma(0.5 * (d + 1));
}

double sphere_area(int d) { return std::exp(log_sphere_area(d)); }

namespace {

// Power series sum with periodic rescaling; valid for any x, O(x) terms.
double log_bessel_series(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0, offset = 0.0;
  for (int k = 1; k < 200000; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (term < sum * 1e-18) break;
    if (sum > 1e250) {
      sum *= 1e-250;
      term *= 1e-250;
      offset += 250.0 * std::log(10.0);
    }
  }
  return nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) + std::log(sum) + offset;
}

// Hankel large-argument expansion of the scaled function I_nu(x) e^{-x};
// requires x >> nu^2.
double log_bessel_hankel(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  double prev = kInf;
  for (int k = 1; k <= 40; ++k) {
    const double f = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    term *= -f;
    if (std::abs(term) > prev) break;  // asymptotic: stop at the smallest term
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-18) break;
  }
  return x - 0.5 * std::log(2.0 * kPi * x) + std::log(sum);
}

bool is_half_integer(double nu) {
  const double two = 2.0 * nu;
  return std::abs(two - std::round(two)) < 1e-12 && std::abs(nu - std::round(nu)) > 0.25;
}

// Scaled sinh/cosh recurrence for half-integer orders; stable for x >~ nu^2.
double log_bessel_half_integer(double nu, double x) {
  const double scale = 1.0 / std::sqrt(2.0 * kPi * x);
  double lo = (1.0 + std::exp(-2.0 * x)) * scale;   // I_{-1/2} e^{-x}
  double hi = -std::expm1(-2.0 * x) * scale;        // I_{+1/2} e^{-x}
  double order = 0.5;
  while (order < nu - 0.25) {
    const double next = lo - (2.0 * order / x) * hi;
    lo = hi;
    hi = next;
    order += 1.0;
  }
  if (hi <= 0.0) return -kInf;  // cancellation guard; callers avoid this regime
  return x + std::log(hi);
}

}  // namespace

double log_bessel_i(double nu, double x) {
  if (nu < 0.0) throw RhoOutOfRange("log_bessel_i: order must be nonnegative");
  if (x < 0.0) throw RhoOutOfRange("log_bessel_i: argument must be nonnegative");
  if (x == 0.0) return nu == 0.0 ? 0.0 : -kInf;
  if (is_half_integer(nu) && x >= 10.0 + nu * nu) return log_bessel_half_integer(nu, x);
  if (x >= 30.0 && x >= 3.0 * nu * nu + 30.0) return log_bessel_hankel(nu, x);
  return log_bessel_series(nu, x);
}

namespace {

// I_{nu+1}(x)/I_nu(x) by the continued fraction 1/(b_1 + 1/(b_2 + ...)),
// b_k = 2(nu+k)/x (modified Lentz).
double bessel_ratio_cf(double nu, double x) {
  const double tiny = 1e-300;
  double f = tiny, C = tiny, D = 0.0;
  for (int k = 1; k < 1000000; ++k) {
    const double b = 2.0 * (nu + k) / x;
    D = b + D;
    if (D == 0.0) D = tiny;
    C = b + 1.0 / C;
    if (C == 0.0) C = tiny;
    D = 1.0 / D;
    const double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

// Ratio of two Hankel sums, accurate when x >> nu^2.
double bessel_ratio_asymptotic(double nu, double x) {
  auto hankel_sum = [&](double order) {
    const double mu = 4.0 * order * order;
    double term = 1.0, sum = 1.0, prev = kInf;
    for (int k = 1; k <= 30; ++k) {
      term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
      if (std::abs(term) > prev) break;
      sum += term;
      prev = std::abs(term);
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  };
  return hankel_sum(nu + 1.0) / hankel_sum(nu);
}

}  // namespace

double bessel_ratio_A(int d, double x) {
  if (d < 1) throw RhoOutOfRange("bessel_ratio_A: d must be >= 1");
  if (!(x > 0.0)) return 0.0;
  const double nu = 0.5 * (d - 1);
  if (x > 1e4 && x > 100.0 * (nu + 1.0) * (nu + 1.0)) return bessel_ratio_asymptotic(nu, x);
  return bessel_ratio_cf(nu, x);
}

double inv_bessel_ratio(int d, double rho) {
  if (rho < 0.0 || rho >= 1.0)
    throw RhoOutOfRange("inv_bessel_ratio: rho must lie in [0, 1)");
  if (rho == 0.0) return 0.0;
  // Standard concentration starter, then safeguarded Newton with
  // A' = 1 - A^2 - d A / x.
  double x = rho * (d + 1.0 - rho * rho) / (1.0 - rho * rho);
  double lo = 0.0, hi = kInf;
  for (int it = 0; it < 50; ++it) {
    const double A = bessel_ratio_A(d, x);
    const double res = A - rho;
    if (std::abs(res) <= 1e-13 * rho) break;
    if (res > 0.0)
      hi = x;
    else
      lo = x;
    const double Ap = 1.0 - A * A - d * A / x;
    double next = x - res / Ap;
    if (!(next > lo && (next < hi))) next = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

namespace {

// int_0^inf t^{s-1} / (1 + e^{t-w}) dt, composite Gauss-Legendre.
double fermi_dirac_integral(double s, double w) {
  double total = 0.0;
  auto f = [&](double t) { return std::pow(t, s - 1.0) / (1.0 + std::exp(t - w)); };
  const double head = std::max(w, 0.0);
  // Bulk [0, w] in panels of width <= 10; substitution t = u^2 near zero
  // keeps the s < 2 endpoint behavior polynomial.
  if (head > 0.0) {
    const double split = std::min(1.0, head);
    total += gauss_legendre(0.0, std::sqrt(split), [&](double u) { return 2.0 * u * f(u * u); });
    double a = split;
    while (a < head - 1e-14) {
      const double b = std::min(a + 10.0, head);
      total += gauss_legendre(a, b, f);
      a = b;
    }
  }
  // Decaying tail beyond max(w, 0).
  double a = head;
  for (int p = 0; p < 8; ++p) {
    const double b = a + 10.0;
    total += gauss_legendre(a, b, f);
    a = b;
  }
  return total;
}

// log |Li_s(-e^w)| for w > 50 by the even-eta expansion; exact for integer s
// up to the exponentially small reflection term, which is added for integer s.
double log_abs_polylog_asymptotic(double s, double w) {
  const double lg = std::lgamma(s + 1.0);
  const double logw = std::log(w);
  double sum = 0.0, prev = kInf;
  for (int k = 0; k <= 60; ++k) {
    const double arg = s + 1.0 - 2.0 * k;
    const double log_scale = lg - 2.0 * k * logw;
    double term;
    if (arg > 0.0) {
      term = 2.0 * dirichlet_eta_even(k) * std::exp(log_scale - std::lgamma(arg));
    } else if (std::abs(arg - std::round(arg)) < 1e-12) {
      term = 0.0;  // 1/Gamma pole: the expansion terminates for integer s
    } else {
      term = 2.0 * dirichlet_eta_even(k) * std::exp(log_scale) / std::tgamma(arg);
    }
    if (k >= 2 && std::abs(term) > prev) break;  // asymptotic tail turned around
    sum += term;
    if (term != 0.0) prev = std::abs(term);
    if (k > 0 && std::abs(term) < std::abs(sum) * 1e-18) break;
  }
  // Reflection correction -(-1)^s Li_s(-e^{-w}) for integer s.
  if (std::abs(s - std::round(s)) < 1e-12) {
    const int si = static_cast<int>(std::round(s));
    const double sign = si % 2 == 0 ? 1.0 : -1.0;
    // Li_s(-e^{-w}) = -e^{-w} + O(e^{-2w}).
    sum += sign * std::exp(-w + lg - s * logw);
  }
  return s * logw - lg + std::log(sum);
}

}  // namespace

double log_abs_polylog_neg_exp(double s, double w) {
  if (!(s > 0.0)) throw RhoOutOfRange("polylog: s must be > 0");
  if (w > 50.0) return log_abs_polylog_asymptotic(s, w);
  if (w > -0.6931) {
    // |Li_s(-e^w)| = F_{s-1}(w) / Gamma(s), the complete Fermi-Dirac integral.
    return std::log(fermi_dirac_integral(s, w)) - std::lgamma(s);
  }
  // |z| = e^w <= 1/2: alternating series.
  const double z = -std::exp(w);
  if (z == 0.0) return -kInf;
  double sum = 0.0, zk = 1.0;
  for (int k = 1; k < 500; ++k) {
    zk *= z;
    const double term = zk / std::pow(static_cast<double>(k), s);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::log(-sum);
}

double polylog(double s, double z) {
  if (!(s > 0.0)) throw RhoOutOfRange("polylog: s must be > 0");
  if (z >= 1.0) throw RhoOutOfRange("polylog: z must be < 1");
  if (z == 0.0) return 0.0;
  if (std::abs(s - 1.0) < 1e-14) return -std::log1p(-z);
  if (z <= -0.5) return -std::exp(log_abs_polylog_neg_exp(s, std::log(-z)));
  double sum = 0.0, zk = 1.0;
  for (int k = 1; k < 100000; ++k) {
    zk *= z;
    const double term = zk / std::pow(static_cast<double>(k), s);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double log_J(double d, double v) {
  // J_d(v) = 2 int_0^inf sfp(v(1-u^2))^2 u^{d-1} du  (t = u^2).
  auto g = [&](double u) {
    const double sp = softplus(v * (1.0 - u * u));
    return 2.0 * sp * sp * std::pow(u, d - 1.0);
  };
  const double cut = 45.0 / v;
  double total = 0.0;
  if (cut < 1.0) {
    const double u1 = std::sqrt(1.0 - cut);
    const double u2 = std::sqrt(1.0 + cut);
    // Smooth bulk, transition band around u = 1, then a negligible tail.
    const int bulk_panels = 4;
    for (int p = 0; p < bulk_panels; ++p)
      total += gauss_legendre(u1 * p / bulk_panels, u1 * (p + 1) / bulk_panels, g);
    total += gauss_legendre(u1, 1.0, g);
    total += gauss_legendre(1.0, u2, g);
  } else {
    const double u2 = std::sqrt(1.0 + cut);
    const int panels = 6;
    for (int p = 0; p < panels; ++p)
      total += gauss_legendre(u2 * p / panels, u2 * (p + 1) / panels, g);
  }
  return std::log(total);
}

double inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  // Continued fraction for the incomplete beta (Lentz).
  auto betacf = [&](double aa, double bb, double xx) {
    const double tiny = 1e-300;
    const double qab = aa + bb, qap = aa + 1.0, qam = aa - 1.0;
    double c = 1.0, d = 1.0 - qab * xx / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
      const int m2 = 2 * m;
      double num = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
      d = 1.0 + num * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + num / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      h *= d * c;
      num = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
      d = 1.0 + num * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + num / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double delta = d * c;
      h *= delta;
      if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h;
  };
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * betacf(a, b, x) / a;
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        b * std::log1p(-x) + a * std::log(x)) *
                   betacf(b, a, 1.0 - x) / b;
}

double proj_unif_cdf(int d, double x) {
  if (d < 1) throw RhoOutOfRange("proj_unif_cdf: d must be >= 1");
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (d == 1) return 0.5 + std::asin(x) / kPi;
  if (d == 2) return 0.5 * (x + 1.0);
  return inc_beta(0.5 * d, 0.5 * d, 0.5 * (1.0 + x));
}

double softplus(double x) {
  if (x > 30.0) return x + std::exp(-x);
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double log_softplus(double x) {
  if (x > 30.0) return std::log(x + std::exp(-x));
  if (x < -30.0) return x;  // log(e^x (1 + O(e^x)))
  return std::log(std::log1p(std::exp(x)));
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-(std::abs(a - b))));
}

}  // namespace polykde::specfun
