#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace polykde::specfun {

// 64-point Gauss-Legendre rule on [a, b].
double gauss_legendre(double a, double b, const std::function<double(double)>& f);

// n-point Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w);

// log of the surface area of S^d: omega_d = 2 pi^{(d+1)/2} / Gamma((d+1)/2).
double log_sphere_area(int d);
double sphere_area(int d);

// log I_nu(x) for nu >= 0, x >= 0, evaluated in scaled/log space so that
// arguments in the 1e5+ range do not overflow. x = 0 gives 0 for nu = 0 and
// -inf for nu > 0.
double log_bessel_i(double nu, double x);

// A_d(x) = I_{(d+1)/2}(x) / I_{(d-1)/2}(x), strictly increasing from 0 to 1.
double bessel_ratio_A(int d, double x);

// Inverse of A_d; requires 0 <= rho < 1, returns 0 at rho = 0.
double inv_bessel_ratio(int d, double rho);

// Li_s(z) for s > 0 and z < 1 (only z <= 0 is exercised in this library).
double polylog(double s, double z);

// log |Li_s(-e^w)| for any real w; Li_s(-e^w) is negative, so this is the
// log of its magnitude. Usable where -e^w itself would overflow.
double log_abs_polylog_neg_exp(double s, double w);

// J_d(v) = int_0^inf log(1+e^{v(1-t)})^2 t^{d/2-1} dt, in log form.
double log_J(double d, double v);

// CDF of gamma'X for X uniform on S^d: the regularized incomplete beta
// I_{(1+x)/2}(d/2, d/2), with closed forms for d = 1, 2.
double proj_unif_cdf(int d, double x);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double inc_beta(double a, double b, double x);

// softplus and its log, stable over the whole real line.
double softplus(double x);
double log_softplus(double x);

// Standard normal CDF.
double norm_cdf(double x);

// log(e^a + e^b) without overflow; handles -inf operands.
double log_add(double a, double b);

// Streaming log-sum-exp accumulator with a fixed left-to-right order.
class LogSumExp {
 public:
  void add(double t) {
    if (t == -std::numeric_limits<double>::infinity()) return;
    if (t <= max_) {
      acc_ += std::exp(t - max_);
    } else {
      acc_ = acc_ * std::exp(max_ - t) + 1.0;
      max_ = t;
    }
  }
  double value() const {
    if (acc_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(acc_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double acc_ = 0.0;
};

}  // namespace polykde::specfun
