#include "polykde/bandwidth.hpp"

#include <algorithm>
#include <cmath>

#include "polykde/kde.hpp"
#include "polykde/parallel.hpp"
#include "polykde/specfun.hpp"

namespace polykde {

namespace sf = specfun;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Concentrations below this make the PvMF curvature vanish and the plug-in
// bandwidth diverge; the selector floors them instead of failing.
constexpr double kKappaFloor = 1e-4;

struct CurvaturePieces {
  Vector v, u;        // v(kappa), u(kappa)
  double log_r0_sum;  // log prod_j R_0(kappa_j)
};

double log_R0(int d, double kappa) {
  if (kappa < 1e-14) return -sf::log_sphere_area(d);
  const double nu = 0.5 * (d - 1);
  return nu * std::log(kappa) + sf::log_bessel_i(nu, 2.0 * kappa) - d * std::log(2.0) -
         0.5 * (d + 1) * std::log(kPi) - 2.0 * sf::log_bessel_i(nu, kappa);
}

CurvaturePieces curvature_pieces(const Vector& kappa, const Dims& dims) {
  CurvaturePieces out;
  const int r = dims.r();
  out.v = Vector(r);
  out.u = Vector(r);
  out.log_r0_sum = 0.0;
  for (int j = 0; j < r; ++j) {
    const double d = dims.d(j);
    const double k = kappa[j];
    const double ratio = k > 0.0 ? sf::bessel_ratio_A(dims.d(j), 2.0 * k) : 0.0;
    out.v[j] = d * k * (2.0 * (2.0 + d) * k - (d * d - d + 2.0) * ratio);
    out.u[j] = d * k * ratio;
    out.log_r0_sum += log_R0(dims.d(j), k);
  }
  return out;
}

// R(kappa) without the prod R_0 factor.
Matrix curvature_unit_matrix(const CurvaturePieces& p) {
  const Eigen::Index r = p.v.size();
  Matrix R = 0.25 * (p.u * p.u.transpose());
  for (Eigen::Index j = 0; j < r; ++j) R(j, j) = 0.125 * p.v[j];
  return R;
}

}  // namespace

Vector kappa_mle(const PolySample& sample) {
  const Dims& dims = sample.dims();
  Vector kappa(dims.r());
  for (int j = 0; j < dims.r(); ++j) {
    const double resultant =
        std::min(sample.block(j).colwise().mean().norm(), 1.0 - 1e-12);
    kappa[j] = sf::inv_bessel_ratio(dims.d(j), resultant);
  }
  return kappa;
}

CurvatureMatrix curvature_matrix(const Vector& kappa, const Dims& dims) {
  if (kappa.size() != dims.r()) throw DimensionMismatch("curvature_matrix: kappa length != r");
  const CurvaturePieces p = curvature_pieces(kappa, dims);
  CurvatureMatrix out;
  out.kappa = kappa;
  out.R = curvature_unit_matrix(p) * std::exp(p.log_r0_sum);
  return out;
}

double rot_marginal_bandwidth(int d, double kappa, Eigen::Index n) {
  kappa = std::max(kappa, kKappaFloor);
  const double nu = 0.5 * (d - 1);
  // log of 2d I_{(d+1)/2}(2k) + (2+d) k I_{(d+3)/2}(2k)
  const double bracket =
      sf::log_add(std::log(2.0 * d) + sf::log_bessel_i(nu + 1.0, 2.0 * kappa),
                  std::log((2.0 + d) * kappa) + sf::log_bessel_i(nu + 2.0, 2.0 * kappa));
  const double log_h = (std::log(4.0) + 0.5 * std::log(kPi) +
                        2.0 * sf::log_bessel_i(nu, kappa) - 0.5 * (d + 1) * std::log(kappa) -
                        bracket - std::log(static_cast<double>(n))) /
                       (4.0 + d);
  return std::exp(log_h);
}

namespace {

// log residual halves of the plug-in system (both sides positive):
// 4 [R (h^2 b)]_j h_j b_j  and  v_d(L) d_j / (n rho(h) h_j).
// F_j = log LHS - log RHS has the same roots and is well scaled.
struct RotSystem {
  Matrix R_unit;
  double log_r0_sum;
  Vector b;
  double log_v;
  Vector d;
  double log_n;

  Vector F(const Vector& x) const {  // x = log h
    const Eigen::Index r = x.size();
    const Vector h = x.array().exp();
    const Vector h2b = (h.array().square() * b.array()).matrix();
    const Vector Rh = R_unit * h2b;
    double log_rho = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) log_rho += d[j] * x[j];
    Vector out(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      const double lhs = std::log(4.0) + std::log(Rh[j]) + log_r0_sum + x[j] + std::log(b[j]);
      const double rhs = log_v + std::log(d[j]) - log_n - log_rho - x[j];
      out[j] = lhs - rhs;
    }
    return out;
  }

  // Raw residual of the printed system, for diagnostics.
  Vector raw_residual(const Vector& h) const {
    const Eigen::Index r = h.size();
    const Vector h2b = (h.array().square() * b.array()).matrix();
    const Vector Rh = (R_unit * h2b) * std::exp(log_r0_sum);
    double log_rho = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) log_rho += d[j] * std::log(h[j]);
    Vector out(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      out[j] = 4.0 * Rh[j] * h[j] * b[j] - std::exp(log_v - log_n - log_rho) * d[j] / h[j];
    }
    return out;
  }
};

}  // namespace

Vector rot_system_residual(const CurvatureMatrix& curv, const KernelSpec& spec, const Dims& dims,
                           Eigen::Index n, const Bandwidths& h) {
  Vector kappa = curv.kappa.cwiseMax(kKappaFloor);
  const CurvaturePieces p = curvature_pieces(kappa, dims);
  const PolyMoments m = poly_kernel_moments(spec, dims);
  RotSystem sys{curvature_unit_matrix(p), p.log_r0_sum, m.b, std::log(m.v),
                Vector(dims.r()), std::log(static_cast<double>(n))};
  for (int j = 0; j < dims.r(); ++j) sys.d[j] = dims.d(j);
  return sys.raw_residual(h.vec());
}

SelectorResult rot_bandwidth(const PolySample& sample, const KernelSpec& spec) {
  const Dims& dims = sample.dims();
  const Eigen::Index n = sample.n();
  if (n < 2) throw SampleTooSmall("rot_bandwidth: need n >= 2");
  const int r = dims.r();

  Vector kappa = kappa_mle(sample).cwiseMax(kKappaFloor);
  const CurvaturePieces p = curvature_pieces(kappa, dims);
  const PolyMoments m = poly_kernel_moments(spec, dims);

  RotSystem sys{curvature_unit_matrix(p), p.log_r0_sum, m.b, std::log(m.v), Vector(r),
                std::log(static_cast<double>(n))};
  for (int j = 0; j < r; ++j) sys.d[j] = dims.d(j);

  // Marginal starters: scalar closed form per sphere with the requested
  // kernel's moments and the R_2 block curvature.
  Vector x(r);
  for (int j = 0; j < r; ++j) {
    const double d = dims.d(j);
    const double log_R2 = std::log(0.125 * p.v[j]) + p.log_r0_sum;
    const double log_bj = std::log(m.b[j]);
    x[j] = (std::log(d) + std::log(m.v) - std::log(4.0) - 2.0 * log_bj - log_R2 -
            std::log(static_cast<double>(n))) /
           (d + 4.0);
  }

  // Damped Newton on F(x) = 0 with a central-difference Jacobian.
  SelectorResult result;
  result.method = "rot";
  Vector Fx = sys.F(x);
  int it = 0;
  for (; it < 100 && Fx.norm() > 1e-13; ++it) {
    Matrix J(r, r);
    const double step = 1e-6;
    for (int j = 0; j < r; ++j) {
      Vector xp = x, xm = x;
      const double hj = step * std::max(1.0, std::abs(x[j]));
      xp[j] += hj;
      xm[j] -= hj;
      J.col(j) = (sys.F(xp) - sys.F(xm)) / (2.0 * hj);
    }
    Vector dx = J.fullPivLu().solve(-Fx);
    double lambda = 1.0;
    Vector x_new = x + dx;
    Vector F_new = sys.F(x_new);
    int halvings = 0;
    while (F_new.norm() >= Fx.norm() && halvings < 60) {
      lambda *= 0.5;
      x_new = x + lambda * dx;
      F_new = sys.F(x_new);
      ++halvings;
    }
    if (F_new.norm() >= Fx.norm()) break;  // no progress
    x = x_new;
    Fx = F_new;
  }
  result.iterations = it;
  result.converged = Fx.norm() <= 1e-10;

  Bandwidths h{x.array().exp().matrix()};
  result.residual_norm = sys.raw_residual(h.vec()).norm();
  result.h = h;
  if (!result.converged) result.method = "rot (marginal starters, no convergence)";
  return result;
}

SelectorResult amise_bandwidth(const CurvatureMatrix& curv, const KernelSpec& spec, const Dims& dims,
                               Eigen::Index n) {
  Vector kappa = curv.kappa.cwiseMax(kKappaFloor);
  const CurvaturePieces p = curvature_pieces(kappa, dims);
  const PolyMoments m = poly_kernel_moments(spec, dims);
  const Matrix R_unit = curvature_unit_matrix(p);
  const double log_quad = std::log(m.b.dot(R_unit * m.b)) + p.log_r0_sum;  // b'Rb
  const double d_tilde = dims.d_tilde();
  const double log_h = (std::log(d_tilde) + std::log(m.v) - std::log(4.0) - log_quad -
                        std::log(static_cast<double>(n))) /
                       (d_tilde + 4.0);
  SelectorResult out;
  out.method = "amise (equal bandwidth)";
  out.h = Bandwidths::common(std::exp(log_h), dims.r());
  const double h = std::exp(log_h);
  out.loss = std::pow(h, 4.0) * std::exp(log_quad) +
             m.v / (static_cast<double>(n) * std::exp(out.h.log_rho(dims)));
  return out;
}

SelectorResult amise_bandwidth_common(double curvature_R, const KernelSpec& spec, int d, int r,
                                      Eigen::Index n) {
  const double dr = static_cast<double>(d) * r;
  const KernelMoments km = kernel_moments(
      spec.family, spec.upsilon,
      spec.combine == KernelCombine::Spherical && spec.family != KernelFamily::vMF ? d * r : d);
  const double log_v_eff =
      spec.combine == KernelCombine::Spherical && spec.family != KernelFamily::vMF
          ? std::log(km.v_d)
          : r * std::log(km.v_d);
  const double log_h = (log_v_eff - 2.0 * std::log(km.b_d) + std::log(dr) - std::log(4.0) -
                        std::log(curvature_R) - std::log(static_cast<double>(n))) /
                       (dr + 4.0);
  SelectorResult out;
  out.method = "amise (common dimension)";
  out.h = Bandwidths::common(std::exp(log_h), r);
  out.loss = amise_prefactor(d, r) * amise_constant(spec, d, r) *
             std::pow(curvature_R, dr / (dr + 4.0)) *
             std::pow(static_cast<double>(n), -4.0 / (dr + 4.0));
  return out;
}

double lscv_loss(const PolySample& sample, const KernelSpec& spec, const Bandwidths& h) {
  if (spec.family != KernelFamily::vMF)
    throw UnsupportedKernel("lscv_loss: closed form exists for the vMF product kernel only");
  const Dims& dims = sample.dims();
  const Eigen::Index n = sample.n();
  if (n < 2) throw SampleTooSmall("lscv_loss: need n >= 2");
  const int r = dims.r();

  double log_c = 0.0, log_c2 = 0.0;
  for (int j = 0; j < r; ++j) {
    const double kappa = 1.0 / (h[j] * h[j]);
    log_c += log_vmf_const(dims.d(j), kappa);
    log_c2 += log_vmf_const(dims.d(j), 2.0 * kappa);
  }

  // Pairwise accumulators: lse_g over exp(sum_l X_i'X_j/h_l^2), lse_c over
  // 1/c(norm_ij kappa). Per-i partials keep the reduction order fixed.
  std::vector<double> part_g(static_cast<std::size_t>(n), -kInf);
  std::vector<double> part_c(static_cast<std::size_t>(n), -kInf);
  parallel_for(n, [&](std::int64_t i) {
    sf::LogSumExp lse_g, lse_c;
    for (Eigen::Index jj = i + 1; jj < n; ++jj) {
      double g = 0.0, logc_ij = 0.0;
      for (int l = 0; l < r; ++l) {
        const auto xi = sample.points().row(i).segment(dims.offset(l), dims.block_size(l));
        const auto xj = sample.points().row(jj).segment(dims.offset(l), dims.block_size(l));
        const double dot = xi.dot(xj);
        const double kappa = 1.0 / (h[l] * h[l]);
        g += dot * kappa;
        logc_ij += log_vmf_const(dims.d(l), std::sqrt(2.0 + 2.0 * dot) * kappa);
      }
      lse_g.add(g);
      lse_c.add(-logc_ij);
    }
    part_g[static_cast<std::size_t>(i)] = lse_g.value();
    part_c[static_cast<std::size_t>(i)] = lse_c.value();
  });
  sf::LogSumExp lse_g, lse_c;
  for (Eigen::Index i = 0; i < n; ++i) {
    lse_g.add(part_g[static_cast<std::size_t>(i)]);
    lse_c.add(part_c[static_cast<std::size_t>(i)]);
  }

  const double dn = static_cast<double>(n);
  // Three signed pieces in log magnitude.
  const double t1 = 2.0 * log_c - std::log(dn) - log_c2;
  const double t2 = std::log(4.0 / (dn * (dn - 1.0))) + log_c + lse_g.value();
  const double t3 = std::log(2.0 / (dn * dn)) + 2.0 * log_c + lse_c.value();
  const double m = std::max({t1, t2, t3});
  if (m == -kInf) return 0.0;
  return std::exp(m) * (std::exp(t1 - m) - std::exp(t2 - m) + std::exp(t3 - m));
}

double lcv_loss(const PolySample& sample, const KernelSpec& spec, const Bandwidths& h) {
  KdeModel model(sample, h, spec, false);
  const std::vector<double> ell = loo_log_kde(model);
  double total = 0.0;
  for (double e : ell) {
    if (e == -kInf) return -kInf;
    total += e;
  }
  return total;
}

double critical_lcv_bandwidth(const PolySample& sample) {
  const Eigen::Index n = sample.n();
  if (n < 2) throw SampleTooSmall("critical_lcv_bandwidth: need n >= 2");
  const Dims& dims = sample.dims();
  std::vector<double> per_i(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, [&](std::int64_t i) {
    double min_over_j = kInf;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double max_over_k = 0.0;
      for (int k = 0; k < dims.r(); ++k) {
        const auto xi = sample.points().row(i).segment(dims.offset(k), dims.block_size(k));
        const auto xj = sample.points().row(j).segment(dims.offset(k), dims.block_size(k));
        max_over_k = std::max(max_over_k, 1.0 - xi.dot(xj));
      }
      min_over_j = std::min(min_over_j, max_over_k);
    }
    per_i[static_cast<std::size_t>(i)] = min_over_j;
  });
  double h2 = 0.0;
  for (double v : per_i) h2 = std::max(h2, v);
  return std::sqrt(h2);
}

namespace {

// Golden-section minimization on [lo, hi]; f is unimodal in practice.
double golden_minimize(double lo, double hi, const std::function<double(double)>& f, int iters) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

SelectorResult select_bandwidth_cv(const PolySample& sample, const KernelSpec& spec, CvMethod method,
                                   CvSearch search) {
  const Dims& dims = sample.dims();
  const int r = dims.r();
  if (method == CvMethod::Lscv && spec.family != KernelFamily::vMF)
    throw UnsupportedKernel("select_bandwidth_cv: LSCV requires the vMF product kernel");

  const SelectorResult rot = rot_bandwidth(sample, spec);
  const double h_floor = spec.family == KernelFamily::Epa
                             ? critical_lcv_bandwidth(sample) * (1.0 + 1e-6)
                             : 0.0;

  auto loss_at = [&](const Bandwidths& h) {
    const double raw = method == CvMethod::Lscv ? lscv_loss(sample, spec, h)
                                                : -lcv_loss(sample, spec, h);
    return std::isfinite(raw) ? raw : kInf;
  };

  SelectorResult out;
  out.method = method == CvMethod::Lscv ? "lscv" : "lcv";

  if (search == CvSearch::Common) {
    double ref = 0.0;
    for (int j = 0; j < r; ++j) ref += std::log(rot.h[j]);
    ref = std::exp(ref / r);
    double lo = std::max(0.05 * ref, h_floor > 0.0 ? h_floor : 0.05 * ref);
    double hi = 10.0 * ref;
    if (hi <= lo) hi = 4.0 * lo;
    const double x = golden_minimize(std::log(lo), std::log(hi),
                                     [&](double lx) {
                                       return loss_at(Bandwidths::common(std::exp(lx), r));
                                     },
                                     60);
    out.h = Bandwidths::common(std::exp(x), r);
  } else {
    Vector h = rot.h.vec();
    for (int pass = 0; pass < 3; ++pass) {
      for (int j = 0; j < r; ++j) {
        const double lo = std::max(0.05 * rot.h[j], h_floor);
        const double hi = 10.0 * rot.h[j];
        const double x = golden_minimize(std::log(lo), std::log(std::max(hi, 4.0 * lo)),
                                         [&](double lx) {
                                           Vector trial = h;
                                           trial[j] = std::exp(lx);
                                           return loss_at(Bandwidths{trial});
                                         },
                                         40);
        h[j] = std::exp(x);
      }
    }
    out.h = Bandwidths{h};
  }

  const double final_loss = loss_at(out.h);
  if (final_loss == kInf)
    throw AllNegInfinity("select_bandwidth_cv: loss not finite anywhere in the bracket");
  out.loss = method == CvMethod::Lscv ? final_loss : -final_loss;
  return out;
}

}  // namespace polykde
