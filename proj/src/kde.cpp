#include "polykde/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polykde/parallel.hpp"
#include "polykde/specfun.hpp"

namespace polykde {

namespace sf = specfun;

KdeModel::KdeModel(PolySample sample, Bandwidths h, KernelSpec spec,
                   std::optional<bool> uniform_offset)
    : sample_(std::move(sample)), h_(std::move(h)), spec_(spec) {
  if (h_.r() != sample_.dims().r()) throw DimensionMismatch("KdeModel: bandwidth length != r");
  log_c_ = log_norm_const(spec_, sample_.dims(), h_);
  log_omega_ = 0.0;
  for (int j = 0; j < sample_.dims().r(); ++j)
    log_omega_ += sf::log_sphere_area(sample_.dims().d(j));
  // Reporting w.r.t. the uniform measure only helps when omega_d > 1.
  uniform_offset_ = uniform_offset.value_or(log_omega_ > 0.0);
}

double KdeModel::log_kernel_term(const double* x, Eigen::Index i) const {
  const Dims& dims = sample_.dims();
  const double* xi = sample_.points().row(i).data();
  const KernelFamily fam = spec_.family;
  const bool spherical = fam == KernelFamily::vMF || spec_.combine == KernelCombine::Spherical;
  double acc = 0.0;
  for (int j = 0; j < dims.r(); ++j) {
    const int off = dims.offset(j);
    const int len = dims.block_size(j);
    double dot = 0.0;
    for (int c = 0; c < len; ++c) dot += x[off + c] * xi[off + c];
    const double s = (1.0 - dot) / (h_[j] * h_[j]);
    if (spherical) {
      acc += s;
    } else {
      const double lt = log_kernel_scalar(fam, spec_.upsilon, s);
      if (lt == -std::numeric_limits<double>::infinity()) return lt;
      acc += lt;
    }
  }
  if (!spherical) return acc;
  return log_kernel_scalar(fam, spec_.upsilon, acc);
}

namespace {

double finish_log_kde(const KdeModel& model, const sf::LogSumExp& lse, Eigen::Index n_terms) {
  const double s = lse.value();
  if (s == -std::numeric_limits<double>::infinity()) return s;
  double out = model.log_c() - std::log(static_cast<double>(n_terms)) + s;
  if (model.uniform_offset()) out += model.log_omega();
  return out;
}

}  // namespace

double log_kde(const KdeModel& model, const PolyPoint& x) {
  if (x.coords.size() != model.sample().dims().ambient())
    throw DimensionMismatch("log_kde: point has wrong ambient dimension");
  const Eigen::Index n = model.sample().n();
  sf::LogSumExp lse;
  for (Eigen::Index i = 0; i < n; ++i) lse.add(model.log_kernel_term(x.coords.data(), i));
  return finish_log_kde(model, lse, n);
}

std::vector<double> log_kde_batch(const KdeModel& model, const Matrix& at) {
  if (at.cols() != model.sample().dims().ambient())
    throw DimensionMismatch("log_kde_batch: points have wrong ambient dimension");
  const Eigen::Index n = model.sample().n();
  std::vector<double> out(static_cast<std::size_t>(at.rows()));
  parallel_for(at.rows(), [&](std::int64_t m) {
    sf::LogSumExp lse;
    const double* x = at.row(m).data();
    for (Eigen::Index i = 0; i < n; ++i) lse.add(model.log_kernel_term(x, i));
    out[static_cast<std::size_t>(m)] = finish_log_kde(model, lse, n);
  });
  return out;
}

std::vector<double> log_kde_batch_serial(const KdeModel& model, const Matrix& at) {
  std::vector<double> out(static_cast<std::size_t>(at.rows()));
  for (Eigen::Index m = 0; m < at.rows(); ++m) {
    out[static_cast<std::size_t>(m)] = log_kde(model, PolyPoint{at.row(m).transpose()});
  }
  return out;
}

std::vector<double> loo_log_kde(const KdeModel& model) {
  const Eigen::Index n = model.sample().n();
  if (n < 2) throw SampleTooSmall("loo_log_kde: need n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const Matrix& pts = model.sample().points();
  parallel_for(n, [&](std::int64_t i) {
    sf::LogSumExp lse;
    const double* xi = pts.row(i).data();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      lse.add(model.log_kernel_term(xi, j));
    }
    out[static_cast<std::size_t>(i)] = finish_log_kde(model, lse, n - 1);
  });
  return out;
}

std::vector<double> loo_log_kde_serial(const KdeModel& model) {
  const Eigen::Index n = model.sample().n();
  if (n < 2) throw SampleTooSmall("loo_log_kde: need n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const Matrix& pts = model.sample().points();
  for (Eigen::Index i = 0; i < n; ++i) {
    sf::LogSumExp lse;
    const double* xi = pts.row(i).data();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      lse.add(model.log_kernel_term(xi, j));
    }
    out[static_cast<std::size_t>(i)] = finish_log_kde(model, lse, n - 1);
  }
  return out;
}

std::vector<int> rank_by_density(const KdeModel& model, bool use_loo) {
  const Eigen::Index n = model.sample().n();
  if (n < 2) throw SampleTooSmall("rank_by_density: need n >= 2");
  std::vector<double> ell;
  if (use_loo) {
    ell = loo_log_kde(model);
  } else {
    ell = log_kde_batch(model, model.sample().points());
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // Descending log-density; ties keep ascending sample index.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ell[a] > ell[b]; });
  std::vector<int> rank(static_cast<std::size_t>(n));
  for (int pos = 0; pos < static_cast<int>(n); ++pos) rank[order[pos]] = pos + 1;
  return rank;
}

}  // namespace polykde
