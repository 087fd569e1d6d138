#include "polykde/inference.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "polykde/kde.hpp"
#include "polykde/parallel.hpp"
#include "polykde/rng.hpp"
#include "polykde/specfun.hpp"

namespace polykde {

namespace sf = specfun;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GroupedSample::GroupedSample(PolySample pooled, int k) : pooled_(std::move(pooled)), k_(k) {
  if (!pooled_.labels()) throw ClassTooSmall("GroupedSample: pooled sample carries no labels");
  sizes_.assign(static_cast<std::size_t>(k), 0);
  for (int lab : *pooled_.labels()) {
    if (lab < 0 || lab >= k) throw ClassTooSmall("GroupedSample: label outside 0..k-1");
    ++sizes_[static_cast<std::size_t>(lab)];
  }
  for (Eigen::Index nj : sizes_)
    if (nj < 2) throw ClassTooSmall("GroupedSample: every class needs >= 2 points");
}

GroupedSample GroupedSample::from_labels(PolySample pooled) {
  if (!pooled.labels()) throw ClassTooSmall("GroupedSample: pooled sample carries no labels");
  int k = 0;
  for (int lab : *pooled.labels()) k = std::max(k, lab + 1);
  return GroupedSample(std::move(pooled), k);
}

namespace {

// Log-kernel Gram matrix of the pooled sample (normalizing constant kept
// aside); shared read-only by all permutation replicates.
struct JsdGram {
  Matrix G;
  double log_c;
  int k;
  std::vector<Eigen::Index> sizes;
  std::vector<double> log_sizes;

  double statistic(const std::vector<int>& labels) const {
    const Eigen::Index n = G.rows();
    const double log_n = std::log(static_cast<double>(n));
    std::vector<double> l_class(static_cast<std::size_t>(n));
    std::vector<double> l_pool(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) {
      const int lab_i = labels[static_cast<std::size_t>(i)];
      sf::LogSumExp lse_class, lse_pool;
      for (Eigen::Index l = 0; l < n; ++l) {
        if (l == i) continue;
        const double g = G(i, l);
        const int lab_l = labels[static_cast<std::size_t>(l)];
        if (lab_l == lab_i) lse_class.add(g);
        lse_pool.add(g + log_sizes[static_cast<std::size_t>(lab_l)]);
      }
      l_class[static_cast<std::size_t>(i)] =
          log_c - std::log(static_cast<double>(sizes[static_cast<std::size_t>(lab_i)] - 1)) +
          lse_class.value();
      l_pool[static_cast<std::size_t>(i)] =
          log_c - std::log(static_cast<double>(n - 1)) - log_n + lse_pool.value();
    });
    // H(f0_hat) - sum_j pi_j H(fj_hat), entropies as empirical means.
    double h0 = 0.0;
    std::vector<double> hj(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      h0 -= l_pool[static_cast<std::size_t>(i)];
      hj[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] -=
          l_class[static_cast<std::size_t>(i)];
    }
    h0 /= static_cast<double>(n);
    double t = h0;
    for (int j = 0; j < k; ++j) {
      const double nj = static_cast<double>(sizes[static_cast<std::size_t>(j)]);
      t -= (nj / static_cast<double>(n)) * (hj[static_cast<std::size_t>(j)] / nj);
    }
    return t;
  }
};

std::shared_ptr<JsdGram> build_jsd_gram(const GroupedSample& g, const KernelSpec& spec,
                                        const Bandwidths& h) {
  auto gram = std::make_shared<JsdGram>();
  const PolySample& pooled = g.pooled();
  const Eigen::Index n = pooled.n();
  KdeModel model(pooled, h, spec, false);
  gram->log_c = model.log_c();
  gram->k = g.k();
  gram->sizes = g.class_sizes();
  for (Eigen::Index nj : gram->sizes) gram->log_sizes.push_back(std::log(static_cast<double>(nj)));
  gram->G = Matrix(n, n);
  parallel_for(n, [&](std::int64_t i) {
    const double* xi = pooled.points().row(i).data();
    for (Eigen::Index l = i; l < n; ++l)
      gram->G(i, l) = model.log_kernel_term(xi, l);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index l = 0; l < i; ++l) gram->G(i, l) = gram->G(l, i);
  return gram;
}

}  // namespace

LabelStatistic jsd_label_statistic(const GroupedSample& g, const KernelSpec& spec,
                                   const Bandwidths& h) {
  auto gram = build_jsd_gram(g, spec, h);
  return [gram](const std::vector<int>& labels) { return gram->statistic(labels); };
}

double jsd_statistic(const GroupedSample& g, const KernelSpec& spec, const Bandwidths& h) {
  return jsd_label_statistic(g, spec, h)(g.labels());
}

TestResult permutation_test(const GroupedSample& g, const LabelStatistic& statistic, int B,
                            std::uint64_t seed, bool plus_one) {
  if (B < 1) throw SampleTooSmall("permutation_test: need B >= 1");
  TestResult out;
  out.seed = seed;
  out.B = B;
  out.statistic = statistic(g.labels());
  out.replicates.assign(static_cast<std::size_t>(B), 0.0);
  const std::vector<int>& observed = g.labels();
  RngStream root(seed);
  // Replicates are independent tasks; each shuffle draws from its own
  // substream, so the result does not depend on the thread count.
  for (int b = 0; b < B; ++b) {
    RngStream sub = root.substream(static_cast<std::uint64_t>(b) + 1);
    std::vector<int> labels = observed;
    for (std::size_t i = labels.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(sub.below(i + 1));
      std::swap(labels[i], labels[j]);
    }
    out.replicates[static_cast<std::size_t>(b)] = statistic(labels);
  }
  Eigen::Index count = 0;
  for (double t : out.replicates)
    if (t > out.statistic) ++count;
  out.p_value = plus_one ? (1.0 + count) / (B + 1.0) : static_cast<double>(count) / B;
  return out;
}

double spd_affine_distance(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw NotSPD("spd_affine_distance: shape mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(A)};
  if (llt.info() != Eigen::Success) throw NotSPD("spd_affine_distance: first matrix not SPD");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd W =
      L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(B)).transpose();
  const Eigen::MatrixXd M = L.triangularView<Eigen::Lower>().solve(W);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(0.5 * (M + M.transpose()))};
  if (eig.info() != Eigen::Success) throw NotSPD("spd_affine_distance: eigensolve failed");
  double total = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double lambda = eig.eigenvalues()[i];
    if (!(lambda > 0.0)) throw NotSPD("spd_affine_distance: second matrix not SPD");
    total += std::log(lambda) * std::log(lambda);
  }
  return std::sqrt(total);
}

double loc_scatter_statistic(const PolySample& pooled, const std::vector<int>& labels,
                             LocScatter which) {
  const Dims& dims = pooled.dims();
  const Eigen::Index n = pooled.n();
  Eigen::Index n0 = 0;
  for (int lab : labels) {
    if (lab < 0 || lab > 1) throw KNotTwo("loc_scatter_statistic: defined for two samples");
    if (lab == 0) ++n0;
  }
  const Eigen::Index n1 = n - n0;
  if (n0 < 2 || n1 < 2) throw ClassTooSmall("loc_scatter_statistic: every class needs >= 2 points");

  double t_max = 0.0;
  for (int l = 0; l < dims.r(); ++l) {
    const int off = dims.offset(l), len = dims.block_size(l);
    if (which == LocScatter::Location) {
      Vector m0 = Vector::Zero(len), m1 = Vector::Zero(len);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = pooled.points().row(i).segment(off, len);
        (labels[static_cast<std::size_t>(i)] == 0 ? m0 : m1) += row.transpose();
      }
      if (m0.norm() < 1e-300 || m1.norm() < 1e-300)
        throw SingularScatter("loc_scatter_statistic: vanishing resultant");
      t_max = std::max(t_max, (m0 / m0.norm() - m1 / m1.norm()).norm());
    } else {
      Matrix s0 = Matrix::Zero(len, len), s1 = Matrix::Zero(len, len);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Vector x = pooled.points().row(i).segment(off, len).transpose();
        (labels[static_cast<std::size_t>(i)] == 0 ? s0 : s1) += x * x.transpose();
      }
      s0 /= static_cast<double>(n0);
      s1 /= static_cast<double>(n1);
      for (const Matrix* s : {&s0, &s1}) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(*s)};
        if (eig.eigenvalues().minCoeff() < 1e-12)
          throw SingularScatter("loc_scatter_statistic: near-singular marginal scatter");
      }
      t_max = std::max(t_max, spd_affine_distance(s0, s1));
    }
  }
  return t_max;
}

double loc_scatter_statistic(const GroupedSample& g, LocScatter which) {
  if (g.k() != 2) throw KNotTwo("loc_scatter_statistic: defined for two samples");
  return loc_scatter_statistic(g.pooled(), g.labels(), which);
}

std::vector<double> fdr_adjust(const std::vector<double>& p, FdrMethod method) {
  const std::size_t m = p.size();
  std::vector<double> adjusted(m, 0.0);
  if (m == 0) return adjusted;
  for (double pi : p)
    if (pi < 0.0 || pi > 1.0) throw RhoOutOfRange("fdr_adjust: p-values must lie in [0, 1]");
  double harmonic = 1.0;
  if (method == FdrMethod::BenjaminiYekutieli) {
    harmonic = 0.0;
    for (std::size_t i = 1; i <= m; ++i) harmonic += 1.0 / static_cast<double>(i);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  double running = 1.0;
  for (std::size_t pos = m; pos-- > 0;) {
    const double q =
        p[order[pos]] * static_cast<double>(m) * harmonic / static_cast<double>(pos + 1);
    running = std::min(running, std::min(1.0, q));
    adjusted[order[pos]] = running;
  }
  return adjusted;
}

TestResult k_sample_test(const GroupedSample& g, const KernelSpec& spec, const Bandwidths& h, int B,
                         std::uint64_t seed) {
  return permutation_test(g, jsd_label_statistic(g, spec, h), B, seed);
}

std::vector<TestResult> k_sample_test_rot(const GroupedSample& g, const KernelSpec& spec,
                                          const std::vector<double>& c_multipliers, int B,
                                          std::uint64_t seed) {
  const SelectorResult rot = rot_bandwidth(g.pooled(), spec);
  std::vector<TestResult> out;
  RngStream root(seed, 0x706f6c79);
  for (std::size_t idx = 0; idx < c_multipliers.size(); ++idx) {
    const Bandwidths h{(rot.h.vec() * c_multipliers[idx]).eval()};
    out.push_back(k_sample_test(g, spec, h, B, root.substream(idx).next_u64()));
  }
  return out;
}

}  // namespace polykde
