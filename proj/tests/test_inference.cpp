#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polykde/geometry.hpp"
#include "polykde/inference.hpp"
#include "polykde/parallel.hpp"
#include "polykde/rng.hpp"
#include "polykde/sampling.hpp"

using namespace polykde;
namespace sf = polykde::specfun;

namespace {

Matrix circle_points(const std::vector<double>& angles) {
  Matrix pts(static_cast<Eigen::Index>(angles.size()), 2);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    pts(static_cast<Eigen::Index>(i), 0) = std::cos(angles[i]);
    pts(static_cast<Eigen::Index>(i), 1) = std::sin(angles[i]);
  }
  return pts;
}

// Independent brute-force JSD statistic: plain loops in linear space over the
// kernel values, following the leave-one-out definitions term by term.
double jsd_brute(const Matrix& pts, const std::vector<int>& labels, int k, double h,
                 const KernelSpec& spec, const Dims& dims) {
  const Eigen::Index n = pts.rows();
  const double c = std::exp(log_norm_const(spec, dims, Bandwidths::common(h, dims.r()), NormMode::Exact));
  std::vector<Eigen::Index> nj(static_cast<std::size_t>(k), 0);
  for (int lab : labels) ++nj[static_cast<std::size_t>(lab)];
  auto kernel = [&](Eigen::Index i, Eigen::Index j) {
    std::vector<double> s(static_cast<std::size_t>(dims.r()));
    for (int l = 0; l < dims.r(); ++l) {
      const auto xi = pts.row(i).segment(dims.offset(l), dims.block_size(l));
      const auto xj = pts.row(j).segment(dims.offset(l), dims.block_size(l));
      s[static_cast<std::size_t>(l)] = (1.0 - xi.dot(xj)) / (h * h);
    }
    return c * kernel_eval(spec, s);
  };
  double h0 = 0.0;
  std::vector<double> hj(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int lab = labels[static_cast<std::size_t>(i)];
    // Class leave-one-out density.
    double fj = 0.0;
    for (Eigen::Index l = 0; l < n; ++l)
      if (l != i && labels[static_cast<std::size_t>(l)] == lab) fj += kernel(i, l);
    fj /= static_cast<double>(nj[static_cast<std::size_t>(lab)] - 1);
    hj[static_cast<std::size_t>(lab)] -= std::log(fj);
    // Pooled density per the printed weighting.
    double f0 = 0.0;
    for (int m = 0; m < k; ++m) {
      if (m == lab) continue;
      double fm = 0.0;
      for (Eigen::Index l = 0; l < n; ++l)
        if (labels[static_cast<std::size_t>(l)] == m) fm += kernel(i, l);
      fm /= static_cast<double>(nj[static_cast<std::size_t>(m)]);
      f0 += (static_cast<double>(nj[static_cast<std::size_t>(m)]) / n) *
            static_cast<double>(nj[static_cast<std::size_t>(m)]) * fm;
    }
    f0 += (static_cast<double>(nj[static_cast<std::size_t>(lab)]) / n) *
          static_cast<double>(nj[static_cast<std::size_t>(lab)] - 1) * fj;
    f0 /= static_cast<double>(n - 1);
    h0 -= std::log(f0);
  }
  double t = h0 / static_cast<double>(n);
  for (int j = 0; j < k; ++j)
    t -= (static_cast<double>(nj[static_cast<std::size_t>(j)]) / n) *
         (hj[static_cast<std::size_t>(j)] / static_cast<double>(nj[static_cast<std::size_t>(j)]));
  return t;
}

GroupedSample toy_grouped() {
  Matrix pts = circle_points({0.1, 0.9, 2.2, 0.4, 1.4, 3.0});
  std::vector<int> labels{0, 0, 0, 1, 1, 1};
  return GroupedSample(PolySample(pts, Dims({1}), labels), 2);
}

}  // namespace

TEST_CASE("JSD statistic equals a hand-coded double loop") {
  const GroupedSample g = toy_grouped();
  for (const KernelSpec& spec : {KernelSpec::vmf(), KernelSpec::sfp(50.0)}) {
    const double got = jsd_statistic(g, spec, Bandwidths::common(0.8, 1));
    const double want = jsd_brute(g.pooled().points(), g.labels(), 2, 0.8, spec, Dims({1}));
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("JSD statistic is invariant under label swaps with equal sizes") {
  const GroupedSample g = toy_grouped();
  std::vector<int> swapped;
  for (int lab : g.labels()) swapped.push_back(1 - lab);
  const GroupedSample g2(PolySample(g.pooled().points(), g.pooled().dims(), swapped), 2);
  const double a = jsd_statistic(g, KernelSpec::vmf(), Bandwidths::common(0.9, 1));
  const double b = jsd_statistic(g2, KernelSpec::vmf(), Bandwidths::common(0.9, 1));
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("JSD stays finite on replicated points with the vMF kernel") {
  Matrix pts = circle_points({0.5, 0.5, 2.0, 2.0});
  const GroupedSample g(PolySample(pts, Dims({1}), std::vector<int>{0, 0, 1, 1}), 2);
  CHECK(std::isfinite(jsd_statistic(g, KernelSpec::vmf(), Bandwidths::common(0.7, 1))));
}

TEST_CASE("population JSD bound and the estimator's tolerated range") {
  // Quadrature JSD of two exact vMF densities on the circle lies in [0, log 2].
  auto vmf_pdf = [&](double theta, double mu_angle, double kappa) {
    return std::exp(log_vmf_const(1, kappa) + kappa * std::cos(theta - mu_angle));
  };
  for (double sep : {0.0, 0.5, 2.0, M_PI}) {
    auto f1 = [&](double th) { return vmf_pdf(th, 0.0, 3.0); };
    auto f2 = [&](double th) { return vmf_pdf(th, sep, 3.0); };
    auto f0 = [&](double th) { return 0.5 * (f1(th) + f2(th)); };
    auto entropy = [&](const std::function<double(double)>& f) {
      return -oracles::adaptive_simpson(
          [&](double th) {
            const double v = f(th);
            return v > 0.0 ? v * std::log(v) : 0.0;
          },
          0.0, 2.0 * M_PI, 1e-12);
    };
    const double jsd = entropy(f0) - 0.5 * entropy(f1) - 0.5 * entropy(f2);
    CHECK(jsd >= -1e-10);
    CHECK(jsd <= std::log(2.0) + 1e-10);
  }
  // Raw estimator under H0 may dip slightly negative; tolerate -0.05.
  RngStream rng(314);
  Matrix pts(40, 2);
  Vector e1(2);
  e1 << 1, 0;
  for (Eigen::Index i = 0; i < 40; ++i) pts.row(i) = sample_vmf(e1, 2.0, rng).transpose();
  std::vector<int> labels(40, 0);
  for (int i = 20; i < 40; ++i) labels[static_cast<std::size_t>(i)] = 1;
  const GroupedSample g(PolySample(pts, Dims({1}), labels), 2);
  CHECK(jsd_statistic(g, KernelSpec::vmf(), Bandwidths::common(0.5, 1)) > -0.05);
}

TEST_CASE("permutation test mechanics") {
  const GroupedSample g = toy_grouped();
  // Constant statistic: strict inequality gives p = 0.
  const TestResult res = permutation_test(
      g, [](const std::vector<int>&) { return 1.0; }, 99, 7);
  CHECK(res.p_value == 0.0);
  CHECK(res.B == 99);

  // Smoothed variant.
  const TestResult smooth = permutation_test(
      g, [](const std::vector<int>&) { return 1.0; }, 99, 7, true);
  CHECK(smooth.p_value == doctest::Approx(0.01).epsilon(1e-12));

  // Determinism across thread counts.
  auto stat = jsd_label_statistic(g, KernelSpec::vmf(), Bandwidths::common(0.8, 1));
  set_max_threads(1);
  const TestResult a = permutation_test(g, stat, 50, 11);
  set_max_threads(3);
  const TestResult b = permutation_test(g, stat, 50, 11);
  set_max_threads(0);
  CHECK(a.p_value == b.p_value);
  CHECK(a.replicates == b.replicates);
}

TEST_CASE("location and scatter statistics") {
  // Identical classes: zero discrepancy on every sphere.
  Matrix pts = circle_points({0.2, 1.0, 0.2, 1.0});
  const GroupedSample same(PolySample(pts, Dims({1}), std::vector<int>{0, 0, 1, 1}), 2);
  CHECK(loc_scatter_statistic(same, LocScatter::Location) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(loc_scatter_statistic(same, LocScatter::Scatter) == doctest::Approx(0.0).epsilon(1e-12));

  // Antipodal mean directions on one sphere: diameter 2.
  Matrix anti(4, 2);
  anti << 1, 0, 0.9950041652780258, 0.09983341664682815, -1, 0, -0.9950041652780258,
      -0.09983341664682815;
  const GroupedSample g2(PolySample(validate_and_normalize(anti, Dims({1}), true).points(),
                                    Dims({1}), std::vector<int>{0, 0, 1, 1}),
                         2);
  CHECK(loc_scatter_statistic(g2, LocScatter::Location) > 1.99);

  CHECK_THROWS_AS(
      loc_scatter_statistic(GroupedSample(PolySample(pts, Dims({1}),
                                                     std::vector<int>{0, 0, 1, 2}),
                                          3),
                            LocScatter::Location),
      KNotTwo);
}

TEST_CASE("scatter distance with proportional matrices") {
  // Sigma_2 = 4 Sigma_1 in 2x2: distance sqrt(2) log 4.
  Matrix a(2, 2), b(2, 2);
  a << 0.2, 0.05, 0.05, 0.8;
  b = 4.0 * a;
  CHECK(spd_affine_distance(a, b) ==
        doctest::Approx(std::sqrt(2.0) * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("spd affine distance properties") {
  Matrix a(3, 3);
  a << 2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 0.5;
  CHECK(spd_affine_distance(a, a) == doctest::Approx(0.0).epsilon(1e-10));
  Matrix b(3, 3);
  b << 1, 0, 0, 0, 3, 0.2, 0, 0.2, 2;
  CHECK(spd_affine_distance(a, b) == doctest::Approx(spd_affine_distance(b, a)).epsilon(1e-11));
  Matrix eye = Matrix::Identity(2, 2);
  Matrix diag(2, 2);
  diag << std::exp(2.0), 0, 0, std::exp(-2.0);
  CHECK(spd_affine_distance(eye, diag) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;  // indefinite
  CHECK_THROWS_AS(spd_affine_distance(bad, eye), NotSPD);
}

TEST_CASE("loc/scatter invariance under common blockwise rotation") {
  RngStream rng(272);
  const Dims dims({2});
  Matrix pts(30, 3);
  Vector north(3);
  north << 0, 0, 1;
  Vector east(3);
  east << 1, 0, 0;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    pts.row(i) = sample_vmf(i < 15 ? north : east, 8.0, rng).transpose();
    labels.push_back(i < 15 ? 0 : 1);
  }
  const GroupedSample g(PolySample(pts, dims, labels), 2);
  const double loc = loc_scatter_statistic(g, LocScatter::Location);
  const double sc = loc_scatter_statistic(g, LocScatter::Scatter);

  Matrix gauss(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) gauss(a, b) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(gauss)};
  const Matrix q = Matrix(qr.householderQ());
  Matrix rotated(30, 3);
  for (int i = 0; i < 30; ++i) rotated.row(i) = (q * pts.row(i).transpose()).transpose();
  const GroupedSample gr(PolySample(validate_and_normalize(rotated, dims, true).points(), dims,
                                    labels),
                         2);
  CHECK(loc_scatter_statistic(gr, LocScatter::Location) == doctest::Approx(loc).epsilon(1e-10));
  CHECK(loc_scatter_statistic(gr, LocScatter::Scatter) == doctest::Approx(sc).epsilon(1e-10));
}

TEST_CASE("FDR adjustment") {
  CHECK(fdr_adjust({1.0, 1.0, 1.0}) == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(fdr_adjust({0.2}) == std::vector<double>{0.2});
  // Hand-computed Benjamini-Yekutieli triple: all 0.055.
  const auto adj = fdr_adjust({0.01, 0.02, 0.03});
  for (double q : adj) CHECK(q == doctest::Approx(0.055).epsilon(1e-12));
  // Benjamini-Hochberg drops the harmonic factor.
  const auto bh = fdr_adjust({0.01, 0.02, 0.03}, FdrMethod::BenjaminiHochberg);
  for (double q : bh) CHECK(q == doctest::Approx(0.03).epsilon(1e-12));
  CHECK_THROWS_AS(fdr_adjust({1.5}), RhoOutOfRange);
}

TEST_CASE("k-sample driver composes the pieces") {
  const GroupedSample g = toy_grouped();
  const KernelSpec spec = KernelSpec::vmf();
  const Bandwidths h = Bandwidths::common(0.9, 1);
  const TestResult direct = k_sample_test(g, spec, h, 60, 21);
  const TestResult manual = permutation_test(g, jsd_label_statistic(g, spec, h), 60, 21);
  CHECK(direct.statistic == manual.statistic);
  CHECK(direct.p_value == manual.p_value);
  CHECK(direct.replicates == manual.replicates);

  // Sweep: one result per multiplier, independent permutation draws.
  const auto sweep = k_sample_test_rot(g, spec, {1.0, 2.0}, 60, 21);
  REQUIRE(sweep.size() == 2);
  CHECK(sweep[0].replicates != sweep[1].replicates);
  CHECK(sweep[0].seed != sweep[1].seed);
}
