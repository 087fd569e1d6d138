// Timing comparison of the OpenMP kernels against their serial references:
// batch log-density evaluation, leave-one-out evaluation, and the
// permutation-test statistic loop.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "polykde/geometry.hpp"
#include "polykde/inference.hpp"
#include "polykde/kde.hpp"
#include "polykde/parallel.hpp"
#include "polykde/rng.hpp"

using namespace polykde;

namespace {

double seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

PolySample random_sample(const Dims& dims, Eigen::Index n, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix pts(n, dims.ambient());
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < dims.r(); ++j)
      pts.row(i).segment(dims.offset(j), dims.block_size(j)) =
          sample_uniform_sphere(dims.d(j), rng).transpose();
  return PolySample(std::move(pts), dims);
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = seconds();
    f();
    best = std::min(best, seconds() - t0);
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", name,
              1e3 * serial, 1e3 * parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  Eigen::Index n = 1500;
  if (argc > 1) n = std::atoll(argv[1]);
  const Dims dims({2, 2, 2, 2, 2});
  const PolySample sample = random_sample(dims, n, 1);
  const Matrix grid = random_sample(dims, 400, 2).points();
  const KernelSpec spec = KernelSpec::sfp(100.0);
  KdeModel model(sample, Bandwidths::common(0.5, dims.r()), spec);

  std::printf("polykde benchmark: n = %lld on (S^2)^%d\n", static_cast<long long>(n), dims.r());

  volatile double sink = 0.0;
  const double eval_serial = time_best_of(3, [&] {
    const auto v = log_kde_batch_serial(model, grid);
    sink += v[0];
  });
  const double eval_parallel = time_best_of(3, [&] {
    const auto v = log_kde_batch(model, grid);
    sink += v[0];
  });
  report("batch log-kde (400 pts)", eval_serial, eval_parallel);

  const double loo_serial = time_best_of(3, [&] {
    const auto v = loo_log_kde_serial(model);
    sink += v[0];
  });
  const double loo_parallel = time_best_of(3, [&] {
    const auto v = loo_log_kde(model);
    sink += v[0];
  });
  report("leave-one-out log-kde", loo_serial, loo_parallel);

  // Permutation statistic: serial reference = single worker thread.
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = n / 2; i < n; ++i) labels[static_cast<std::size_t>(i)] = 1;
  const GroupedSample g(PolySample(sample.points(), dims, labels), 2);
  const Bandwidths h = Bandwidths::common(0.8, dims.r());
  const double perm_serial = time_best_of(2, [&] {
    set_max_threads(1);
    sink += permutation_test(g, jsd_label_statistic(g, spec, h), 20, 7).p_value;
  });
  const double perm_parallel = time_best_of(2, [&] {
    set_max_threads(0);
    sink += permutation_test(g, jsd_label_statistic(g, spec, h), 20, 7).p_value;
  });
  report("JSD permutation test (B=20)", perm_serial, perm_parallel);

  (void)sink;
  return 0;
}
