#include "polykde/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "polykde/bandwidth.hpp"
#include "polykde/kde.hpp"
#include "polykde/parallel.hpp"
#include "polykde/rng.hpp"
#include "polykde/sampling.hpp"
#include "polykde/specfun.hpp"

namespace polykde {

namespace sf = specfun;

double ks_distance_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = sf::norm_cdf(z[i]);
    dist = std::max(dist, std::max((i + 1) / m - cdf, cdf - i / m));
  }
  return dist;
}

std::vector<NormalityCell> run_normality(const NormalityRun& cfg, std::uint64_t seed) {
  const int d = cfg.d, r = cfg.r;
  if (cfg.kappa.size() != r) throw DimensionMismatch("run_normality: kappa length != r");
  Dims dims(std::vector<int>(static_cast<std::size_t>(r), d));

  // Mean direction e_1 on every sphere; evaluation point x = mu.
  Vector mu = Vector::Zero(dims.ambient());
  for (int j = 0; j < r; ++j) mu[dims.offset(j)] = 1.0;

  // Exact PvMF density at mu and the blockwise-trace bias factor.
  double log_f_mu = 0.0;
  double psi_sum = 0.0;
  for (int j = 0; j < r; ++j) {
    log_f_mu += log_vmf_const(d, cfg.kappa[j]) + cfg.kappa[j];
    psi_sum += -d * cfg.kappa[j];  // psi(1, kappa) = -d kappa
  }
  const double f_mu = std::exp(log_f_mu);
  const double nabla2 = psi_sum * f_mu;

  const KernelMoments km = kernel_moments(cfg.spec.family, cfg.spec.upsilon, d);
  const double v_r = std::pow(km.v_d, r);
  const int dr = d * r;

  // AMISE constant at the true curvature.
  const CurvatureMatrix curv = curvature_matrix(cfg.kappa, dims);
  const double curvature_R = curv.R.sum();
  const double C = std::pow(v_r / (km.b_d * km.b_d) * dr / (4.0 * curvature_R),
                            1.0 / (dr + 4.0));

  RngStream root(seed);
  std::vector<NormalityCell> cells;
  std::uint64_t stream_id = 0;
  for (double delta : cfg.deltas) {
    for (Eigen::Index n : cfg.ns) {
      const double h = C * std::pow(static_cast<double>(n), -1.0 / (dr + 4.0 + delta));
      const Bandwidths bw = Bandwidths::common(h, r);
      std::vector<double> fhat(static_cast<std::size_t>(cfg.M));
      RngStream cell_rng = root.substream(stream_id++);
      parallel_for(cfg.M, [&](std::int64_t rep) {
        RngStream sub = cell_rng.substream(static_cast<std::uint64_t>(rep));
        Matrix pts(n, dims.ambient());
        for (Eigen::Index i = 0; i < n; ++i) {
          for (int j = 0; j < r; ++j) {
            const Vector mu_j = mu.segment(dims.offset(j), dims.block_size(j));
            pts.row(i).segment(dims.offset(j), dims.block_size(j)) =
                sample_vmf(mu_j, cfg.kappa[j], sub).transpose();
          }
        }
        KdeModel model(PolySample(std::move(pts), dims), bw, cfg.spec, false);
        fhat[static_cast<std::size_t>(rep)] = std::exp(log_kde(model, PolyPoint{mu}));
      });

      const double scale = std::sqrt(static_cast<double>(n) * std::pow(h, dr) / (v_r * f_mu));
      double mean_fhat = 0.0;
      for (double f : fhat) mean_fhat += f;
      mean_fhat /= cfg.M;

      std::vector<double> z1(fhat.size()), z2(fhat.size());
      for (std::size_t i = 0; i < fhat.size(); ++i) {
        z1[i] = scale * (fhat[i] - mean_fhat);
        z2[i] = scale * (fhat[i] - f_mu - km.b_d * nabla2 * h * h);
      }
      auto moments = [](const std::vector<double>& z) {
        double m = 0.0;
        for (double v : z) m += v;
        m /= static_cast<double>(z.size());
        double s2 = 0.0;
        for (double v : z) s2 += (v - m) * (v - m);
        return std::pair<double, double>(m, std::sqrt(s2 / (z.size() - 1)));
      };
      NormalityCell cell;
      cell.n = n;
      cell.delta = delta;
      cell.bandwidth = h;
      std::tie(cell.mean_z1, cell.sd_z1) = moments(z1);
      std::tie(cell.mean_z2, cell.sd_z2) = moments(z2);
      cell.ks_z1 = ks_distance_normal(z1);
      cell.ks_z2 = ks_distance_normal(z2);
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<EfficiencyRow> efficiency_table(const std::vector<int>& ds, const std::vector<int>& rs,
                                            const std::vector<double>& upsilons) {
  std::vector<EfficiencyRow> out;
  for (int r : rs) {
    for (int d : ds) {
      EfficiencyRow row;
      row.r = r;
      row.d = d;
      row.vmf = 100.0 * efficiency(KernelSpec::vmf(), d, r);
      row.epa_product = 100.0 * efficiency(KernelSpec::epa(KernelCombine::Product), d, r);
      for (double u : upsilons) {
        row.sfp_spherical.push_back(
            100.0 * efficiency(KernelSpec::sfp(u, KernelCombine::Spherical), d, r));
        row.sfp_product.push_back(
            100.0 * efficiency(KernelSpec::sfp(u, KernelCombine::Product), d, r));
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace polykde
