#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "polykde/bandwidth.hpp"
#include "polykde/csv.hpp"
#include "polykde/experiments.hpp"
#include "polykde/inference.hpp"
#include "polykde/kde.hpp"
#include "polykde/parallel.hpp"
#include "polykde/sampling.hpp"

namespace polykde::cli {

namespace {

constexpr const char* kVersion = "polykde 0.1.0";
constexpr std::uint64_t kDefaultSeed = 1234;  // fixed for reproducible runs

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stoi(cell));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct CommonFlags {
  std::string dims_text;
  std::string kernel = "vmf";
  double nu = 100.0;
  std::string combine = "product";
  std::string bw_text;
  std::string bw_select;
  std::string sample_path;
  std::string out_path = "out.csv";
  int labels_col = -1;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  bool force = false;
  std::string uniform = "auto";
  std::string argv_joined;
};

void add_kernel_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--kernel", f.kernel, "Kernel family: vmf | epa | sfp")
      ->check(CLI::IsMember({"vmf", "epa", "sfp"}));
  cmd->add_option("--nu", f.nu, "sfp kernel parameter upsilon");
  cmd->add_option("--combine", f.combine, "Combination rule: product | spherical")
      ->check(CLI::IsMember({"product", "spherical"}));
}

void add_io_flags(CLI::App* cmd, CommonFlags& f, bool needs_sample = true) {
  cmd->add_option("--dims", f.dims_text, "Sphere dimensions d1,d2,...")->required();
  if (needs_sample) cmd->add_option("--sample", f.sample_path, "Sample CSV")->required();
  cmd->add_option("--out", f.out_path, "Output CSV path");
  cmd->add_option("--labels-col", f.labels_col, "0-based label column in the sample CSV");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--threads", f.threads, "Worker thread cap (0 = default)");
  cmd->add_flag("--force", f.force, "Renormalize rows regardless of input norms");
  cmd->add_option("--uniform-offset", f.uniform,
                  "Report log-density w.r.t. the uniform measure: auto | on | off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
}

KernelSpec kernel_from_flags(const CommonFlags& f) {
  const KernelCombine comb =
      f.combine == "spherical" ? KernelCombine::Spherical : KernelCombine::Product;
  if (f.kernel == "vmf") return KernelSpec::vmf();
  if (f.kernel == "epa") return KernelSpec::epa(comb);
  return KernelSpec::sfp(f.nu, comb);
}

std::optional<bool> uniform_from_flags(const CommonFlags& f) {
  if (f.uniform == "on") return true;
  if (f.uniform == "off") return false;
  return std::nullopt;
}

PolySample load_sample(const CommonFlags& f, const Dims& dims) {
  const auto lcol = f.labels_col >= 0 ? std::optional<int>(f.labels_col) : std::nullopt;
  CsvData data = read_csv(f.sample_path, lcol);
  return validate_and_normalize(data.values, dims, f.force, std::move(data.labels));
}

std::vector<std::string> metadata(const CommonFlags& f, const std::string& extra = "") {
  std::vector<std::string> meta{kVersion,
                                "seed " + std::to_string(f.seed),
                                "config " + std::to_string(fnv1a(f.argv_joined))};
  if (!extra.empty()) meta.push_back(extra);
  return meta;
}

Bandwidths resolve_bandwidth(const CommonFlags& f, const PolySample& sample,
                             const KernelSpec& spec, std::string* how) {
  if (!f.bw_text.empty()) {
    std::vector<double> h = parse_double_list(f.bw_text);
    if (static_cast<int>(h.size()) == 1 && sample.dims().r() > 1)
      h.assign(static_cast<std::size_t>(sample.dims().r()), h[0]);
    Vector hv(static_cast<Eigen::Index>(h.size()));
    for (std::size_t i = 0; i < h.size(); ++i) hv[static_cast<Eigen::Index>(i)] = h[i];
    if (how) *how = "bw explicit";
    return Bandwidths(hv);
  }
  if (f.bw_select == "rot" || f.bw_select.empty()) {
    const SelectorResult rot = rot_bandwidth(sample, spec);
    if (how) *how = "bw rot";
    return rot.h;
  }
  const CvMethod method = f.bw_select == "lscv" ? CvMethod::Lscv : CvMethod::Lcv;
  const SelectorResult cv = select_bandwidth_cv(sample, spec, method);
  if (how) *how = "bw " + f.bw_select;
  return cv.h;
}

Matrix column(const std::vector<double>& v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

double quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// Marginal sub-sample on sphere l only.
PolySample marginal_sample(const PolySample& pooled, int l) {
  const Dims& dims = pooled.dims();
  Dims sub({dims.d(l)});
  Matrix block = pooled.block(l);
  return PolySample(std::move(block), sub, pooled.labels());
}

int run_impl(int argc, const char* const* argv) {
  CLI::App app{std::string(kVersion) + " - kernel smoothing on products of spheres"};
  app.require_subcommand(1);

  CommonFlags f;
  for (int i = 0; i < argc; ++i) {
    f.argv_joined += argv[i];
    f.argv_joined += ' ';
  }

  // eval ----------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Evaluate the log-density on a point grid");
  std::string at_path;
  add_io_flags(eval, f);
  add_kernel_flags(eval, f);
  eval->add_option("--bw", f.bw_text, "Bandwidths h1,h2,... (or one common value)");
  eval->add_option("--bw-select", f.bw_select, "Selector: rot | lscv | lcv")
      ->check(CLI::IsMember({"rot", "lscv", "lcv"}));
  eval->add_option("--at", at_path, "CSV of evaluation points")->required();

  // loo / rank ----------------------------------------------------------
  auto* loo = app.add_subcommand("loo", "Leave-one-out log-density at each sample point");
  add_io_flags(loo, f);
  add_kernel_flags(loo, f);
  loo->add_option("--bw", f.bw_text, "Bandwidths");
  loo->add_option("--bw-select", f.bw_select, "Selector: rot | lscv | lcv");

  auto* rank = app.add_subcommand("rank", "Density ranking (1 = highest density)");
  add_io_flags(rank, f);
  add_kernel_flags(rank, f);
  rank->add_option("--bw", f.bw_text, "Bandwidths");
  rank->add_option("--bw-select", f.bw_select, "Selector: rot | lscv | lcv");
  bool rank_with_self = false;
  rank->add_flag("--with-self", rank_with_self, "Keep the self term (non-LOO ranking)");

  // sample ----------------------------------------------------------------
  auto* smp = app.add_subcommand("sample", "Draw from a kde, a PvMF, or one kernel bump");
  std::string from = "kde";
  Eigen::Index n_draws = 100;
  std::string mu_text, kappa_text;
  smp->add_option("--from", from, "kde | vmf | kernel")
      ->check(CLI::IsMember({"kde", "vmf", "kernel"}));
  smp->add_option("-n,--n", n_draws, "Number of draws")->required();
  smp->add_option("--mu", mu_text, "Center point coordinates (vmf/kernel modes)");
  smp->add_option("--kappa", kappa_text, "PvMF concentrations kappa1,kappa2,...");
  smp->add_option("--dims", f.dims_text, "Sphere dimensions d1,d2,...")->required();
  smp->add_option("--sample", f.sample_path, "Sample CSV (kde mode)");
  smp->add_option("--out", f.out_path, "Output CSV path");
  smp->add_option("--seed", f.seed, "RNG seed");
  smp->add_option("--threads", f.threads, "Worker thread cap");
  smp->add_flag("--force", f.force, "Renormalize rows regardless of input norms");
  add_kernel_flags(smp, f);
  smp->add_option("--bw", f.bw_text, "Bandwidths (kde/kernel modes)");
  smp->add_option("--bw-select", f.bw_select, "Selector for kde mode");

  // bw ----------------------------------------------------------------
  auto* bw = app.add_subcommand("bw", "Bandwidth selection");
  std::string bw_method = "rot";
  bool per_sphere = false;
  bw->add_option("method", bw_method, "rot | lscv | lcv")
      ->check(CLI::IsMember({"rot", "lscv", "lcv"}));
  add_io_flags(bw, f);
  add_kernel_flags(bw, f);
  bw->add_flag("--per-sphere", per_sphere, "Coordinate-wise CV search");

  // test ----------------------------------------------------------------
  auto* test = app.add_subcommand("test", "k-sample homogeneity tests");
  std::string test_stat = "jsd";
  int B = 199;
  std::string c_text;
  std::string fdr_method = "by";
  bool test_per_sphere = false;
  test->add_option("statistic", test_stat, "jsd | loc | scatter")
      ->check(CLI::IsMember({"jsd", "loc", "scatter"}));
  add_io_flags(test, f);
  add_kernel_flags(test, f);
  test->add_option("--bw", f.bw_text, "Bandwidths for the JSD statistic");
  test->add_option("--bw-select", f.bw_select, "rot: use c x h_ROT of the pooled sample");
  test->add_option("--c", c_text, "ROT multipliers c1,c2,... (with --bw-select rot)");
  test->add_option("-B,--permutations", B, "Permutation count");
  test->add_flag("--per-sphere", test_per_sphere, "Run the test marginally on each sphere");
  test->add_option("--fdr", fdr_method, "Correction for --per-sphere: by | bh | none")
      ->check(CLI::IsMember({"by", "bh", "none"}));

  // efficiency ----------------------------------------------------------
  auto* eff = app.add_subcommand("efficiency", "Kernel efficiency table (percent)");
  std::string eff_d = "1,2,3,5,10", eff_r = "1,2,3,5,10", eff_nu = "1,10,100";
  eff->add_option("--d", eff_d, "Common dimensions");
  eff->add_option("--r", eff_r, "Sphere counts");
  eff->add_option("--nu", eff_nu, "sfp upsilons");
  eff->add_option("--out", f.out_path, "Output CSV path");

  // experiment ----------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "Simulation harnesses");
  auto* norm = exp->add_subcommand("normality", "Z-statistic normality study");
  int norm_d = 2, norm_r = 2, norm_M = 2000;
  std::string norm_kappa = "5,5", norm_delta = "-1,0,4", norm_n = "128,512,2048";
  norm->add_option("--d", norm_d, "Common sphere dimension");
  norm->add_option("--r", norm_r, "Sphere count");
  norm->add_option("--kappa", norm_kappa, "PvMF concentrations");
  norm->add_option("--delta", norm_delta, "Bandwidth rate offsets");
  norm->add_option("--n", norm_n, "Sample sizes");
  norm->add_option("-M,--replicates", norm_M, "Monte Carlo replicates");
  norm->add_option("--out", f.out_path, "Output CSV path");
  norm->add_option("--seed", f.seed, "RNG seed");
  norm->add_option("--threads", f.threads, "Worker thread cap");
  add_kernel_flags(norm, f);

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (f.threads == 0) {
    if (const char* env = std::getenv("POLYKDE_THREADS")) f.threads = std::atoi(env);
  }
  set_max_threads(f.threads);

  try {
    if (*eval || *loo || *rank) {
      const Dims dims(parse_int_list(f.dims_text));
      PolySample sample = load_sample(f, dims);
      const KernelSpec spec = kernel_from_flags(f);
      std::string how;
      const Bandwidths h = resolve_bandwidth(f, sample, spec, &how);
      KdeModel model(std::move(sample), h, spec, uniform_from_flags(f));
      std::ostringstream extra;
      extra << how << "; uniform_offset " << (model.uniform_offset() ? "on" : "off") << "; h";
      for (int j = 0; j < dims.r(); ++j) extra << ' ' << h[j];
      if (*eval) {
        const CsvData grid = read_csv(at_path);
        PolySample at = validate_and_normalize(grid.values, dims, f.force);
        write_csv(f.out_path, column(log_kde_batch(model, at.points())), metadata(f, extra.str()),
                  "log_density");
      } else if (*loo) {
        write_csv(f.out_path, column(loo_log_kde(model)), metadata(f, extra.str()),
                  "loo_log_density");
      } else {
        const std::vector<int> ranks = rank_by_density(model, !rank_with_self);
        std::vector<double> as_double(ranks.begin(), ranks.end());
        write_csv(f.out_path, column(as_double), metadata(f, extra.str()), "rank");
      }
      return 0;
    }

    if (*smp) {
      const Dims dims(parse_int_list(f.dims_text));
      const KernelSpec spec = kernel_from_flags(f);
      RngStream rng(f.seed);
      Matrix draws;
      if (from == "kde") {
        if (f.sample_path.empty()) throw std::runtime_error("sample --from kde needs --sample");
        PolySample sample = load_sample(f, dims);
        const Bandwidths h = resolve_bandwidth(f, sample, spec, nullptr);
        KdeModel model(std::move(sample), h, spec);
        draws = sample_kde(model, n_draws, rng).points();
      } else {
        if (mu_text.empty()) throw std::runtime_error("sample --from vmf/kernel needs --mu");
        const std::vector<double> mu_list = parse_double_list(mu_text);
        if (static_cast<int>(mu_list.size()) != dims.ambient())
          throw std::runtime_error("sample: --mu length must equal the ambient dimension");
        Matrix mu_row(1, dims.ambient());
        for (int i = 0; i < dims.ambient(); ++i) mu_row(0, i) = mu_list[static_cast<std::size_t>(i)];
        const PolySample mu_sample = validate_and_normalize(mu_row, dims, true);
        const PolyPoint mu = mu_sample.point(0);
        draws = Matrix(n_draws, dims.ambient());
        if (from == "vmf") {
          if (kappa_text.empty()) throw std::runtime_error("sample --from vmf needs --kappa");
          const std::vector<double> kappas = parse_double_list(kappa_text);
          if (static_cast<int>(kappas.size()) != dims.r())
            throw std::runtime_error("sample: --kappa length must equal r");
          parallel_for(n_draws, [&](std::int64_t i) {
            RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
            for (int j = 0; j < dims.r(); ++j) {
              const Vector mu_j = mu.block(dims, j);
              draws.row(i).segment(dims.offset(j), dims.block_size(j)) =
                  sample_vmf(mu_j, kappas[static_cast<std::size_t>(j)], sub).transpose();
            }
          });
        } else {
          if (f.bw_text.empty()) throw std::runtime_error("sample --from kernel needs --bw");
          std::vector<double> hl = parse_double_list(f.bw_text);
          if (static_cast<int>(hl.size()) == 1 && dims.r() > 1)
            hl.assign(static_cast<std::size_t>(dims.r()), hl[0]);
          Vector hv(static_cast<Eigen::Index>(hl.size()));
          for (std::size_t i = 0; i < hl.size(); ++i) hv[static_cast<Eigen::Index>(i)] = hl[i];
          const Bandwidths h(hv);
          parallel_for(n_draws, [&](std::int64_t i) {
            RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
            draws.row(i) = sample_kernel_polysphere(spec, mu, dims, h, sub).transpose();
          });
        }
      }
      write_csv(f.out_path, draws, metadata(f));
      return 0;
    }

    if (*bw) {
      const Dims dims(parse_int_list(f.dims_text));
      PolySample sample = load_sample(f, dims);
      const KernelSpec spec = kernel_from_flags(f);
      SelectorResult result;
      if (bw_method == "rot") {
        result = rot_bandwidth(sample, spec);
      } else {
        result = select_bandwidth_cv(sample, spec,
                                     bw_method == "lscv" ? CvMethod::Lscv : CvMethod::Lcv,
                                     per_sphere ? CvSearch::PerSphere : CvSearch::Common);
      }
      Matrix row(1, dims.r());
      for (int j = 0; j < dims.r(); ++j) row(0, j) = result.h[j];
      std::ostringstream extra;
      extra << "method " << result.method << "; residual " << result.residual_norm << "; loss "
            << result.loss << "; iterations " << result.iterations;
      write_csv(f.out_path, row, metadata(f, extra.str()), "h1,h2,...");
      return 0;
    }

    if (*test) {
      const Dims dims(parse_int_list(f.dims_text));
      if (f.labels_col < 0) throw std::runtime_error("test: --labels-col is required");
      PolySample pooled = load_sample(f, dims);
      const KernelSpec spec = kernel_from_flags(f);
      const GroupedSample grouped = GroupedSample::from_labels(std::move(pooled));

      auto run_one = [&](const GroupedSample& g, std::uint64_t seed_use,
                         const Bandwidths& h) -> TestResult {
        if (test_stat == "jsd") return k_sample_test(g, spec, h, B, seed_use);
        const LocScatter which = test_stat == "loc" ? LocScatter::Location : LocScatter::Scatter;
        return permutation_test(
            g, [&](const std::vector<int>& labels) {
              return loc_scatter_statistic(g.pooled(), labels, which);
            },
            B, seed_use);
      };

      if (test_per_sphere) {
        // Marginal tests per sphere, then multiplicity correction.
        std::vector<TestResult> results;
        for (int l = 0; l < dims.r(); ++l) {
          const GroupedSample marg = GroupedSample::from_labels(marginal_sample(grouped.pooled(), l));
          Bandwidths h = Bandwidths::common(1.0, 1);
          if (test_stat == "jsd") {
            std::string how;
            CommonFlags fl = f;
            const Bandwidths full =
                resolve_bandwidth(fl, grouped.pooled(), spec, &how);  // per-sphere slice below
            h = Bandwidths::common(full[l], 1);
            if (!c_text.empty()) {
              const std::vector<double> cs = parse_double_list(c_text);
              h = Bandwidths::common(full[l] * cs.front(), 1);
            }
          }
          results.push_back(run_one(marg, RngStream(f.seed).substream(l).next_u64(), h));
        }
        std::vector<double> pvals;
        for (const auto& res : results) pvals.push_back(res.p_value);
        std::vector<double> adjusted =
            fdr_method == "none"
                ? pvals
                : fdr_adjust(pvals, fdr_method == "bh" ? FdrMethod::BenjaminiHochberg
                                                       : FdrMethod::BenjaminiYekutieli);
        Matrix rows(dims.r(), 4);
        for (int l = 0; l < dims.r(); ++l) {
          rows(l, 0) = l;
          rows(l, 1) = results[static_cast<std::size_t>(l)].statistic;
          rows(l, 2) = pvals[static_cast<std::size_t>(l)];
          rows(l, 3) = adjusted[static_cast<std::size_t>(l)];
        }
        write_csv(f.out_path, rows, metadata(f, "B " + std::to_string(B)),
                  "sphere,statistic,p_value,p_adjusted");
        return 0;
      }

      std::vector<double> cs{1.0};
      bool rot_scaled = false;
      if (!c_text.empty() || f.bw_select == "rot") {
        rot_scaled = test_stat == "jsd" && f.bw_text.empty();
        if (!c_text.empty()) cs = parse_double_list(c_text);
      }
      std::vector<TestResult> results;
      std::vector<double> hs_used;
      if (test_stat == "jsd" && rot_scaled) {
        results = k_sample_test_rot(grouped, spec, cs, B, f.seed);
        const SelectorResult rot = rot_bandwidth(grouped.pooled(), spec);
        for (double c : cs) hs_used.push_back(c * rot.h[0]);
      } else {
        std::string how;
        const Bandwidths h = test_stat == "jsd"
                                 ? resolve_bandwidth(f, grouped.pooled(), spec, &how)
                                 : Bandwidths::common(1.0, dims.r());
        results.push_back(run_one(grouped, f.seed, h));
        hs_used.push_back(h[0]);
        cs = {1.0};
      }
      Matrix rows(static_cast<Eigen::Index>(results.size()), 7);
      for (std::size_t i = 0; i < results.size(); ++i) {
        const TestResult& res = results[i];
        rows(static_cast<Eigen::Index>(i), 0) = cs[i];
        rows(static_cast<Eigen::Index>(i), 1) = hs_used[i];
        rows(static_cast<Eigen::Index>(i), 2) = res.statistic;
        rows(static_cast<Eigen::Index>(i), 3) = res.p_value;
        rows(static_cast<Eigen::Index>(i), 4) = quantile_of(res.replicates, 0.05);
        rows(static_cast<Eigen::Index>(i), 5) = quantile_of(res.replicates, 0.50);
        rows(static_cast<Eigen::Index>(i), 6) = quantile_of(res.replicates, 0.95);
      }
      write_csv(f.out_path, rows, metadata(f, "B " + std::to_string(B)),
                "c,h1,statistic,p_value,rep_q05,rep_q50,rep_q95");
      return 0;
    }

    if (*eff) {
      const std::vector<int> dlist = parse_int_list(eff_d);
      const std::vector<int> rlist = parse_int_list(eff_r);
      const std::vector<double> nulist = parse_double_list(eff_nu);
      const auto table = efficiency_table(dlist, rlist, nulist);
      Matrix rows(static_cast<Eigen::Index>(table.size()),
                  static_cast<Eigen::Index>(4 + 2 * nulist.size()));
      std::ostringstream header;
      header << "r,d,vmf";
      for (double u : nulist) header << ",sfpS_" << u;
      header << ",epaP";
      for (double u : nulist) header << ",sfpP_" << u;
      for (std::size_t i = 0; i < table.size(); ++i) {
        Eigen::Index c = 0;
        const auto& row = table[i];
        rows(static_cast<Eigen::Index>(i), c++) = row.r;
        rows(static_cast<Eigen::Index>(i), c++) = row.d;
        rows(static_cast<Eigen::Index>(i), c++) = row.vmf;
        for (double v : row.sfp_spherical) rows(static_cast<Eigen::Index>(i), c++) = v;
        rows(static_cast<Eigen::Index>(i), c++) = row.epa_product;
        for (double v : row.sfp_product) rows(static_cast<Eigen::Index>(i), c++) = v;
      }
      write_csv(f.out_path, rows, metadata(f), header.str());
      return 0;
    }

    if (*norm) {
      NormalityRun cfg;
      cfg.d = norm_d;
      cfg.r = norm_r;
      const std::vector<double> kl = parse_double_list(norm_kappa);
      cfg.kappa = Vector(static_cast<Eigen::Index>(kl.size()));
      for (std::size_t i = 0; i < kl.size(); ++i) cfg.kappa[static_cast<Eigen::Index>(i)] = kl[i];
      cfg.deltas = parse_double_list(norm_delta);
      cfg.ns.clear();
      for (int n : parse_int_list(norm_n)) cfg.ns.push_back(n);
      cfg.M = norm_M;
      cfg.spec = kernel_from_flags(f);
      const auto cells = run_normality(cfg, f.seed);
      Matrix rows(static_cast<Eigen::Index>(cells.size()), 9);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& cell = cells[i];
        const Eigen::Index ri = static_cast<Eigen::Index>(i);
        rows(ri, 0) = static_cast<double>(cell.n);
        rows(ri, 1) = cell.delta;
        rows(ri, 2) = cell.bandwidth;
        rows(ri, 3) = cell.mean_z1;
        rows(ri, 4) = cell.sd_z1;
        rows(ri, 5) = cell.ks_z1;
        rows(ri, 6) = cell.mean_z2;
        rows(ri, 7) = cell.sd_z2;
        rows(ri, 8) = cell.ks_z2;
      }
      write_csv(f.out_path, rows, metadata(f),
                "n,delta,h,mean_z1,sd_z1,ks_z1,mean_z2,sd_z2,ks_z2");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "polykde: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace

int run(int argc, const char* const* argv) { return run_impl(argc, argv); }

}  // namespace polykde::cli
