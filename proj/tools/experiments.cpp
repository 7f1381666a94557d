#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boxplus/dbm.hpp"
#include "boxplus/io.hpp"
#include "boxplus/matrix_models.hpp"
#include "boxplus/parallel.hpp"
#include "boxplus/rng.hpp"
#include "boxplus/spectral_stats.hpp"
#include "boxplus/subordination.hpp"
#include "boxplus/svg.hpp"
#include "boxplus/unitary_diffusion.hpp"

namespace boxplus::cli {

namespace fs = std::filesystem;

namespace {

// Tracks files written by one run so a failure can remove partial outputs.
class Artifacts {
 public:
  Artifacts(const fs::path& dir, bool quiet) : dir_(dir), quiet_(quiet) {
    fs::create_directories(dir_);
  }

  const fs::path& dir() const { return dir_; }

  fs::path reserve(const std::string& rel) {
    const fs::path p = dir_ / rel;
    written_.push_back(p);
    return p;
  }

  void text(const std::string& rel, const std::string& content) {
    write_text_file(reserve(rel), content);
  }

  void csv(const std::string& rel, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    write_csv(reserve(rel), header, rows);
  }

  void note(const std::string& msg) const {
    if (!quiet_) std::printf("%s\n", msg.c_str());
  }

  void rollback() {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }

 private:
  fs::path dir_;
  bool quiet_;
  std::vector<fs::path> written_;
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> log_descending(double hi, double lo, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = hi * std::pow(lo / hi, static_cast<double>(i) / (n - 1));
  return v;
}

double median(std::vector<double> v) {
  if (v.empty()) throw NumericError("median of empty set");
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

struct ResolvedCommon {
  std::map<std::string, std::string> manifest;
};

void put(ResolvedCommon& rc, const std::string& k, const std::string& v) { rc.manifest[k] = v; }
void put(ResolvedCommon& rc, const std::string& k, double v) { rc.manifest[k] = format_double(v); }
void put(ResolvedCommon& rc, const std::string& k, int v) { rc.manifest[k] = std::to_string(v); }
void put(ResolvedCommon& rc, const std::string& k, std::uint64_t v) {
  rc.manifest[k] = std::to_string(v);
}

void finish_manifest(Artifacts& art, const std::string& command, ResolvedCommon& rc,
                     const RunOptions& opts) {
  put(rc, "seed", opts.seed);
  put(rc, "threads", opts.threads);
  art.text("manifest.json", manifest_json(command, rc.manifest));
}

// quantile spectrum of a measure
std::vector<double> spectrum_of(const Measure& m, int n) { return m.quantiles(n); }

struct HSample {
  EigenSystem es;
  MatrixC u;  // the Haar factor conjugating Y, kept for overlap statistics
};

HSample sample_h(const EnsembleConfig& cfg, RngStream& rng, bool keep_u = false) {
  const MatrixC x = regularize(cfg.x, cfg.epsilon_reg, cfg.beta, rng);
  const MatrixC v = sample_haar(cfg.n, cfg.beta, rng);
  const MatrixC u = sample_haar(cfg.n, cfg.beta, rng);
  VectorR y(cfg.n);
  for (int i = 0; i < cfg.n; ++i) y(i) = cfg.y[i];
  HSample s;
  s.es = eigh(assemble_h(x, y, v, u));
  if (keep_u) s.u = u;
  return s;
}

}  // namespace

void run_freeconv(Config& cfg, const RunOptions& opts) {
  Artifacts art(opts.out, opts.quiet);
  try {
    const std::string mu1_spec = cfg.get_string("freeconv.mu1", "semicircle:1");
    const std::string mu2_spec = cfg.get_string("freeconv.mu2", "semicircle:1");
    const double grid_min = cfg.get_double("freeconv.grid_min", -3.0);
    const double grid_max = cfg.get_double("freeconv.grid_max", 3.0);
    const int grid_points = cfg.get_int("freeconv.grid_points", 1201);
    const double eta0 = cfg.get_double("freeconv.eta0", 1e-3);
    SolverConfig scfg;
    scfg.tol = cfg.get_double("freeconv.tol", scfg.tol);
    scfg.max_iter = cfg.get_int("freeconv.max_iter", scfg.max_iter);
    cfg.assert_fully_consumed();

    ResolvedCommon rc;
    put(rc, "mu1", mu1_spec);
    put(rc, "mu2", mu2_spec);
    put(rc, "grid_min", grid_min);
    put(rc, "grid_max", grid_max);
    put(rc, "grid_points", grid_points);
    put(rc, "eta0", eta0);
    put(rc, "tol", scfg.tol);
    put(rc, "max_iter", scfg.max_iter);
    finish_manifest(art, "freeconv", rc, opts);

    const Measure m1 = parse_measure(mu1_spec);
    const Measure m2 = parse_measure(mu2_spec);
    const auto grid = linspace(grid_min, grid_max, grid_points);
    const auto res = free_convolution(m1, m2, grid, eta0, scfg);
    if (res.non_converged > grid_points / 100)
      throw NumericError("free_convolution: " + std::to_string(res.non_converged) +
                         " grid points did not converge");

    std::vector<std::vector<double>> rows;
    const auto& pts = res.density.grid_points();
    const auto& dens = res.density.grid_density();
    for (std::size_t i = 0; i < pts.size(); ++i) rows.push_back({pts[i], dens[i]});
    art.csv("density.csv", {"E", "density"}, rows);
    save_measure(res.density, art.reserve("density.measure"));

    SvgSeries s;
    s.x = pts;
    s.y = dens;
    write_svg_plot(art.reserve("density.svg"), "free additive convolution", {s}, "E", "density");
    art.note("freeconv: density on [" + format_double(grid_min) + ", " +
             format_double(grid_max) + "], renormalization " +
             format_double(res.renormalization));
  } catch (...) {
    art.rollback();
    throw;
  }
}

void run_sample(Config& cfg, const RunOptions& opts) {
  Artifacts art(opts.out, opts.quiet);
  try {
    EnsembleConfig ec;
    ec.n = cfg.get_int("sample.n", 500);
    ec.beta = cfg.get_int("sample.beta", 2);
    const std::string mu1_spec = cfg.get_string("sample.mu1", "semicircle:1");
    const std::string mu2_spec = cfg.get_string("sample.mu2", "semicircle:1");
    ec.epsilon_reg = cfg.get_double("sample.epsilon_reg", 1e-8);
    ec.a_exp = cfg.get_double("sample.a", 0.2);
    ec.b_exp = cfg.get_double("sample.b", 0.002);
    const int trials = cfg.get_int("sample.trials", 20);
    const double eta0 = cfg.get_double("sample.eta0", 1e-3);
    cfg.assert_fully_consumed();

    ResolvedCommon rc;
    put(rc, "n", ec.n);
    put(rc, "beta", ec.beta);
    put(rc, "mu1", mu1_spec);
    put(rc, "mu2", mu2_spec);
    put(rc, "epsilon_reg", ec.epsilon_reg);
    put(rc, "a", ec.a_exp);
    put(rc, "b", ec.b_exp);
    put(rc, "trials", trials);
    put(rc, "eta0", eta0);
    finish_manifest(art, "sample", rc, opts);

    const Measure m1 = parse_measure(mu1_spec);
    const Measure m2 = parse_measure(mu2_spec);
    ec.x = spectrum_of(m1, ec.n);
    ec.y = spectrum_of(m2, ec.n);
    ec.validate();

    std::vector<VectorR> spectra(trials);
    const std::uint64_t tag = tag_from_label("sample");
    parallel_trials(trials, opts.threads, [&](int t) {
      RngStream rng = derive_stream(opts.seed, tag, t);
      spectra[t] = sample_h(ec, rng).es.values;
    });

    std::vector<double> pooled;
    for (int t = 0; t < trials; ++t) {
      std::vector<std::vector<double>> rows;
      for (int i = 0; i < ec.n; ++i) {
        rows.push_back({static_cast<double>(i), spectra[t](i)});
        pooled.push_back(spectra[t](i));
      }
      char name[64];
      std::snprintf(name, sizeof(name), "spectrum_%03d.csv", t);
      art.csv(name, {"index", "eigenvalue"}, rows);
    }

    // ESD against the computed free convolution
    const double span = m1.support_bound() + m2.support_bound() + 0.5;
    const auto grid = linspace(-span, span, 1201);
    const auto conv = free_convolution(m1, m2, grid, eta0);
    const double ks =
        ks_distance(pooled, [&](double s) { return conv.density.cdf(s); });

    StatisticsReport rep;
    rep.n = ec.n;
    rep.beta = ec.beta;
    rep.trials = trials;
    rep.gap_ks = ks;  // KS of the ESD in this command
    rep.gap_count = static_cast<int>(pooled.size());
    for (int t = 0; t < trials; ++t) rep.seeds.push_back(derive_seed(opts.seed, tag, t));
    art.text("esd_report.json", report_to_json(rep));

    std::vector<std::pair<double, double>> ref;
    for (std::size_t i = 0; i < conv.density.grid_points().size(); i += 4)
      ref.emplace_back(conv.density.grid_points()[i], conv.density.grid_density()[i]);
    write_svg_histogram(art.reserve("esd.svg"), "empirical spectral distribution", pooled, 60,
                        ref);
    art.note("sample: pooled ESD vs free convolution, KS = " + format_double(ks));
  } catch (...) {
    art.rollback();
    throw;
  }
}

void run_diffuse(Config& cfg, const RunOptions& opts) {
  Artifacts art(opts.out, opts.quiet);
  try {
    EnsembleConfig ec;
    ec.n = cfg.get_int("diffuse.n", 200);
    ec.beta = cfg.get_int("diffuse.beta", 2);
    const std::string mu2_spec = cfg.get_string("diffuse.mu2", "semicircle:1");
    ec.a_exp = cfg.get_double("diffuse.a", 0.2);
    ec.b_exp = cfg.get_double("diffuse.b", 0.002);
    const int steps = cfg.get_int("diffuse.steps", 200);
    const int trials = cfg.get_int("diffuse.trials", 1);
    const int record_every = cfg.get_int("diffuse.record_every", 10);
    const bool checkpoint = cfg.get_bool("diffuse.checkpoint_u", false);
    cfg.assert_fully_consumed();

    ResolvedCommon rc;
    put(rc, "n", ec.n);
    put(rc, "beta", ec.beta);
    put(rc, "mu2", mu2_spec);
    put(rc, "a", ec.a_exp);
    put(rc, "b", ec.b_exp);
    put(rc, "steps", steps);
    put(rc, "trials", trials);
    put(rc, "record_every", record_every);
    put(rc, "checkpoint_u", checkpoint ? "true" : "false");
    finish_manifest(art, "diffuse", rc, opts);

    const Measure m2 = parse_measure(mu2_spec);
    ec.x = std::vector<double>(ec.n, 0.0);
    ec.y = spectrum_of(m2, ec.n);
    ec.validate();
    if (checkpoint && ec.n > 50)
      throw ConfigError("diffuse.checkpoint_u is limited to n <= 50");

    const std::uint64_t tag = tag_from_label("diffuse");
    std::vector<TrajectoryResult> results(trials);
    parallel_trials(trials, opts.threads, [&](int t) {
      RngStream rng = derive_stream(opts.seed, tag, t);
      results[t] = trajectory(ec, steps, rng, record_every);
    });

    for (int t = 0; t < trials; ++t) {
      std::vector<std::vector<double>> rows;
      for (const auto& p : results[t].samples)
        rows.push_back({p.t, p.unitarity_defect, p.norm_u_minus_i, p.norm_m});
      char name[64];
      std::snprintf(name, sizeof(name), "trajectory_%03d.csv", t);
      art.csv(name, {"t", "unitarity_defect", "norm_u_minus_i", "norm_m"}, rows);
      if (checkpoint) {
        std::vector<std::vector<double>> urows;
        const auto& u = results[t].final_state.u;
        for (int i = 0; i < ec.n; ++i)
          for (int j = 0; j < ec.n; ++j)
            urows.push_back({static_cast<double>(i), static_cast<double>(j), u(i, j).real(),
                             u(i, j).imag()});
        std::snprintf(name, sizeof(name), "u_final_%03d.csv", t);
        art.csv(name, {"row", "col", "re", "im"}, urows);
      }
    }
    double sup = 0.0;
    for (const auto& r : results) sup = std::max(sup, r.sup_norm_u_minus_i);
    art.note("diffuse: sup ||U - I|| over all trials = " + format_double(sup));
  } catch (...) {
    art.rollback();
    throw;
  }
}

namespace {

struct CoupleSummary {
  std::vector<double> n_rho_supdiff;  // per trial
  double rho0 = 0.0;
  int failures = 0;
};

CoupleSummary couple_trials(const EnsembleConfig& base, int steps, int trials, double kappa,
                            std::uint64_t seed, int threads, Artifacts* art,
                            const std::string& prefix) {
  // classical locations of the limiting free convolution for the bulk set
  const Measure lim1 = Measure::semicircle(1.0, 4001);
  Measure m1 = Measure::from_spectrum(base.x);
  Measure m2 = Measure::from_spectrum(base.y);
  const double span = m1.support_bound() + m2.support_bound() + 0.5;
  const auto conv = free_convolution(m1, m2, linspace(-span, span, 1201), 1e-3);
  const auto gamma_locs = classical_locations(conv.density, base.n);

  // bulk interval: where the density clears 10% of its peak
  const auto& pts = conv.density.grid_points();
  const auto& dens = conv.density.grid_density();
  const double peak = *std::max_element(dens.begin(), dens.end());
  double lo = pts.front(), hi = pts.back();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (dens[i] > 0.1 * peak) {
      lo = pts[i];
      break;
    }
  for (std::size_t i = pts.size(); i-- > 0;)
    if (dens[i] > 0.1 * peak) {
      hi = pts[i];
      break;
    }

  CoupleSummary sum;
  // density of the limit at the bulk center, for the N rho supdiff scale
  Cplx m_center = conv.density.stieltjes(Cplx(0.5 * (lo + hi), 1e-3));
  sum.rho0 = m_center.imag() / M_PI;

  const std::uint64_t tag = tag_from_label("couple");
  std::vector<CoupledPaths> paths(trials);
  parallel_trials(trials, threads, [&](int t) {
    MatrixCoupleConfig mc;
    mc.ensemble = base;
    mc.steps = steps;
    mc.kappa = kappa;
    mc.classical_locs = gamma_locs;
    mc.bulk_lo = lo;
    mc.bulk_hi = hi;
    RngStream rng = derive_stream(seed, tag, static_cast<std::uint64_t>(base.n) * 1000 + t);
    paths[t] = couple_run_matrix(mc, rng);
  });

  for (int t = 0; t < trials; ++t) {
    const auto& p = paths[t];
    if (!p.ok) {
      ++sum.failures;
      continue;
    }
    sum.n_rho_supdiff.push_back(base.n * sum.rho0 * p.sup_diff.back());
    if (art) {
      std::vector<std::vector<double>> rows;
      for (std::size_t k = 0; k < p.times.size(); ++k)
        rows.push_back({p.times[k], p.sup_diff[k], p.min_gap_lambda[k], p.min_gap_mu[k]});
      char name[96];
      std::snprintf(name, sizeof(name), "%scouple_n%d_%03d.csv", prefix.c_str(), base.n, t);
      art->csv(name, {"t", "sup_diff", "min_gap_lambda", "min_gap_mu"}, rows);
    }
  }
  if (sum.n_rho_supdiff.empty()) throw NumericError("couple: every trial failed");
  return sum;
}

}  // namespace

void run_couple(Config& cfg, const RunOptions& opts) {
  Artifacts art(opts.out, opts.quiet);
  try {
    EnsembleConfig ec;
    ec.n = cfg.get_int("couple.n", 300);
    ec.beta = cfg.get_int("couple.beta", 2);
    const std::string mu1_spec = cfg.get_string("couple.mu1", "semicircle:1");
    const std::string mu2_spec = cfg.get_string("couple.mu2", "semicircle:1");
    ec.epsilon_reg = cfg.get_double("couple.epsilon_reg", 1e-8);
    ec.a_exp = cfg.get_double("couple.a", 0.2);
    ec.b_exp = cfg.get_double("couple.b", 0.002);
    const int steps = cfg.get_int("couple.steps", 200);
    const int trials = cfg.get_int("couple.trials", 20);
    const double kappa = cfg.get_double("couple.kappa", 0.1);
    const std::string mode = cfg.get_string("couple.mode", "matrix");
    cfg.assert_fully_consumed();

    ResolvedCommon rc;
    put(rc, "n", ec.n);
    put(rc, "beta", ec.beta);
    put(rc, "mu1", mu1_spec);
    put(rc, "mu2", mu2_spec);
    put(rc, "epsilon_reg", ec.epsilon_reg);
    put(rc, "a", ec.a_exp);
    put(rc, "b", ec.b_exp);
    put(rc, "steps", steps);
    put(rc, "trials", trials);
    put(rc, "kappa", kappa);
    put(rc, "mode", mode);
    finish_manifest(art, "couple", rc, opts);

    ec.x = spectrum_of(parse_measure(mu1_spec), ec.n);
    ec.y = spectrum_of(parse_measure(mu2_spec), ec.n);
    ec.validate();

    if (mode == "matrix") {
      const auto sum = couple_trials(ec, steps, trials, kappa, opts.seed, opts.threads, &art, "");
      std::vector<double> q = sum.n_rho_supdiff;
      std::sort(q.begin(), q.end());
      std::ostringstream agg;
      agg << "{\n  \"n\": " << ec.n << ",\n  \"beta\": " << ec.beta
          << ",\n  \"trials\": " << trials << ",\n  \"failures\": " << sum.failures
          << ",\n  \"rho0\": " << format_double(sum.rho0)
          << ",\n  \"median_N_supdiff\": " << format_double(median(q))
          << ",\n  \"quantiles\": {\"q10\": " << format_double(q[q.size() / 10])
          << ", \"q50\": " << format_double(q[q.size() / 2])
          << ", \"q90\": " << format_double(q[(9 * q.size()) / 10]) << "}\n}\n";
      art.text("aggregate.json", agg.str());
      art.note("couple: median N rho supdiff = " + format_double(median(q)));
    } else if (mode == "synthetic") {
      SyntheticCoupleConfig sc;
      sc.n = ec.n;
      sc.beta = ec.beta;
      sc.steps = steps;
      sc.b_exp = ec.b_exp;
      const int w = short_range_halfwidth(ec.n, ec.a_exp);
      sc.gamma = MatrixR::Zero(ec.n, ec.n);
      for (int i = 0; i < ec.n; ++i)
        for (int j = std::max(0, i - w); j <= std::min(ec.n - 1, i + w); ++j)
          sc.gamma(i, j) = std::pow(ec.n, ec.a_exp) / ec.n;
      const std::uint64_t tag = tag_from_label("couple");
      std::vector<double> finals(trials);
      std::vector<CoupledPaths> paths(trials);
      parallel_trials(trials, opts.threads, [&](int t) {
        RngStream rng = derive_stream(opts.seed, tag, static_cast<std::uint64_t>(t));
        paths[t] = couple_run_synthetic(sc, rng);
        finals[t] = ec.n * paths[t].sup_diff.back();
      });
      for (int t = 0; t < trials; ++t) {
        std::vector<std::vector<double>> rows;
        const auto& p = paths[t];
        for (std::size_t k = 0; k < p.times.size(); ++k)
          rows.push_back({p.times[k], p.sup_diff[k], p.min_gap_lambda[k], p.min_gap_mu[k]});
        char name[96];
        std::snprintf(name, sizeof(name), "couple_synthetic_%03d.csv", t);
        art.csv(name, {"t", "sup_diff", "min_gap_lambda", "min_gap_mu"}, rows);
      }
      art.note("couple (synthetic): median N supdiff = " + format_double(median(finals)));
    } else {
      throw ConfigError("couple.mode must be matrix or synthetic");
    }
  } catch (...) {
    art.rollback();
    throw;
  }
}

void run_locallaw(Config& cfg, const RunOptions& opts) {
  Artifacts art(opts.out, opts.quiet);
  try {
    EnsembleConfig ec;
    ec.n = cfg.get_int("locallaw.n", 300);
    ec.beta = cfg.get_int("locallaw.beta", 2);
    const std::string mu1_spec = cfg.get_string("locallaw.mu1", "semicircle:1");
    const std::string mu2_spec = cfg.get_string("locallaw.mu2", "semicircle:1");
    ec.epsilon_reg = cfg.get_double("locallaw.epsilon_reg", 1e-8);
    const int trials = cfg.get_int("locallaw.trials", 20);
    const double e_min = cfg.get_double("locallaw.e_min", -1.5);
    const double e_max = cfg.get_double("locallaw.e_max", 1.5);
    const int e_points = cfg.get_int("locallaw.e_points", 7);
    const double eta_min = cfg.get_double("locallaw.eta_min", 0.05);
    const double eta_max = cfg.get_double("locallaw.eta_max", 1.0);
    const int eta_points = cfg.get_int("locallaw.eta_points", 5);
    cfg.assert_fully_consumed();

    ResolvedCommon rc;
    put(rc, "n", ec.n);
    put(rc, "beta", ec.beta);
    put(rc, "mu1", mu1_spec);
    put(rc, "mu2", mu2_spec);
    put(rc, "epsilon_reg", ec.epsilon_reg);
    put(rc, "trials", trials);
    put(rc, "e_min", e_min);
    put(rc, "e_max", e_max);
    put(rc, "e_points", e_points);
    put(rc, "eta_min", eta_min);
    put(rc, "eta_max", eta_max);
    put(rc, "eta_points", eta_points);
    finish_manifest(art, "locallaw", rc, opts);

    ec.x = spectrum_of(parse_measure(mu1_spec), ec.n);
    ec.y = spectrum_of(parse_measure(mu2_spec), ec.n);
    ec.validate();
    const Measure m1_emp = Measure::from_spectrum(ec.x);
    const Measure m2_emp = Measure::from_spectrum(ec.y);
    VectorR y(ec.n);
    for (int i = 0; i < ec.n; ++i) y(i) = ec.y[i];

    std::vector<std::pair<double, double>> grid;
    for (double e : linspace(e_min, e_max, e_points))
      for (double eta : log_descending(eta_max, eta_min, eta_points)) grid.emplace_back(e, eta);

    const std::uint64_t tag = tag_from_label("locallaw");
    std::vector<std::vector<LocalLawPoint>> reports(trials);
    parallel_trials(trials, opts.threads, [&](int t) {
      RngStream rng = derive_stream(opts.seed, tag, t);
      const auto h = sample_h(ec, rng);
      reports[t] = local_law_report(h.es, y, m1_emp, m2_emp, grid);
    });

    std::vector<std::vector<double>> rows;
    for (int t = 0; t < trials; ++t)
      for (const auto& p : reports[t])
        rows.push_back({static_cast<double>(t), p.e, p.eta, p.sup_error, p.normalized,
                        p.valid ? 1.0 : 0.0});
    art.csv("locallaw.csv", {"trial", "E", "eta", "sup_error", "normalized", "valid"}, rows);

    double worst_median = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::vector<double> vals;
      for (int t = 0; t < trials; ++t)
        if (reports[t][g].valid) vals.push_back(reports[t][g].normalized);
      if (!vals.empty()) worst_median = std::max(worst_median, median(vals));
    }
    art.note("locallaw: worst grid-point median of sup_i error * sqrt(N eta) = " +
             format_double(worst_median));
  } catch (...) {
    art.rollback();
    throw;
  }
}

void run_stats(Config& cfg, const RunOptions& opts) {
  Artifacts art(opts.out, opts.quiet);
  try {
    EnsembleConfig ec;
    ec.n = cfg.get_int("stats.n", 400);
    ec.beta = cfg.get_int("stats.beta", 2);
    const std::string mu1_spec = cfg.get_string("stats.mu1", "semicircle:1");
    const std::string mu2_spec = cfg.get_string("stats.mu2", "semicircle:1");
    ec.epsilon_reg = cfg.get_double("stats.epsilon_reg", 1e-8);
    ec.a_exp = cfg.get_double("stats.a", 0.2);
    const int trials = cfg.get_int("stats.trials", 50);
    const bool do_gaps = cfg.get_bool("stats.gaps", true);
    const bool do_corr = cfg.get_bool("stats.correlation", true);
    const bool do_rigidity = cfg.get_bool("stats.rigidity", true);
    const bool do_overlaps = cfg.get_bool("stats.overlaps", false);
    const bool do_mingap = cfg.get_bool("stats.min_gap", false);
    const int mingap_n = cfg.get_int("stats.min_gap_n", 10);
    const int mingap_trials = cfg.get_int("stats.min_gap_trials", 20000);
    cfg.assert_fully_consumed();

    ResolvedCommon rc;
    put(rc, "n", ec.n);
    put(rc, "beta", ec.beta);
    put(rc, "mu1", mu1_spec);
    put(rc, "mu2", mu2_spec);
    put(rc, "epsilon_reg", ec.epsilon_reg);
    put(rc, "a", ec.a_exp);
    put(rc, "trials", trials);
    put(rc, "gaps", do_gaps ? "true" : "false");
    put(rc, "correlation", do_corr ? "true" : "false");
    put(rc, "rigidity", do_rigidity ? "true" : "false");
    put(rc, "overlaps", do_overlaps ? "true" : "false");
    put(rc, "min_gap", do_mingap ? "true" : "false");
    put(rc, "min_gap_n", mingap_n);
    put(rc, "min_gap_trials", mingap_trials);
    finish_manifest(art, "stats", rc, opts);

    const Measure m1 = parse_measure(mu1_spec);
    const Measure m2 = parse_measure(mu2_spec);
    ec.x = spectrum_of(m1, ec.n);
    ec.y = spectrum_of(m2, ec.n);
    ec.validate();

    StatisticsReport rep;
    rep.n = ec.n;
    rep.beta = ec.beta;
    rep.trials = trials;

    // the limiting density and classical locations
    const double span = m1.support_bound() + m2.support_bound() + 0.5;
    const auto conv = free_convolution(m1, m2, linspace(-span, span, 1601), 1e-3);
    const double rho0 = conv.density.stieltjes(Cplx(0.0, 1e-3)).imag() / M_PI;
    const auto gamma_locs = classical_locations(conv.density, ec.n);

    const std::uint64_t tag = tag_from_label("stats");
    std::vector<HSample> samples(trials);
    const bool keep_u = do_overlaps;
    parallel_trials(trials, opts.threads, [&](int t) {
      RngStream rng = derive_stream(opts.seed, tag, t);
      samples[t] = sample_h(ec, rng, keep_u);
    });
    for (int t = 0; t < trials; ++t) rep.seeds.push_back(derive_seed(opts.seed, tag, t));

    std::vector<VectorR> eigs;
    for (const auto& s : samples) eigs.push_back(s.es.values);

    if (do_gaps) {
      const int window = std::max(2, static_cast<int>(std::pow(ec.n, 0.3)));
      const auto gaps = unfold_gaps(eigs, rho0, 0.0, window);
      rep.gap_ks = ks_distance(
          gaps, [&](double s) { return reference_spacing_cdf(ec.beta, s); });
      rep.gap_count = static_cast<int>(gaps.size());
      std::vector<std::pair<double, double>> ref;
      for (double s = 0.0; s <= 4.0; s += 0.05)
        ref.emplace_back(s, reference_spacing_pdf(ec.beta, s));
      write_svg_histogram(art.reserve("gaps.svg"), "unfolded gaps vs surmise", gaps, 40, ref);

      std::vector<std::vector<double>> rows;
      for (double g : gaps) rows.push_back({g});
      art.csv("gaps.csv", {"s"}, rows);
    }
    if (do_corr) {
      rep.correlation_bins = correlation_estimate(eigs, rho0, 0.0, 10.0, 0.25, 5.0);
      std::vector<std::vector<double>> rows;
      for (const auto& b : rep.correlation_bins) rows.push_back({b.center, b.value});
      art.csv("correlation.csv", {"center", "value"}, rows);
    }
    if (do_rigidity) {
      std::vector<int> bulk;
      for (int i = ec.n / 5; i < 4 * ec.n / 5; ++i) bulk.push_back(i);
      double worst = 0.0;
      std::vector<std::vector<double>> rows;
      for (int t = 0; t < trials; ++t) {
        const auto r = rigidity_report(eigs[t], gamma_locs, bulk);
        worst = std::max(worst, r.max_abs);
        rows.push_back({static_cast<double>(t), r.max_abs, r.median_abs});
      }
      rep.rigidity_max = worst;
      art.csv("rigidity.csv", {"trial", "max_abs", "median_abs"}, rows);
    }
    if (do_overlaps) {
      double worst = 0.0;
      for (const auto& s : samples) {
        const auto tbl = overlaps(s.u, s.es, ec.a_exp);
        for (int i = ec.n / 5; i < 4 * ec.n / 5; ++i)
          for (int j = ec.n / 5; j < 4 * ec.n / 5; ++j)
            if (i != j) worst = std::max(worst, tbl.gamma(i, j));
      }
      rep.gamma_max_bulk = worst;
    }
    if (do_mingap) {
      std::vector<double> gaps(mingap_trials);
      const std::uint64_t mtag = tag_from_label("stats.min_gap");
      parallel_trials(mingap_trials, opts.threads, [&](int t) {
        RngStream rng = derive_stream(opts.seed, mtag, t);
        const auto es = eigh(sample_gaussian_hermitian(mingap_n, ec.beta, rng));
        double mg = 1e300;
        for (int i = 0; i + 1 < mingap_n; ++i)
          mg = std::min(mg, es.values(i + 1) - es.values(i));
        gaps[t] = mg;
      });
      rep.min_gap_exponent = min_gap_statistics(gaps);
    }

    art.text("report.json", report_to_json(rep));
    art.note("stats: report written");
  } catch (...) {
    art.rollback();
    throw;
  }
}

int run_accept(Config& cfg, const RunOptions& opts) {
  Artifacts art(opts.out, opts.quiet);
  cfg.assert_fully_consumed();
  ResolvedCommon rc;
  finish_manifest(art, "accept", rc, opts);

  std::ostringstream log;
  const auto results = run_acceptance(opts.seed, opts.threads, log);
  if (!opts.quiet) std::printf("%s", log.str().c_str());

  std::ostringstream j;
  j << "{\n  \"criteria\": [\n";
  int failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.pass) ++failed;
    j << "    {\"id\": " << r.id << ", \"name\": \"" << r.name
      << "\", \"pass\": " << (r.pass ? "true" : "false") << ", \"detail\": \"" << r.detail
      << "\", \"seconds\": " << format_double(r.seconds) << "}";
    j << (i + 1 == results.size() ? "\n" : ",\n");
  }
  j << "  ],\n  \"failed\": " << failed << "\n}\n";
  art.text("acceptance.json", j.str());
  return failed;
}

}  // namespace boxplus::cli
