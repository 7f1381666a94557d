#include "boxplus/dbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "boxplus/measure.hpp"
#include "boxplus/unitary_diffusion.hpp"

namespace boxplus {

MinGapInfo min_gap_monitor(const DbmState& state) {
  MinGapInfo info;
  info.min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i + 1 < state.lambda.size(); ++i) {
    const double g = state.lambda(i + 1) - state.lambda(i);
    if (g < info.min_gap) {
      info.min_gap = g;
      info.index = static_cast<int>(i);
    }
  }
  return info;
}

namespace {

// Shared Euler update. gamma == nullptr means the clean interaction; with an
// all-zero gamma the arithmetic is identical term by term, which the coupling
// replay tests rely on.
VectorR euler_update(const VectorR& lambda, const VectorR& db, const VectorR* dm_short,
                     const MatrixR* gamma, const VectorR* z, double h) {
  const Eigen::Index n = lambda.size();
  const double sqn = std::sqrt(static_cast<double>(n));
  VectorR out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double drift = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double num = gamma ? 1.0 - (*gamma)(i, j) : 1.0;
      drift += num / (lambda(i) - lambda(j));
    }
    drift /= static_cast<double>(n);
    double v = lambda(i) + db(i) / sqn + h * drift;
    if (dm_short) v -= (*dm_short)(i);
    if (z) v += h * (*z)(i);
    out(i) = v;
  }
  std::sort(out.data(), out.data() + n);
  return out;
}

DbmState guarded_step(const DbmState& state, const VectorR& db, const VectorR* dm_short,
                      const MatrixR* gamma, const VectorR* z, double h,
                      const MinGapPolicy& policy, StepStats* stats) {
  const int n = static_cast<int>(state.lambda.size());
  const double guard = policy.guard_for(n);
  if (stats) {
    stats->time_below_guard = 0.0;
    stats->substeps = 0;
  }

  struct Frame {
    VectorR lambda;
    VectorR db;
    VectorR dm;
    double h;
    int level;
  };

  DbmState cur = state;
  std::vector<Frame> stack;
  VectorR dm0 = dm_short ? *dm_short : VectorR();
  stack.push_back({cur.lambda, db, dm0, h, 0});
  VectorR lambda = cur.lambda;

  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    VectorR proposal = euler_update(f.lambda, f.db, dm_short ? &f.dm : nullptr, gamma, z, f.h);
    double mg = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < proposal.size(); ++i)
      mg = std::min(mg, proposal(i + 1) - proposal(i));
    if (mg >= guard || f.level >= policy.max_halvings) {
      if (mg <= 0.0)
        throw std::runtime_error("dbm_step: eigenvalue collision under guard exhaustion");
      if (stats) {
        ++stats->substeps;
        if (mg < guard) stats->time_below_guard += f.h;
      }
      lambda = std::move(proposal);
      // remaining frames continue from the accepted sub-state
      for (auto& fr : stack) fr.lambda = lambda;
      continue;
    }
    // split: two half steps, noise divided evenly (total increment preserved)
    Frame second{f.lambda, 0.5 * f.db, 0.5 * f.dm, 0.5 * f.h, f.level + 1};
    Frame first = second;
    stack.push_back(std::move(second));
    stack.push_back(std::move(first));
  }

  DbmState out;
  out.lambda = std::move(lambda);
  out.t = state.t + h;
  out.beta = state.beta;
  return out;
}

}  // namespace

DbmState dbm_step(const DbmState& state, const VectorR& db, double h, const MinGapPolicy& policy,
                  StepStats* stats) {
  if (!(h > 0.0)) throw std::invalid_argument("dbm_step: need h > 0");
  if (db.size() != state.lambda.size()) throw std::invalid_argument("dbm_step: size mismatch");
  return guarded_step(state, db, nullptr, nullptr, nullptr, h, policy, stats);
}

DbmState perturbed_dbm_step(const DbmState& state, const VectorR& db, const VectorR& dm_short,
                            const MatrixR& gamma, const VectorR& z, double h,
                            const MinGapPolicy& policy, StepStats* stats) {
  if (!(h > 0.0)) throw std::invalid_argument("perturbed_dbm_step: need h > 0");
  const auto n = state.lambda.size();
  if (db.size() != n || dm_short.size() != n || z.size() != n || gamma.rows() != n ||
      gamma.cols() != n)
    throw std::invalid_argument("perturbed_dbm_step: size mismatch");
  return guarded_step(state, db, &dm_short, &gamma, &z, h, policy, stats);
}

namespace {

std::vector<int> middle_indices(int n, double lo_frac, double hi_frac) {
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    const double q = (i + 0.5) / n;
    if (q >= lo_frac && q <= hi_frac) idx.push_back(i);
  }
  return idx;
}

double sup_over(const std::vector<int>& idx, const VectorR& a, const VectorR& b) {
  double s = 0.0;
  for (int i : idx) s = std::max(s, std::abs(a(i) - b(i)));
  return s;
}

}  // namespace

CoupledPaths couple_run_synthetic(const SyntheticCoupleConfig& cfg, RngStream& rng) {
  CoupledPaths out;
  out.seed = rng.initial_seed();
  const int n = cfg.n;
  const double horizon =
      cfg.horizon > 0.0 ? cfg.horizon : std::pow(static_cast<double>(n), -1.0 + cfg.b_exp);
  const double h = horizon / cfg.steps;

  VectorR lam0(n);
  if (cfg.initial.empty()) {
    const auto q = Measure::semicircle(1.0).quantiles(n);
    for (int i = 0; i < n; ++i) lam0(i) = q[i];
  } else {
    for (int i = 0; i < n; ++i) lam0(i) = cfg.initial[i];
  }
  out.bulk_indices = cfg.bulk_indices.empty() ? middle_indices(n, 0.1, 0.9) : cfg.bulk_indices;

  DbmState lam{lam0, 0.0, cfg.beta};
  DbmState mu{lam0, 0.0, cfg.beta};
  const VectorR zeros = VectorR::Zero(n);
  const double diag_var = cfg.beta == 2 ? 1.0 : 2.0;

  out.times.push_back(0.0);
  out.sup_diff.push_back(0.0);
  out.min_gap_lambda.push_back(min_gap_monitor(lam).min_gap);
  out.min_gap_mu.push_back(min_gap_monitor(mu).min_gap);

  VectorR db(n);
  StepStats stats;
  for (int s = 0; s < cfg.steps; ++s) {
    for (int i = 0; i < n; ++i) db(i) = std::sqrt(diag_var * h) * rng.next_gaussian();
    lam = perturbed_dbm_step(lam, db, zeros, cfg.gamma, zeros, h, {}, &stats);
    out.occupation_below_guard += stats.time_below_guard;
    mu = dbm_step(mu, db, h, {}, &stats);
    out.times.push_back(lam.t);
    out.sup_diff.push_back(sup_over(out.bulk_indices, lam.lambda, mu.lambda));
    out.min_gap_lambda.push_back(min_gap_monitor(lam).min_gap);
    out.min_gap_mu.push_back(min_gap_monitor(mu).min_gap);
  }
  out.lambda_final = lam.lambda;
  out.mu_final = mu.lambda;
  return out;
}

namespace {

struct MatrixPipeline {
  // constant through the run
  MatrixC vxv;
  VectorR y;
  VectorR haty;
  WeightTable weights;
  double horizon = 0.0;
  // evolving
  DiffusionState u_state;
  EigenSystem es;
  double t = 0.0;

  MatrixC tilde_h(double at) const {
    MatrixC h = vxv;
    h.noalias() += u_state.u.adjoint() * y.cast<Cplx>().asDiagonal() * u_state.u;
    const double w = horizon - at;
    for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) += w * haty(i);
    return h;
  }
};

MatrixPipeline make_pipeline(const EnsembleConfig& cfg, RngStream& rng) {
  cfg.validate();
  MatrixPipeline p;
  const MatrixC x = regularize(cfg.x, cfg.epsilon_reg, cfg.beta, rng);
  const MatrixC v = sample_haar(cfg.n, cfg.beta, rng);
  p.vxv = v.adjoint() * x * v;
  p.y = Eigen::Map<const VectorR>(cfg.y.data(), cfg.n);
  p.weights = build_weights(cfg.y, cfg.a_exp);
  p.haty = p.weights.haty;
  p.horizon = cfg.horizon();
  p.u_state = initial_diffusion_state(cfg.n, cfg.beta);
  p.es = eigh(p.tilde_h(0.0));
  p.t = 0.0;
  return p;
}

struct PipelineStep {
  VectorR db_diag;    // w-frame diagonal of the Hermitian noise
  VectorR dm_short;   // short-range martingale increment
  VectorR z;          // drift from the Y-hat conjugation error
  MatrixR gamma;      // overlap factors at the step start
  VectorR lambda_before;
  VectorR lambda_after;
};

// advances the pipeline by h and reports the coupling quantities evaluated
// at the step start (Ito convention)
PipelineStep advance(MatrixPipeline& p, const EnsembleConfig& cfg, double h, RngStream& rng,
                     bool want_gamma) {
  PipelineStep rec;
  rec.lambda_before = p.es.values;

  const int n = cfg.n;
  const int window = short_range_halfwidth(n, cfg.a_exp);
  const MatrixC w = p.u_state.u * p.es.vectors;  // w_k = U a_k
  if (want_gamma) rec.gamma = overlaps(p.u_state.u, p.es, cfg.a_exp).gamma;

  MatrixC dw;
  diffusion_step(p.u_state, p.weights, h, rng, &dw);
  const MatrixC db = hermitian_noise(dw, cfg.y, cfg.a_exp, h, cfg.beta, rng);

  rec.db_diag = rotated_diagonal(db, w);

  // dM_i = n^{-1/2} sum_{|a-b| <= window} conj(w_ai) dB_ab w_bi
  const double inv_sqn = 1.0 / std::sqrt(static_cast<double>(n));
  rec.dm_short = VectorR::Zero(n);
  for (int i = 0; i < n; ++i) {
    Cplx acc = 0.0;
    for (int a = 0; a < n; ++a) {
      const int blo = std::max(0, a - window);
      const int bhi = std::min(n - 1, a + window);
      for (int b = blo; b <= bhi; ++b) acc += std::conj(w(a, i)) * db(a, b) * w(b, i);
    }
    rec.dm_short(i) = inv_sqn * acc.real();
  }

  // Z_i = <a_i, (U* Yhat U - Yhat) a_i> = sum_a haty_a (|w_ai|^2 - |a_ai|^2)
  rec.z = VectorR::Zero(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int a = 0; a < n; ++a)
      acc += p.haty(a) * (std::norm(w(a, i)) - std::norm(p.es.vectors(a, i)));
    rec.z(i) = acc;
  }

  p.t += h;
  p.es = eigh(p.tilde_h(p.t));
  rec.lambda_after = p.es.values;
  return rec;
}

}  // namespace

CoupledPaths couple_run_matrix(const MatrixCoupleConfig& cfg, RngStream& rng) {
  CoupledPaths out;
  out.seed = rng.initial_seed();
  try {
    const int n = cfg.ensemble.n;
    MatrixPipeline p = make_pipeline(cfg.ensemble, rng);
    const double h = p.horizon / cfg.steps;

    // G_kappa from the classical locations inside the trimmed bulk interval
    if (static_cast<int>(cfg.classical_locs.size()) == n && cfg.bulk_hi > cfg.bulk_lo) {
      const double len = cfg.bulk_hi - cfg.bulk_lo;
      const double lo = cfg.bulk_lo + cfg.kappa * len;
      const double hi = cfg.bulk_hi - cfg.kappa * len;
      for (int i = 0; i < n; ++i)
        if (cfg.classical_locs[i] >= lo && cfg.classical_locs[i] <= hi)
          out.bulk_indices.push_back(i);
    }
    if (out.bulk_indices.empty()) out.bulk_indices = middle_indices(n, 0.1, 0.9);

    DbmState mu{p.es.values, 0.0, cfg.ensemble.beta};
    out.times.push_back(0.0);
    out.sup_diff.push_back(0.0);
    out.min_gap_lambda.push_back(min_gap_monitor(mu).min_gap);
    out.min_gap_mu.push_back(min_gap_monitor(mu).min_gap);

    StepStats stats;
    for (int s = 0; s < cfg.steps; ++s) {
      PipelineStep rec = advance(p, cfg.ensemble, h, rng, false);
      mu = dbm_step(mu, rec.db_diag, h, cfg.guard, &stats);
      out.occupation_below_guard += stats.time_below_guard;
      out.times.push_back(p.t);
      out.sup_diff.push_back(sup_over(out.bulk_indices, rec.lambda_after, mu.lambda));
      DbmState lam_state{rec.lambda_after, p.t, cfg.ensemble.beta};
      out.min_gap_lambda.push_back(min_gap_monitor(lam_state).min_gap);
      out.min_gap_mu.push_back(min_gap_monitor(mu).min_gap);
    }
    out.lambda_final = p.es.values;
    out.mu_final = mu.lambda;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

double one_step_sde_defect(const EnsembleConfig& cfg, double h, RngStream& rng) {
  MatrixPipeline p = make_pipeline(cfg, rng);
  PipelineStep rec = advance(p, cfg, h, rng, true);
  const int n = cfg.n;
  const double sqn = std::sqrt(static_cast<double>(n));
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double drift = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      drift += (1.0 - rec.gamma(i, j)) / (rec.lambda_before(i) - rec.lambda_before(j));
    }
    drift /= static_cast<double>(n);
    const double predicted =
        rec.lambda_before(i) + rec.db_diag(i) / sqn - rec.dm_short(i) + h * (drift + rec.z(i));
    worst = std::max(worst, std::abs(rec.lambda_after(i) - predicted));
  }
  return worst;
}

}  // namespace boxplus
