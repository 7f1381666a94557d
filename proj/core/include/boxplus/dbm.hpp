#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boxplus/matrix_models.hpp"
#include "boxplus/rng.hpp"

namespace boxplus {

struct DbmState {
  VectorR lambda;  // ascending
  double t = 0.0;
  int beta = 2;
};

struct MinGapPolicy {
  double delta_guard = 0.0;  // 0 means 1e-3 / n
  int max_halvings = 10;

  double guard_for(int n) const {
    return delta_guard > 0.0 ? delta_guard : 1e-3 / static_cast<double>(n);
  }
};

struct MinGapInfo {
  double min_gap = 0.0;
  int index = 0;  // gap between index and index+1
};

MinGapInfo min_gap_monitor(const DbmState& state);

struct StepStats {
  double time_below_guard = 0.0;  // occupation time below delta_guard
  int substeps = 1;
};

// Clean DBM Euler step
//   d lambda_i = dB_i / sqrt(n) + (1/n) sum_{j != i} dt / (lambda_i - lambda_j).
// dB carries the physical variance (h for beta = 2, 2h on the diagonal
// Hermitian-BM convention for beta = 1); the interaction coefficient is 1/n
// for both symmetry classes. When the minimum gap falls below the guard the
// step is retried in halved substeps (noise split evenly) up to
// max_halvings levels; exhaustion throws.
DbmState dbm_step(const DbmState& state, const VectorR& db, double h,
                  const MinGapPolicy& policy = {}, StepStats* stats = nullptr);

// Perturbed step per the eigenvalue SDE of the coupled model:
//   d lambda_i = dB_i/sqrt(n) - dM_i + [ (1/n) sum_j (1-gamma_ij)/(lambda_i-lambda_j) + Z_i ] dt
DbmState perturbed_dbm_step(const DbmState& state, const VectorR& db, const VectorR& dm_short,
                            const MatrixR& gamma, const VectorR& z, double h,
                            const MinGapPolicy& policy = {}, StepStats* stats = nullptr);

struct CoupledPaths {
  std::vector<double> times;
  std::vector<double> sup_diff;       // sup over bulk of |lambda_i - mu_i|
  std::vector<double> min_gap_lambda;
  std::vector<double> min_gap_mu;
  std::vector<int> bulk_indices;      // the index set G_kappa
  VectorR lambda_final;
  VectorR mu_final;
  double occupation_below_guard = 0.0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
};

struct SyntheticCoupleConfig {
  int n = 100;
  int beta = 2;
  int steps = 200;
  double horizon = 0.0;           // 0 -> n^(b_exp - 1)
  double b_exp = 0.002;
  std::vector<double> initial;    // ascending spectrum; empty -> semicircle(1) quantiles
  MatrixR gamma;                  // n x n, entries in [0, 1]
  std::vector<int> bulk_indices;  // empty -> middle 80%
};

CoupledPaths couple_run_synthetic(const SyntheticCoupleConfig& cfg, RngStream& rng);

struct MatrixCoupleConfig {
  EnsembleConfig ensemble;
  int steps = 200;
  double kappa = 0.1;                    // trim fraction of the bulk interval
  std::vector<double> classical_locs;    // gamma_i of mu1 [+] mu2
  double bulk_lo = 0.0, bulk_hi = 0.0;   // interval I where the density is positive
  MinGapPolicy guard;
};

// Drives lambda from the full matrix pipeline (diagonalization of
// H-tilde(t)), mu from clean DBM, with the eigenframe diagonal of the
// Hermitian noise shared between the two.
CoupledPaths couple_run_matrix(const MatrixCoupleConfig& cfg, RngStream& rng);

// One-step consistency of the re-diagonalized eigenvalues against the SDE
// prediction: returns max_i |lambda_i(t+h) - lambda_i(t) - sde_increment_i|
// for a single step of size h from stationarity at t = 0.
double one_step_sde_defect(const EnsembleConfig& cfg, double h, RngStream& rng);

}  // namespace boxplus
