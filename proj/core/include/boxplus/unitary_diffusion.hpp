#pragma once

#include <Eigen/Dense>
#include <vector>

#include "boxplus/matrix_models.hpp"
#include "boxplus/rng.hpp"

namespace boxplus {

// Weights of the group diffusion: sigma2_{ab} = |y_a - y_b|^{-2} for
// |a - b| >= n^a and 0 inside the window. A and haty are the induced drift
// and compensation diagonals,
//   A_aa   = n^{-1} sum_b sigma2_{ab}
//   haty_a = n^{-1} sum_g sigma2_{ag} (y_g - y_a).
struct WeightTable {
  int n = 0;
  double a_exp = 0.0;
  int window = 0;
  MatrixR sigma2;
  VectorR a_diag;
  VectorR haty;
  int capped_pairs = 0;  // coincident y inside the long range, capped at n^2
};

WeightTable build_weights(const std::vector<double>& y, double a_exp);

enum class Retraction { qr, polar };

struct DiffusionState {
  MatrixC u;
  double t = 0.0;
  int beta = 2;
  double unitarity_defect = 0.0;
};

DiffusionState initial_diffusion_state(int n, int beta);

// One Euler-Maruyama step of dU = i dW U - (1/2) A U dt followed by a
// retraction to the group. The weighted increment dW is Hermitian for
// beta = 2 and real antisymmetric (times i folded away) for beta = 1; its
// entries have variance h sigma2 / n. Optionally emits dW for noise coupling.
void diffusion_step(DiffusionState& state, const WeightTable& w, double h, RngStream& rng,
                    MatrixC* dw_out = nullptr, Retraction retraction = Retraction::qr);

struct TrajectoryPoint {
  double t = 0.0;
  double unitarity_defect = 0.0;
  double norm_u_minus_i = 0.0;
  double norm_m = 0.0;  // martingale part of U
};

struct TrajectoryResult {
  DiffusionState final_state;
  std::vector<TrajectoryPoint> samples;
  double sup_norm_u_minus_i = 0.0;
};

// Integrates on [0, T] with T = n^(b-1), recording diagnostics every
// record_every steps (and at the endpoint).
TrajectoryResult trajectory(const EnsembleConfig& cfg, int steps, RngStream& rng,
                            int record_every = 10, Retraction retraction = Retraction::qr);

// Assembles the full Hermitian Brownian increment dB driving the eigenvalue
// SDE: long-range entries rescale dW through dB_ab = i sqrt(n) (y_a - y_b)
// dW_ab (exactly standard), short-range entries are drawn fresh. Pairs with
// coincident y are drawn fresh as well.
MatrixC hermitian_noise(const MatrixC& dw, const std::vector<double>& y, double a_exp, double h,
                        int beta, RngStream& rng);

// diag(F^* dB F); real for Hermitian dB
VectorR rotated_diagonal(const MatrixC& db, const MatrixC& frame);

// operator norm by 20 power iterations on B^* B
double operator_norm(const MatrixC& b, int iterations = 20);

double unitarity_defect_exact(const MatrixC& u);
double unitarity_defect_estimate(const MatrixC& u);

}  // namespace boxplus
