#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "boxplus/measure.hpp"
#include "boxplus/rng.hpp"

namespace boxplus {

using MatrixC = Eigen::MatrixXcd;
using MatrixR = Eigen::MatrixXd;
using VectorR = Eigen::VectorXd;
using VectorC = Eigen::VectorXcd;

// Parameters of the H = V*XV + U*YU ensemble. x and y are the diagonal
// entries (typically quantile spectra of the input measures); T = N^(b-1).
struct EnsembleConfig {
  int n = 100;
  int beta = 2;  // 2 unitary, 1 orthogonal
  std::vector<double> x;
  std::vector<double> y;
  double epsilon_reg = 1e-8;  // scale of the Gaussian regularization of X
  double a_exp = 0.2;         // window exponent (paper's a)
  double b_exp = 0.002;       // time exponent (paper's b), b <= a/100
  std::uint64_t seed = 1;

  double horizon() const;  // T = N^(-1 + b)
  void validate() const;
};

// Haar-distributed unitary (beta = 2) or orthogonal (beta = 1) matrix,
// Ginibre + QR with the R-diagonal phase correction.
MatrixC sample_haar(int n, int beta, RngStream& rng);

// GUE (beta = 2) / GOE (beta = 1) matrix normalized so the spectrum converges
// to semicircle(1): off-diagonal E|q_ij|^2 = 1/n.
MatrixC sample_gaussian_hermitian(int n, int beta, RngStream& rng);

// diag(x) + epsilon * Q with Q GUE/GOE; makes the spectrum almost surely
// simple while moving eigenvalues by at most epsilon * ||Q||.
MatrixC regularize(const std::vector<double>& x, double epsilon, int beta, RngStream& rng);

MatrixC assemble_h(const MatrixC& x, const MatrixC& y, const MatrixC& v, const MatrixC& u);
MatrixC assemble_h(const MatrixC& x, const VectorR& y, const MatrixC& v, const MatrixC& u);
// adds the drift-compensation term (T - t) * diag(haty)
MatrixC assemble_tilde_h(const MatrixC& x, const VectorR& y, const MatrixC& v, const MatrixC& u,
                         double t, double horizon, const VectorR& haty);

// Sorted eigenvalues with orthonormal eigenvectors as columns; each column is
// rotated so its first component of magnitude > 1e-12 has nonnegative real
// part (and zero imaginary part).
struct EigenSystem {
  VectorR values;
  MatrixC vectors;
};

EigenSystem eigh(const MatrixC& h);

// G_ii(z) = sum_k |a_ik|^2 / (lambda_k - z)
VectorC green_diag(const EigenSystem& es, Cplx z);

// full resolvent from the eigensystem (small n diagnostics)
MatrixC resolvent(const EigenSystem& es, Cplx z);

// w_k = U a_k and gamma_ij = sum_{|alpha-beta| < n^a} |w_alpha i|^2 |w_beta j|^2
struct OverlapTable {
  MatrixC w;
  MatrixR gamma;
  double a_exp = 0.0;
  int window = 0;  // ceil boundary: pairs with |alpha - beta| < n^a contribute
};

OverlapTable overlaps(const MatrixC& u, const EigenSystem& es, double a_exp);

// strict window bound floor(N^a - tiny) + ... number of off-diagonals with
// |alpha - beta| < N^a
int short_range_halfwidth(int n, double a_exp);

}  // namespace boxplus
