#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "boxplus/matrix_models.hpp"
#include "boxplus/measure.hpp"
#include "boxplus/subordination.hpp"

namespace boxplus {

// Pooled normalized gap samples s = n rho(E) (lambda_{i+1} - lambda_i) from
// the window_k eigenvalues nearest E in each trial.
std::vector<double> unfold_gaps(const std::vector<VectorR>& trials, double rho_at_e, double e,
                                int window_k);

// Wigner surmise CDF (beta = 1 or 2)
double reference_spacing_cdf(int beta, double s);
double reference_spacing_pdf(int beta, double s);

// sup_x |F_n(x) - F(x)| against a reference CDF
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);
// two-sample sup distance between empirical CDFs
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

struct CorrelationBin {
  double center = 0.0;
  double value = 0.0;
};

// Binned two-point function of the unfolded points alpha = n rho(E) (lambda - E)
// restricted to |alpha| <= half_width; normalized so a unit-intensity Poisson
// process gives value 1 in every bin.
std::vector<CorrelationBin> correlation_estimate(const std::vector<VectorR>& trials,
                                                 double rho_at_e, double e, double half_width,
                                                 double bin_width = 0.25,
                                                 double max_abs = 5.0);

struct LocalLawPoint {
  double e = 0.0;
  double eta = 0.0;
  double sup_error = 0.0;   // sup_i |G_ii - (-z + ybar_i + w1)^{-1}|
  double normalized = 0.0;  // sup_error * sqrt(n eta)
  bool valid = false;       // solver converged at this grid point
};

// Deterministic local-law reference: w1 solves the finite-n subordination
// system for the empirical measures of x and ybar = y + (T - t) haty.
std::vector<LocalLawPoint> local_law_report(const EigenSystem& es, const VectorR& ybar,
                                            const Measure& m1_emp, const Measure& m2_emp,
                                            const std::vector<std::pair<double, double>>& grid,
                                            const SolverConfig& cfg = {});

struct RigidityReport {
  double max_abs = 0.0;
  double median_abs = 0.0;
  std::vector<double> profile;  // |lambda_i - gamma_i| over the index set
};

RigidityReport rigidity_report(const VectorR& eigs, const std::vector<double>& gamma,
                               const std::vector<int>& indices);

struct ExponentFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

// Least-squares slope of log P[min gap <= delta] against log delta over a
// delta range resolved by the sample (between the 0.5% and 25% quantiles
// unless an explicit grid is given).
ExponentFit min_gap_statistics(const std::vector<double>& min_gaps,
                               const std::vector<double>& delta_grid = {});

struct StatisticsReport {
  std::optional<double> gap_ks;
  int gap_count = 0;
  std::vector<CorrelationBin> correlation_bins;
  std::vector<LocalLawPoint> local_law;
  std::optional<double> rigidity_max;
  std::optional<double> gamma_max_bulk;
  std::optional<ExponentFit> min_gap_exponent;
  // metadata
  int n = 0;
  int beta = 2;
  int trials = 0;
  std::vector<std::uint64_t> seeds;
};

}  // namespace boxplus
