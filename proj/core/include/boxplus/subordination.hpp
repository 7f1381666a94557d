#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "boxplus/measure.hpp"

namespace boxplus {

struct SolverConfig {
  double tol = 1e-11;
  int max_iter = 50000;
  double damping = 0.5;
  double eta_start = 2.0;  // continuation starts here when Im z is smaller
  double eta_min = 1e-8;   // evaluation is never attempted closer to the axis
};

// Solution of the coupled subordination system at one spectral point:
//   m = m2(z - w1),  m = m1(z - w2),  1/m = w1 + w2 - z
// with (w1, w2, m) in C- x C- x C+. The residual is measured on these three
// equations, not on the rewritten fixed-point form.
struct SubordinationSolution {
  Cplx z;
  Cplx m;
  Cplx w1;
  Cplx w2;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

SubordinationSolution solve_pointwise(const Measure& m1, const Measure& m2, Cplx z,
                                      const SolverConfig& cfg = {});

// Continuation in eta: for each E the solver walks eta_path (must start >= 1,
// strictly decreasing, positive) and reports the solution at the final eta.
std::vector<SubordinationSolution> solve_curve(const Measure& m1, const Measure& m2,
                                               const std::vector<double>& e_grid,
                                               const std::vector<double>& eta_path,
                                               const SolverConfig& cfg = {});

struct FreeConvolutionResult {
  Measure density;
  double renormalization = 1.0;
  bool flagged = false;
  int non_converged = 0;
};

// mu1 [+] mu2 as a grid density, recovered from Im m / pi at eta0.
FreeConvolutionResult free_convolution(const Measure& m1, const Measure& m2,
                                       const std::vector<double>& grid, double eta0 = 1e-3,
                                       const SolverConfig& cfg = {});

struct FlowResult {
  Cplx m;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Free convolution with the semicircle law at time t:
//   m_t(z) = m_0(z + t m_t(z)), the branch with Im m_t > 0 vanishing at
// infinity. Newton iteration with eta continuation; the derivative of m_0 is
// taken by centered differencing, which is exact in direction for holomorphic
// transforms.
FlowResult semicircle_flow(const std::function<Cplx(Cplx)>& m0, double t, Cplx z,
                           const SolverConfig& cfg = {});
FlowResult semicircle_flow(const Measure& m0, double t, Cplx z, const SolverConfig& cfg = {});

// gamma_i = i-th n-quantile of the density
std::vector<double> classical_locations(const Measure& density, int n);

// Time-evolved classical locations: explicit Euler on
//   d/dt gamma_i(t) = -Re[m_t(gamma_i(t))]
// started from the quantiles of m0's measure.
std::vector<double> classical_locations_flowed(const Measure& m0, double t, int n, int n_steps,
                                               const SolverConfig& cfg = {});

struct StabilityDiagnostics {
  Cplx a;
  Cplx b;
  double one_minus_ab = 0.0;  // |1 - a b|
  Cplx r1;
  Cplx r2;
};

// Single-solution variant: both factors of each coefficient integral are
// evaluated at the same subordination point, a = hat-m2'(z - w1) and
// b = hat-m1'(z - w2); r1 = r2 = 0.
StabilityDiagnostics stability_diagnostics(const SubordinationSolution& sol, const Measure& m1,
                                           const Measure& m2);

// Finite-N vs limit variant: a and b couple the two solutions through the
// hat-measure pair integrals, and r1, r2 are the inhomogeneities
//   r1 = 1/m2(z - w1_N) - 1/m2_N(z - w1_N),  r2 analogously with m1.
StabilityDiagnostics stability_diagnostics(const SubordinationSolution& sol_finite,
                                           const SubordinationSolution& sol_limit,
                                           const Measure& m1_finite, const Measure& m2_finite,
                                           const Measure& m1_limit, const Measure& m2_limit);

}  // namespace boxplus
