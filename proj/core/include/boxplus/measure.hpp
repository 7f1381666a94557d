#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace boxplus {

using Cplx = std::complex<double>;

enum class MeasureKind { atoms, grid };

// Probability measure on the real line, either a finite list of weighted
// atoms or a density sampled on an ascending grid (trapezoid quadrature).
// Immutable after construction; safe to share across threads.
class Measure {
 public:
  Measure() : xs_{0.0}, ws_{1.0}, cdf_{1.0} {}  // default-constructs delta_0

  static Measure from_atoms(std::vector<double> locations, std::vector<double> weights);
  static Measure from_grid(std::vector<double> points, std::vector<double> density);

  static Measure dirac(double a);
  // symmetric two-point law (delta_{-a} + delta_{a}) / 2
  static Measure two_point(double a);
  static Measure from_spectrum(const std::vector<double>& values);
  // semicircle with variance t, support [-2 sqrt(t), 2 sqrt(t)]
  static Measure semicircle(double variance, int n_points = 2001);
  static Measure uniform(double a, double b, int n_points = 2001);
  // arcsine law on [-a, a]; density is clipped at the edge cells
  static Measure arcsine(double a, int n_points = 4001);

  MeasureKind kind() const { return kind_; }
  double support_bound() const { return support_bound_; }
  // K may only be enlarged
  void set_support_bound(double k);

  const std::vector<double>& locations() const { return xs_; }
  const std::vector<double>& weights() const { return ws_; }
  const std::vector<double>& grid_points() const { return xs_; }
  const std::vector<double>& grid_density() const { return ws_; }

  double total_mass() const;
  double mean() const;
  double second_moment() const;
  double max_density() const;  // grid only

  // m(z) = \int d\mu(x) / (x - z), Im z > 0
  std::complex<double> stieltjes(std::complex<double> z) const;
  // m'(z) = \int d\mu(x) / (x - z)^2
  std::complex<double> stieltjes_derivative(std::complex<double> z) const;

  // right-continuous CDF
  double cdf(double s) const;
  double mass_in(double lo, double hi) const;

  // k-th entry is inf{ s : mu((-inf, s]) >= k/n }, k = 1..n
  std::vector<double> quantiles(int n) const;

  Measure shifted(double a) const;

 private:
  void finalize_atoms();
  void finalize_grid();

  MeasureKind kind_ = MeasureKind::atoms;
  std::vector<double> xs_;  // atom locations or grid points
  std::vector<double> ws_;  // atom weights or density values
  std::vector<double> cdf_;  // cumulative mass at xs_
  double support_bound_ = 0.0;
};

struct AssumptionReport {
  bool bounded_stieltjes = false;
  std::optional<double> edge_constant_c;  // certified exponent in mu([xi-h, xi+h]) >= h^(2-c)
  std::optional<double> edge_delta0;
  bool quantile_gap_ok = false;
  std::string notes;
};

// Certifies the standing assumptions on (mu1, mu2) over a sampled family of
// window centers and radii. A certificate over samples, not a proof.
AssumptionReport check_assumptions(const Measure& m1, const Measure& m2);

struct InversionResult {
  Measure density;
  double renormalization = 1.0;  // mass before renormalizing to 1
  bool flagged = false;          // |renormalization - 1| > 5%
};

// Stieltjes inversion: density(E) = Im eval(E + i eta0) / pi, clipped at 0,
// renormalized to unit mass.
InversionResult density_from_stieltjes(
    const std::function<std::complex<double>(std::complex<double>)>& eval,
    const std::vector<double>& grid, double eta0);

}  // namespace boxplus
