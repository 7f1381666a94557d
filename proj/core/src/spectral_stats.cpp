#include "boxplus/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boxplus {

std::vector<double> unfold_gaps(const std::vector<VectorR>& trials, double rho_at_e, double e,
                                int window_k) {
  if (!(rho_at_e > 0.0)) throw std::invalid_argument("unfold_gaps: need rho(E) > 0");
  if (window_k < 2) throw std::invalid_argument("unfold_gaps: need window_k >= 2");
  std::vector<double> samples;
  for (const auto& lam : trials) {
    const int n = static_cast<int>(lam.size());
    if (n < window_k) throw std::invalid_argument("unfold_gaps: window larger than spectrum");
    // index of the eigenvalue nearest E (values ascending)
    int lo = 0;
    double best = std::abs(lam(0) - e);
    for (int i = 1; i < n; ++i) {
      const double d = std::abs(lam(i) - e);
      if (d < best) {
        best = d;
        lo = i;
      }
    }
    int start = std::clamp(lo - window_k / 2, 0, n - window_k);
    for (int i = start; i + 1 < start + window_k; ++i)
      samples.push_back(n * rho_at_e * (lam(i + 1) - lam(i)));
  }
  if (samples.empty()) throw std::invalid_argument("unfold_gaps: empty window");
  return samples;
}

double reference_spacing_pdf(int beta, double s) {
  if (s < 0.0) return 0.0;
  if (beta == 2) return (32.0 / (M_PI * M_PI)) * s * s * std::exp(-4.0 * s * s / M_PI);
  if (beta == 1) return (M_PI / 2.0) * s * std::exp(-M_PI * s * s / 4.0);
  throw std::invalid_argument("reference_spacing_pdf: beta must be 1 or 2");
}

double reference_spacing_cdf(int beta, double s) {
  if (s <= 0.0) return 0.0;
  if (beta == 2)
    return std::erf(2.0 * s / std::sqrt(M_PI)) -
           (4.0 * s / M_PI) * std::exp(-4.0 * s * s / M_PI);
  if (beta == 1) return 1.0 - std::exp(-M_PI * s * s / 4.0);
  throw std::invalid_argument("reference_spacing_cdf: beta must be 1 or 2");
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: need samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance_two_sample: need samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

std::vector<CorrelationBin> correlation_estimate(const std::vector<VectorR>& trials,
                                                 double rho_at_e, double e, double half_width,
                                                 double bin_width, double max_abs) {
  if (!(rho_at_e > 0.0)) throw std::invalid_argument("correlation_estimate: need rho(E) > 0");
  const int n_bins = static_cast<int>(std::round(2.0 * max_abs / bin_width));
  std::vector<double> counts(n_bins, 0.0);
  std::size_t pairs = 0;
  for (const auto& lam : trials) {
    const int n = static_cast<int>(lam.size());
    std::vector<double> alpha;
    for (int i = 0; i < n; ++i) {
      const double a = n * rho_at_e * (lam(i) - e);
      if (std::abs(a) <= half_width) alpha.push_back(a);
    }
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (i == j) continue;
        const double d = alpha[i] - alpha[j];
        if (std::abs(d) >= max_abs) continue;
        const int b = static_cast<int>((d + max_abs) / bin_width);
        if (b >= 0 && b < n_bins) {
          counts[b] += 1.0;
          ++pairs;
        }
      }
  }
  if (pairs == 0) throw std::runtime_error("correlation_estimate: insufficient pairs");
  // Poisson normalization: a unit-intensity process in a window of length
  // 2 half_width has (L - |d|) dd expected ordered pairs at separation d
  std::vector<CorrelationBin> out(n_bins);
  const double window_len = 2.0 * half_width;
  const double n_trials = static_cast<double>(trials.size());
  for (int b = 0; b < n_bins; ++b) {
    const double center = -max_abs + (b + 0.5) * bin_width;
    const double expected = std::max(window_len - std::abs(center), 1e-12) * bin_width;
    out[b].center = center;
    out[b].value = counts[b] / (n_trials * expected);
  }
  return out;
}

std::vector<LocalLawPoint> local_law_report(const EigenSystem& es, const VectorR& ybar,
                                            const Measure& m1_emp, const Measure& m2_emp,
                                            const std::vector<std::pair<double, double>>& grid,
                                            const SolverConfig& cfg) {
  const int n = static_cast<int>(es.values.size());
  std::vector<LocalLawPoint> out;
  out.reserve(grid.size());
  for (const auto& [e, eta] : grid) {
    LocalLawPoint p;
    p.e = e;
    p.eta = eta;
    const Cplx z(e, eta);
    const auto sol = solve_pointwise(m1_emp, m2_emp, z, cfg);
    p.valid = sol.converged;
    if (sol.converged) {
      const VectorC g = green_diag(es, z);
      double sup = 0.0;
      for (int i = 0; i < n; ++i) {
        const Cplx ref = 1.0 / (-z + ybar(i) + sol.w1);
        sup = std::max(sup, std::abs(g(i) - ref));
      }
      p.sup_error = sup;
      p.normalized = sup * std::sqrt(n * eta);
    }
    out.push_back(p);
  }
  return out;
}

RigidityReport rigidity_report(const VectorR& eigs, const std::vector<double>& gamma,
                               const std::vector<int>& indices) {
  if (eigs.size() != static_cast<Eigen::Index>(gamma.size()))
    throw std::invalid_argument("rigidity_report: size mismatch");
  RigidityReport rep;
  for (int i : indices) {
    const double d = std::abs(eigs(i) - gamma[static_cast<std::size_t>(i)]);
    rep.profile.push_back(d);
    rep.max_abs = std::max(rep.max_abs, d);
  }
  if (!rep.profile.empty()) {
    std::vector<double> sorted = rep.profile;
    std::sort(sorted.begin(), sorted.end());
    rep.median_abs = sorted[sorted.size() / 2];
  }
  return rep;
}

ExponentFit min_gap_statistics(const std::vector<double>& min_gaps,
                               const std::vector<double>& delta_grid) {
  if (min_gaps.size() < 100)
    throw std::invalid_argument("min_gap_statistics: need at least 100 trials");
  std::vector<double> sorted = min_gaps;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  std::vector<double> deltas = delta_grid;
  if (deltas.empty()) {
    const double lo = sorted[static_cast<std::size_t>(0.005 * n)];
    const double hi = sorted[static_cast<std::size_t>(0.25 * n)];
    if (!(hi > lo && lo > 0.0))
      throw std::runtime_error("min_gap_statistics: degenerate sample range");
    const int k = 12;
    for (int i = 0; i < k; ++i)
      deltas.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (k - 1)));
  }

  std::vector<double> xs, ys;
  for (double d : deltas) {
    const auto cnt = std::upper_bound(sorted.begin(), sorted.end(), d) - sorted.begin();
    if (cnt == 0) continue;  // empty tail bin
    xs.push_back(std::log(d));
    ys.push_back(std::log(static_cast<double>(cnt) / n));
  }
  if (xs.size() < 3) throw std::runtime_error("min_gap_statistics: too few resolvable bins");

  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  ExponentFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / m;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.stderr_slope = std::sqrt(ss_res / std::max(1.0, m - 2.0) / (sxx - sx * sx / m));
  fit.points = static_cast<int>(xs.size());
  return fit;
}

}  // namespace boxplus
