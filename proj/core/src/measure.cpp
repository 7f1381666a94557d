#include "boxplus/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace boxplus {

namespace {
constexpr double kAtomMassTol = 1e-12;
constexpr double kGridMassTol = 1e-9;
}  // namespace

Measure Measure::from_atoms(std::vector<double> locations, std::vector<double> weights) {
  if (locations.size() != weights.size() || locations.empty())
    throw std::invalid_argument("Measure: atom locations/weights size mismatch");
  Measure m;
  m.kind_ = MeasureKind::atoms;
  m.xs_.clear();
  m.ws_.clear();
  std::vector<std::size_t> order(locations.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return locations[a] < locations[b]; });
  m.xs_.reserve(order.size());
  m.ws_.reserve(order.size());
  for (auto i : order) {
    if (weights[i] < 0.0) throw std::invalid_argument("Measure: negative atom weight");
    m.xs_.push_back(locations[i]);
    m.ws_.push_back(weights[i]);
  }
  m.finalize_atoms();
  return m;
}

Measure Measure::from_grid(std::vector<double> points, std::vector<double> density) {
  if (points.size() != density.size() || points.size() < 2)
    throw std::invalid_argument("Measure: grid needs >= 2 points");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1]))
      throw std::invalid_argument("Measure: grid points must be strictly ascending");
  for (double d : density)
    if (d < 0.0 || !std::isfinite(d))
      throw std::invalid_argument("Measure: density must be finite and >= 0");
  Measure m;
  m.kind_ = MeasureKind::grid;
  m.xs_ = std::move(points);
  m.ws_ = std::move(density);
  m.finalize_grid();
  return m;
}

void Measure::finalize_atoms() {
  cdf_.resize(xs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    acc += ws_[i];
    cdf_[i] = acc;
  }
  if (std::abs(acc - 1.0) > kAtomMassTol)
    throw std::invalid_argument("Measure: atom weights must sum to 1");
  support_bound_ = std::max(std::abs(xs_.front()), std::abs(xs_.back()));
}

void Measure::finalize_grid() {
  cdf_.resize(xs_.size());
  cdf_[0] = 0.0;
  for (std::size_t i = 1; i < xs_.size(); ++i)
    cdf_[i] = cdf_[i - 1] + 0.5 * (ws_[i] + ws_[i - 1]) * (xs_[i] - xs_[i - 1]);
  const double mass = cdf_.back();
  if (std::abs(mass - 1.0) > kGridMassTol)
    throw std::invalid_argument("Measure: grid density must integrate to 1");
  support_bound_ = std::max(std::abs(xs_.front()), std::abs(xs_.back()));
}

void Measure::set_support_bound(double k) {
  if (k < support_bound_)
    throw std::invalid_argument("Measure: support bound may only be enlarged");
  support_bound_ = k;
}

Measure Measure::dirac(double a) { return from_atoms({a}, {1.0}); }

Measure Measure::two_point(double a) { return from_atoms({-a, a}, {0.5, 0.5}); }

Measure Measure::from_spectrum(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("Measure: empty spectrum");
  const double w = 1.0 / static_cast<double>(values.size());
  return from_atoms(values, std::vector<double>(values.size(), w));
}

Measure Measure::semicircle(double variance, int n_points) {
  if (variance <= 0.0) throw std::invalid_argument("semicircle: variance must be > 0");
  const double r = 2.0 * std::sqrt(variance);
  std::vector<double> xs(n_points), dens(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double x = -r + 2.0 * r * i / (n_points - 1);
    xs[i] = x;
    const double disc = std::max(0.0, 4.0 * variance - x * x);
    dens[i] = std::sqrt(disc) / (2.0 * M_PI * variance);
  }
  // trapezoid mass of the sampled density is slightly below 1; rescale
  double mass = 0.0;
  for (int i = 1; i < n_points; ++i) mass += 0.5 * (dens[i] + dens[i - 1]) * (xs[i] - xs[i - 1]);
  for (auto& d : dens) d /= mass;
  return from_grid(std::move(xs), std::move(dens));
}

Measure Measure::uniform(double a, double b, int n_points) {
  if (!(b > a)) throw std::invalid_argument("uniform: need b > a");
  std::vector<double> xs(n_points), dens(n_points, 1.0 / (b - a));
  for (int i = 0; i < n_points; ++i) xs[i] = a + (b - a) * i / (n_points - 1);
  return from_grid(std::move(xs), std::move(dens));
}

Measure Measure::arcsine(double a, int n_points) {
  if (a <= 0.0) throw std::invalid_argument("arcsine: need a > 0");
  std::vector<double> xs(n_points), dens(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double x = -a + 2.0 * a * i / (n_points - 1);
    xs[i] = x;
    const double disc = a * a - x * x;
    dens[i] = disc > 0.0 ? 1.0 / (M_PI * std::sqrt(disc)) : 0.0;
  }
  // the inverse-sqrt edges are not integrable on the open cells; cap then rescale
  const double cap = dens[n_points / 2] * 400.0;
  for (auto& d : dens) d = std::min(d, cap);
  double mass = 0.0;
  for (int i = 1; i < n_points; ++i) mass += 0.5 * (dens[i] + dens[i - 1]) * (xs[i] - xs[i - 1]);
  for (auto& d : dens) d /= mass;
  return from_grid(std::move(xs), std::move(dens));
}

double Measure::total_mass() const { return cdf_.back(); }

double Measure::mean() const {
  if (kind_ == MeasureKind::atoms) {
    double s = 0.0;
    for (std::size_t i = 0; i < xs_.size(); ++i) s += xs_[i] * ws_[i];
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < xs_.size(); ++i)
    s += 0.5 * (xs_[i] * ws_[i] + xs_[i - 1] * ws_[i - 1]) * (xs_[i] - xs_[i - 1]);
  return s;
}

double Measure::second_moment() const {
  if (kind_ == MeasureKind::atoms) {
    double s = 0.0;
    for (std::size_t i = 0; i < xs_.size(); ++i) s += xs_[i] * xs_[i] * ws_[i];
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < xs_.size(); ++i)
    s += 0.5 * (xs_[i] * xs_[i] * ws_[i] + xs_[i - 1] * xs_[i - 1] * ws_[i - 1]) *
         (xs_[i] - xs_[i - 1]);
  return s;
}

double Measure::max_density() const {
  if (kind_ != MeasureKind::grid)
    throw std::logic_error("Measure: max_density needs a grid measure");
  return *std::max_element(ws_.begin(), ws_.end());
}

std::complex<double> Measure::stieltjes(std::complex<double> z) const {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("stieltjes: need Im z > 0");
  std::complex<double> acc = 0.0;
  if (kind_ == MeasureKind::atoms) {
    for (std::size_t i = 0; i < xs_.size(); ++i) acc += ws_[i] / (xs_[i] - z);
    return acc;
  }
  std::complex<double> prev = ws_[0] / (xs_[0] - z);
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    const std::complex<double> cur = ws_[i] / (xs_[i] - z);
    acc += 0.5 * (cur + prev) * (xs_[i] - xs_[i - 1]);
    prev = cur;
  }
  return acc;
}

std::complex<double> Measure::stieltjes_derivative(std::complex<double> z) const {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("stieltjes_derivative: need Im z > 0");
  std::complex<double> acc = 0.0;
  if (kind_ == MeasureKind::atoms) {
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      const std::complex<double> d = xs_[i] - z;
      acc += ws_[i] / (d * d);
    }
    return acc;
  }
  auto term = [&](std::size_t i) {
    const std::complex<double> d = xs_[i] - z;
    return ws_[i] / (d * d);
  };
  std::complex<double> prev = term(0);
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    const std::complex<double> cur = term(i);
    acc += 0.5 * (cur + prev) * (xs_[i] - xs_[i - 1]);
    prev = cur;
  }
  return acc;
}

double Measure::cdf(double s) const {
  if (s < xs_.front()) return 0.0;
  if (kind_ == MeasureKind::atoms) {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
    if (it == xs_.begin()) return 0.0;
    return cdf_[static_cast<std::size_t>(it - xs_.begin()) - 1];
  }
  if (s >= xs_.back()) return cdf_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  const double x0 = xs_[i - 1], x1 = xs_[i];
  const double t = (s - x0) / (x1 - x0);
  // exact trapezoid CDF inside the cell (quadratic in t)
  const double d0 = ws_[i - 1], d1 = ws_[i];
  const double partial = (x1 - x0) * (d0 * t + 0.5 * (d1 - d0) * t * t);
  return cdf_[i - 1] + partial;
}

double Measure::mass_in(double lo, double hi) const {
  if (hi < lo) return 0.0;
  if (kind_ == MeasureKind::atoms) {
    double s = 0.0;
    for (std::size_t i = 0; i < xs_.size(); ++i)
      if (xs_[i] >= lo && xs_[i] <= hi) s += ws_[i];
    return s;
  }
  return cdf(hi) - cdf(lo);
}

std::vector<double> Measure::quantiles(int n) const {
  if (n < 1) throw std::invalid_argument("quantiles: need n >= 1");
  std::vector<double> out(n);
  const double eps = 1e-12;
  if (kind_ == MeasureKind::atoms) {
    std::size_t j = 0;
    for (int k = 1; k <= n; ++k) {
      const double target = static_cast<double>(k) / n - eps;
      while (j + 1 < xs_.size() && cdf_[j] < target) ++j;
      out[k - 1] = xs_[j];
    }
    return out;
  }
  std::size_t j = 1;
  for (int k = 1; k <= n; ++k) {
    const double target = static_cast<double>(k) / n;
    while (j + 1 < xs_.size() && cdf_[j] < target - eps) ++j;
    const double c0 = cdf_[j - 1], c1 = cdf_[j];
    if (c1 <= c0) {
      out[k - 1] = xs_[j];
      continue;
    }
    const double t = std::clamp((target - c0) / (c1 - c0), 0.0, 1.0);
    out[k - 1] = xs_[j - 1] + t * (xs_[j] - xs_[j - 1]);
  }
  return out;
}

Measure Measure::shifted(double a) const {
  Measure m = *this;
  for (auto& x : m.xs_) x += a;
  m.support_bound_ = std::max(std::abs(m.xs_.front()), std::abs(m.xs_.back()));
  return m;
}

namespace {

// sup |m(E + i eta)| over support-spanning E values; used to decide whether a
// Stieltjes transform is numerically bounded near the axis
double stieltjes_sup(const Measure& m, double eta) {
  const double k = m.support_bound();
  double sup = 0.0;
  const int n = 201;
  for (int i = 0; i < n; ++i) {
    const double e = -1.5 * k - 0.5 + (3.0 * k + 1.0) * i / (n - 1);
    sup = std::max(sup, std::abs(m.stieltjes({e, eta})));
  }
  return sup;
}

}  // namespace

AssumptionReport check_assumptions(const Measure& m1, const Measure& m2) {
  AssumptionReport rep;
  std::ostringstream notes;

  const double bound_threshold = 20.0;
  const double sup1 = stieltjes_sup(m1, 1e-3);
  const double sup2 = stieltjes_sup(m2, 1e-3);
  rep.bounded_stieltjes = std::min(sup1, sup2) <= bound_threshold;
  notes << "sup|m1|=" << sup1 << " sup|m2|=" << sup2 << " (threshold " << bound_threshold
        << ", eta=1e-3); ";

  if (m2.kind() != MeasureKind::grid) {
    notes << "mu2 has no density (atom measure): edge condition fails; ";
  } else {
    // sample xi on the quantile grid, h log-spaced; certify the best
    // exponent c with mu2([xi-h, xi+h]) >= h^(2-c) for all samples h <= d0
    const auto xi = m2.quantiles(1000);
    const double half_width = 0.5 * (m2.grid_points().back() - m2.grid_points().front());
    const double h_max = std::min(0.5, half_width);
    // windows thinner than the quadrature cells would certify discretization
    // artifacts, not the measure
    double max_cell = 0.0;
    for (std::size_t i = 1; i < m2.grid_points().size(); ++i)
      max_cell = std::max(max_cell, m2.grid_points()[i] - m2.grid_points()[i - 1]);
    const double h_min = std::min(std::max(1e-4, 2.0 * max_cell), h_max / 100.0);
    const int n_h = 20;
    std::vector<double> hs(n_h), c_at_h(n_h);
    bool any_zero = false;
    for (int i = 0; i < n_h; ++i) {
      hs[i] = h_min * std::pow(h_max / h_min, static_cast<double>(i) / (n_h - 1));
      double worst = 2.0;
      for (double x : xi) {
        const double mass = m2.mass_in(x - hs[i], x + hs[i]);
        if (mass <= 0.0) {
          any_zero = true;
          break;
        }
        worst = std::min(worst, 2.0 - std::log(mass) / std::log(hs[i]));
      }
      c_at_h[i] = any_zero ? -1.0 : worst;
      if (any_zero) break;
    }
    if (!any_zero) {
      // Certificate for delta0 = hs[j] is min over sampled h <= delta0. The
      // running min is non-increasing in j, so the maximal certifiable
      // exponent sits at the smallest delta0; report it with the largest
      // delta0 that still attains it.
      double best_c = c_at_h[0];
      double best_d0 = hs[0];
      double running = c_at_h[0];
      for (int j = 1; j < n_h; ++j) {
        running = std::min(running, c_at_h[j]);
        if (running >= best_c - 1e-9) best_d0 = hs[j];
      }
      if (best_c > 0.01) {
        rep.edge_constant_c = best_c;
        rep.edge_delta0 = best_d0;
        notes << "edge certified c=" << best_c << " delta0=" << best_d0 << "; ";
      } else {
        notes << "edge condition not certifiable on samples (best c=" << best_c << "); ";
      }
    } else {
      notes << "edge condition fails: zero mass window on supp mu2; ";
    }

    // quantile spacing |y*_k - y*_l| >= |k-l| / (||rho2||_inf N); adjacent
    // gaps imply all pairs
    const int nq = 1000;
    const auto q = m2.quantiles(nq);
    const double rho_inf = m2.max_density();
    const double lower = 1.0 / (rho_inf * nq);
    bool ok = true;
    for (int k = 1; k < nq; ++k)
      if (q[k] - q[k - 1] < lower * (1.0 - 1e-6)) {
        ok = false;
        break;
      }
    rep.quantile_gap_ok = ok;
    notes << "quantile spacing " << (ok ? "ok" : "violated") << " (||rho||=" << rho_inf << "); ";
  }

  rep.notes = notes.str();
  return rep;
}

InversionResult density_from_stieltjes(
    const std::function<std::complex<double>(std::complex<double>)>& eval,
    const std::vector<double>& grid, double eta0) {
  if (eta0 <= 0.0) throw std::invalid_argument("density_from_stieltjes: need eta0 > 0");
  std::vector<double> dens(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    dens[i] = std::max(0.0, eval({grid[i], eta0}).imag() / M_PI);
  double mass = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    mass += 0.5 * (dens[i] + dens[i - 1]) * (grid[i] - grid[i - 1]);
  if (mass <= 0.0) throw std::runtime_error("density_from_stieltjes: zero mass on grid");
  InversionResult res;
  res.renormalization = mass;
  res.flagged = std::abs(mass - 1.0) > 0.05;
  for (auto& d : dens) d /= mass;
  res.density = Measure::from_grid(std::vector<double>(grid), std::move(dens));
  return res;
}

}  // namespace boxplus
