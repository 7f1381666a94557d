#include "boxplus/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boxplus {

namespace {

// hat-m(zeta) = -zeta - 1/m(zeta); Stieltjes-like transform of the
// hat-measure (plus a real constant), maps C+ to closure(C+).
Cplx hat_transform(const Measure& m, Cplx zeta) { return -zeta - 1.0 / m.stieltjes(zeta); }

Cplx hat_derivative(const Measure& m, Cplx zeta) {
  const Cplx v = m.stieltjes(zeta);
  return -1.0 + m.stieltjes_derivative(zeta) / (v * v);
}

// \int dhat-mu / ((x - z1)(x - z2)) through the transform difference quotient
Cplx hat_pair_integral(const Measure& m, Cplx z1, Cplx z2) {
  if (std::abs(z1 - z2) < 1e-12 * (1.0 + std::abs(z1))) return hat_derivative(m, z1);
  return (hat_transform(m, z1) - hat_transform(m, z2)) / (z1 - z2);
}

double system_residual(const Measure& m1, const Measure& m2, Cplx z, Cplx w1, Cplx w2,
                       Cplx* m_out) {
  const Cplx m = m2.stieltjes(z - w1);
  if (m_out) *m_out = m;
  const double d1 = std::abs(m - m1.stieltjes(z - w2));
  const double d2 = std::abs(1.0 / m - (w1 + w2 - z));
  return std::max(d1, d2);
}

struct IterateResult {
  Cplx w1, w2;
  double residual;
  int iterations;
};

// Damped Gauss-Seidel sweep on the rewritten system
//   -w2 = hat-m2(z - w1),  -w1 = hat-m1(z - w2)
IterateResult iterate_at(const Measure& m1, const Measure& m2, Cplx z, Cplx w1, Cplx w2,
                         double damping, double tol, int budget) {
  double res = system_residual(m1, m2, z, w1, w2, nullptr);
  int it = 0;
  while (res > tol && it < budget) {
    const Cplx w2_new = -hat_transform(m2, z - w1);
    w2 = (1.0 - damping) * w2 + damping * w2_new;
    const Cplx w1_new = -hat_transform(m1, z - w2);
    w1 = (1.0 - damping) * w1 + damping * w1_new;
    res = system_residual(m1, m2, z, w1, w2, nullptr);
    ++it;
  }
  return {w1, w2, res, it};
}

std::vector<double> default_eta_path(double eta_start, double eta_target) {
  std::vector<double> path;
  double eta = std::max(eta_start, eta_target);
  while (eta > eta_target * 1.0000001) {
    path.push_back(eta);
    eta *= 0.5;
  }
  path.push_back(eta_target);
  return path;
}

SubordinationSolution solve_with_warm_start(const Measure& m1, const Measure& m2, Cplx z,
                                            Cplx w1, Cplx w2, const std::vector<double>& etas,
                                            const SolverConfig& cfg) {
  SubordinationSolution sol;
  sol.z = z;
  const int levels = static_cast<int>(etas.size());
  int total_it = 0;
  for (int l = 0; l < levels; ++l) {
    // remaining budget splits over the levels still to run, so the final
    // (stiffest) level inherits whatever the warm-up levels did not use
    const int budget =
        std::max(100, (cfg.max_iter - total_it) / std::max(1, levels - l));
    const Cplx zl(z.real(), etas[l]);
    const auto r = iterate_at(m1, m2, zl, w1, w2, cfg.damping, cfg.tol, budget);
    w1 = r.w1;
    w2 = r.w2;
    total_it += r.iterations;
  }
  sol.w1 = w1;
  sol.w2 = w2;
  sol.residual = system_residual(m1, m2, Cplx(z.real(), etas.back()), w1, w2, &sol.m);
  sol.iterations = total_it;
  sol.converged = sol.residual <= cfg.tol;
  return sol;
}

}  // namespace

SubordinationSolution solve_pointwise(const Measure& m1, const Measure& m2, Cplx z,
                                      const SolverConfig& cfg) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("solve_pointwise: need Im z > 0");
  const double eta = std::max(z.imag(), cfg.eta_min);
  const auto etas = default_eta_path(cfg.eta_start, eta);
  auto sol = solve_with_warm_start(m1, m2, Cplx(z.real(), eta), Cplx(0, 0), Cplx(0, 0), etas, cfg);
  sol.z = Cplx(z.real(), eta);
  return sol;
}

std::vector<SubordinationSolution> solve_curve(const Measure& m1, const Measure& m2,
                                               const std::vector<double>& e_grid,
                                               const std::vector<double>& eta_path,
                                               const SolverConfig& cfg) {
  if (eta_path.empty() || eta_path.front() < 1.0)
    throw std::invalid_argument("solve_curve: eta_path must start >= 1");
  for (std::size_t i = 0; i < eta_path.size(); ++i) {
    if (eta_path[i] <= 0.0) throw std::invalid_argument("solve_curve: eta_path must be positive");
    if (i > 0 && !(eta_path[i] < eta_path[i - 1]))
      throw std::invalid_argument("solve_curve: eta_path must be strictly decreasing");
  }
  std::vector<double> etas = eta_path;
  etas.back() = std::max(etas.back(), cfg.eta_min);

  std::vector<SubordinationSolution> out;
  out.reserve(e_grid.size());
  Cplx w1(0, 0), w2(0, 0);
  bool have_warm = false;
  for (double e : e_grid) {
    // neighbouring E warm start, but always re-anneal from the top of the path
    const Cplx z(e, etas.back());
    auto sol = solve_with_warm_start(m1, m2, z, have_warm ? w1 : Cplx(0, 0),
                                     have_warm ? w2 : Cplx(0, 0), etas, cfg);
    sol.z = z;
    if (sol.converged) {
      w1 = sol.w1;
      w2 = sol.w2;
      have_warm = true;
    }
    out.push_back(sol);
  }
  return out;
}

FreeConvolutionResult free_convolution(const Measure& m1, const Measure& m2,
                                       const std::vector<double>& grid, double eta0,
                                       const SolverConfig& cfg) {
  const auto etas = default_eta_path(cfg.eta_start, std::max(eta0, cfg.eta_min));
  std::vector<double> path(etas.begin(), etas.end());
  const auto sols = solve_curve(m1, m2, grid, path, cfg);

  std::vector<double> dens(grid.size());
  int bad = 0;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    dens[i] = std::max(0.0, sols[i].m.imag() / M_PI);
    if (!sols[i].converged) ++bad;
  }
  double mass = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    mass += 0.5 * (dens[i] + dens[i - 1]) * (grid[i] - grid[i - 1]);
  if (mass <= 0.0) throw std::runtime_error("free_convolution: zero mass on grid");
  FreeConvolutionResult res;
  res.renormalization = mass;
  res.flagged = std::abs(mass - 1.0) > 0.05;
  res.non_converged = bad;
  for (auto& d : dens) d /= mass;
  res.density = Measure::from_grid(std::vector<double>(grid), std::move(dens));
  return res;
}

FlowResult semicircle_flow(const std::function<Cplx(Cplx)>& m0, double t, Cplx z,
                           const SolverConfig& cfg) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("semicircle_flow: need Im z > 0");
  if (t < 0.0) throw std::invalid_argument("semicircle_flow: need t >= 0");
  FlowResult out;
  if (t == 0.0) {
    out.m = m0(z);
    out.converged = true;
    return out;
  }
  auto deriv = [&](Cplx zeta) {
    const double step = 1e-7 * std::max(1.0, std::abs(zeta));
    return (m0(zeta + step) - m0(zeta - step)) / (2.0 * step);
  };
  const auto etas = default_eta_path(cfg.eta_start, z.imag());
  Cplx m = m0(Cplx(z.real(), etas.front()));
  int total_it = 0;
  double res = 0.0;
  for (double eta : etas) {
    const Cplx zl(z.real(), eta);
    const int budget = std::max(50, cfg.max_iter / static_cast<int>(etas.size()));
    for (int it = 0; it < budget; ++it) {
      const Cplx zeta = zl + t * m;
      const Cplx f = (zeta.imag() > 0.0 ? m0(zeta) : Cplx(0.0, 1e300)) - m;
      res = std::abs(f);
      ++total_it;
      if (res <= cfg.tol) break;
      Cplx step;
      if (zeta.imag() > 0.0) {
        const Cplx fp = t * deriv(zeta) - 1.0;
        step = -f / fp;
      } else {
        step = 0.0;
      }
      // keep the iterate in C+; halve the Newton step until it stays there
      Cplx m_next = m + step;
      int halvings = 0;
      while ((m_next.imag() <= 0.0 || (zl + t * m_next).imag() <= 0.0) && halvings < 60) {
        step *= 0.5;
        m_next = m + step;
        ++halvings;
      }
      if (halvings >= 60) {
        // damped Picard fallback
        const Cplx zeta2 = zl + t * m;
        if (zeta2.imag() > 0.0) m_next = 0.5 * m + 0.5 * m0(zeta2);
      }
      m = m_next;
    }
  }
  out.m = m;
  out.residual = res;
  out.iterations = total_it;
  out.converged = res <= cfg.tol && m.imag() > 0.0;
  return out;
}

FlowResult semicircle_flow(const Measure& m0, double t, Cplx z, const SolverConfig& cfg) {
  return semicircle_flow([&m0](Cplx zeta) { return m0.stieltjes(zeta); }, t, z, cfg);
}

std::vector<double> classical_locations(const Measure& density, int n) {
  return density.quantiles(n);
}

std::vector<double> classical_locations_flowed(const Measure& m0, double t, int n, int n_steps,
                                               const SolverConfig& cfg) {
  if (n_steps < 1) throw std::invalid_argument("classical_locations_flowed: need n_steps >= 1");
  std::vector<double> gamma = m0.quantiles(n);
  const double h = t / n_steps;
  const double eta_eval = 1e-6;
  SolverConfig flow_cfg = cfg;
  flow_cfg.tol = std::max(cfg.tol, 1e-10);
  for (int s = 0; s < n_steps; ++s) {
    const double ts = s * h;
    for (int i = 0; i < n; ++i) {
      const auto fr = semicircle_flow(m0, ts, Cplx(gamma[i], eta_eval), flow_cfg);
      gamma[i] -= h * fr.m.real();
    }
    std::sort(gamma.begin(), gamma.end());
  }
  return gamma;
}

StabilityDiagnostics stability_diagnostics(const SubordinationSolution& sol, const Measure& m1,
                                           const Measure& m2) {
  StabilityDiagnostics d;
  d.a = hat_derivative(m2, sol.z - sol.w1);
  d.b = hat_derivative(m1, sol.z - sol.w2);
  d.one_minus_ab = std::abs(1.0 - d.a * d.b);
  d.r1 = 0.0;
  d.r2 = 0.0;
  return d;
}

StabilityDiagnostics stability_diagnostics(const SubordinationSolution& sol_finite,
                                           const SubordinationSolution& sol_limit,
                                           const Measure& m1_finite, const Measure& m2_finite,
                                           const Measure& m1_limit, const Measure& m2_limit) {
  StabilityDiagnostics d;
  d.a = hat_pair_integral(m2_limit, sol_limit.z - sol_limit.w1, sol_finite.z - sol_finite.w1);
  d.b = hat_pair_integral(m1_limit, sol_limit.z - sol_limit.w2, sol_finite.z - sol_finite.w2);
  d.one_minus_ab = std::abs(1.0 - d.a * d.b);
  d.r1 = 1.0 / m2_limit.stieltjes(sol_finite.z - sol_finite.w1) -
         1.0 / m2_finite.stieltjes(sol_finite.z - sol_finite.w1);
  d.r2 = 1.0 / m1_limit.stieltjes(sol_finite.z - sol_finite.w2) -
         1.0 / m1_finite.stieltjes(sol_finite.z - sol_finite.w2);
  return d;
}

}  // namespace boxplus
