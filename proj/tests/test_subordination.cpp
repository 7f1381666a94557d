#include <doctest.h>

#include <cmath>

#include "boxplus/measure.hpp"
#include "boxplus/rng.hpp"
#include "boxplus/subordination.hpp"

using namespace boxplus;

namespace {

Cplx semicircle_m(double t, Cplx z) {
  const Cplx root = std::sqrt(z * z - 4.0 * t);
  Cplx m = (-z + root) / (2.0 * t);
  if (m.imag() <= 0.0) m = (-z - root) / (2.0 * t);
  return m;
}

double arcsine_density(double e) {
  return std::abs(e) < 2.0 ? 1.0 / (M_PI * std::sqrt(4.0 - e * e)) : 0.0;
}

double semicircle_density(double t, double x) {
  const double d = 4.0 * t - x * x;
  return d > 0.0 ? std::sqrt(d) / (2.0 * M_PI * t) : 0.0;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("solve_pointwise oracle values") {
  const Cplx i(0.0, 1.0);
  SolverConfig cfg;

  SUBCASE("delta0 boxplus delta0 = delta0") {
    const auto m = Measure::dirac(0.0);
    const auto sol = solve_pointwise(m, m, i, cfg);
    CHECK(sol.converged);
    CHECK(std::abs(sol.m - i) < 1e-10);
    CHECK(std::abs(sol.w1) < 1e-10);
    CHECK(std::abs(sol.w2) < 1e-10);
  }
  SUBCASE("semicircle boxplus semicircle = semicircle(2)") {
    const auto m = Measure::semicircle(1.0, 8001);
    const auto sol = solve_pointwise(m, m, i, cfg);
    CHECK(sol.converged);
    CHECK(std::abs(sol.m - Cplx(0.0, 0.5)) < 1e-4);
    CHECK(std::abs(sol.w1 - Cplx(0.0, -0.5)) < 1e-4);
    CHECK(std::abs(sol.w2 - Cplx(0.0, -0.5)) < 1e-4);
  }
  SUBCASE("two-point boxplus two-point = arcsine") {
    const auto m = Measure::two_point(1.0);
    const auto sol = solve_pointwise(m, m, 2.0 * i, cfg);
    CHECK(sol.converged);
    CHECK(std::abs(sol.m - Cplx(0.0, 1.0 / (2.0 * std::sqrt(2.0)))) < 1e-10);
    CHECK(std::abs(sol.w1 - Cplx(0.0, 1.0 - std::sqrt(2.0))) < 1e-10);
  }
  SUBCASE("consistency |1/m - (w1 + w2 - z)| <= residual") {
    const auto m = Measure::semicircle(1.0, 2001);
    const auto sol = solve_pointwise(m, Measure::two_point(0.7), Cplx(0.3, 0.05), cfg);
    CHECK(sol.converged);
    CHECK(std::abs(1.0 / sol.m - (sol.w1 + sol.w2 - sol.z)) <= sol.residual + 1e-15);
  }
  SUBCASE("rejects Im z <= 0") {
    CHECK_THROWS(solve_pointwise(Measure::dirac(0.0), Measure::dirac(0.0), Cplx(0.0, -1.0)));
  }
}

TEST_CASE("sign structure and exchange symmetry across the bulk") {
  const auto m1 = Measure::semicircle(1.0, 2001);
  const auto m2 = Measure::uniform(-1.0, 1.0, 2001);
  SolverConfig cfg;
  for (double e : {-1.5, -0.5, 0.0, 0.9, 2.0}) {
    for (double eta : {1.0, 0.1, 0.01}) {
      const Cplx z(e, eta);
      const auto s12 = solve_pointwise(m1, m2, z, cfg);
      const auto s21 = solve_pointwise(m2, m1, z, cfg);
      REQUIRE(s12.converged);
      REQUIRE(s21.converged);
      CHECK(s12.m.imag() > 0.0);
      CHECK(s12.w1.imag() <= 1e-14);
      CHECK(s12.w2.imag() <= 1e-14);
      CHECK(std::abs(s12.w1 - s21.w2) < 1e-9);
      CHECK(std::abs(s12.w2 - s21.w1) < 1e-9);
      CHECK(std::abs(s12.m - s21.m) < 1e-9);
    }
  }
}

TEST_CASE("solve_curve") {
  SolverConfig cfg;
  std::vector<double> eta_path;
  for (double eta = 1.0; eta > 1e-3; eta *= 0.5) eta_path.push_back(eta);
  eta_path.push_back(1e-3);

  SUBCASE("semicircle boxplus semicircle at E = 0 down to eta = 1e-3") {
    const auto m = Measure::semicircle(1.0, 8001);
    const auto sols = solve_curve(m, m, {0.0}, eta_path, cfg);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].converged);
    CHECK(std::abs(sols[0].m - Cplx(0.0, 1.0 / std::sqrt(2.0))) < 2e-3);
  }
  SUBCASE("delta0 boxplus mu is the identity") {
    const auto mu = Measure::semicircle(1.0, 2001);
    const auto sols = solve_curve(Measure::dirac(0.0), mu, linspace(-1.5, 1.5, 7), eta_path, cfg);
    for (const auto& s : sols) {
      REQUIRE(s.converged);
      CHECK(std::abs(s.m - mu.stieltjes(s.z)) < 1e-9);
    }
  }
  SUBCASE("two-point boxplus two-point has the arcsine density at 0") {
    // degenerate stability case: the hat measures are point masses, so
    // |1 - ab| ~ eta^2 and the fixed point converges in value long before the
    // residual reaches the default tolerance
    const auto m = Measure::two_point(1.0);
    const auto sols = solve_curve(m, m, {0.0}, eta_path, cfg);
    CHECK(sols[0].residual < 1e-6);
    CHECK(std::abs(sols[0].m.imag() / M_PI - 1.0 / (2.0 * M_PI)) < 1e-2);
  }
  SUBCASE("path validation") {
    const auto m = Measure::dirac(0.0);
    CHECK_THROWS(solve_curve(m, m, {0.0}, {0.5, 0.1}, cfg));        // starts < 1
    CHECK_THROWS(solve_curve(m, m, {0.0}, {1.0, 1.0}, cfg));       // not decreasing
    CHECK_THROWS(solve_curve(m, m, {0.0}, {1.0, 0.5, -0.1}, cfg)); // not positive
  }
}

TEST_CASE("free_convolution closed forms") {
  SolverConfig cfg;

  SUBCASE("semicircle(1) boxplus semicircle(1) = semicircle(2)") {
    const auto m = Measure::semicircle(1.0, 8001);
    const auto grid = linspace(-3.0, 3.0, 1201);
    const auto res = free_convolution(m, m, grid, 1e-3, cfg);
    CHECK(res.non_converged == 0);
    CHECK_FALSE(res.flagged);
    double sup = 0.0;
    const auto& pts = res.density.grid_points();
    const auto& dens = res.density.grid_density();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (std::abs(pts[k]) > 2.7) continue;
      sup = std::max(sup, std::abs(dens[k] - semicircle_density(2.0, pts[k])));
    }
    CHECK(sup <= 5e-3);
  }
  SUBCASE("shift covariance: (mu1 + a) boxplus mu2 = (mu1 boxplus mu2) + a") {
    const auto m1 = Measure::semicircle(1.0, 2001);
    const auto m2 = Measure::uniform(-1.0, 1.0, 2001);
    const double a = 0.6;
    const auto grid = linspace(-3.4, 3.4, 401);
    auto grid_shifted = grid;
    for (auto& g : grid_shifted) g += a;
    const auto base = free_convolution(m1, m2, grid, 1e-2, cfg);
    const auto shifted = free_convolution(m1.shifted(a), m2, grid_shifted, 1e-2, cfg);
    const auto& d0 = base.density.grid_density();
    const auto& d1 = shifted.density.grid_density();
    double sup = 0.0;
    for (std::size_t k = 0; k < d0.size(); ++k) sup = std::max(sup, std::abs(d0[k] - d1[k]));
    CHECK(sup < 1e-6);
  }
  SUBCASE("two-point boxplus two-point = arcsine away from the edges") {
    const auto m = Measure::two_point(1.0);
    const auto grid = linspace(-2.2, 2.2, 1101);
    const auto res = free_convolution(m, m, grid, 1e-3, cfg);
    double sup = 0.0;
    const auto& pts = res.density.grid_points();
    const auto& dens = res.density.grid_density();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (std::abs(pts[k]) > 1.9) continue;
      sup = std::max(sup, std::abs(dens[k] - arcsine_density(pts[k])));
    }
    CHECK(sup <= 1e-2);
  }
}

TEST_CASE("finite-n transform error decays toward the limit") {
  const auto limit = Measure::semicircle(1.0, 8001);
  SolverConfig cfg;
  std::vector<double> sup_err;
  for (int n : {100, 400, 1600}) {
    const auto atoms = Measure::from_spectrum(limit.quantiles(n));
    double sup = 0.0;
    for (double e : linspace(-1.8, 1.8, 13)) {
      const Cplx z(e, 1e-2);
      const auto fin = solve_pointwise(atoms, atoms, z, cfg);
      const auto lim = solve_pointwise(limit, limit, z, cfg);
      REQUIRE(fin.converged);
      REQUIRE(lim.converged);
      sup = std::max(sup, std::abs(fin.m - lim.m));
    }
    sup_err.push_back(sup);
  }
  CHECK(sup_err[1] < sup_err[0]);
  CHECK(sup_err[2] < sup_err[1]);
}

TEST_CASE("semicircle_flow") {
  SolverConfig cfg;
  const Cplx i(0.0, 1.0);

  SUBCASE("t = 0 is the identity") {
    const auto m0 = Measure::semicircle(1.0, 2001);
    const auto r = semicircle_flow(m0, 0.0, Cplx(0.3, 0.7), cfg);
    CHECK(r.converged);
    CHECK(std::abs(r.m - m0.stieltjes(Cplx(0.3, 0.7))) == 0.0);
  }
  SUBCASE("flow of delta0 is the semicircle") {
    const auto r = semicircle_flow(Measure::dirac(0.0), 1.0, i, cfg);
    CHECK(r.converged);
    CHECK(std::abs(r.m - Cplx(0.0, (std::sqrt(5.0) - 1.0) / 2.0)) < 1e-10);
  }
  SUBCASE("flow of semicircle(1) at t = 1 is semicircle(2)") {
    const auto m0 = Measure::semicircle(1.0, 8001);
    const auto r = semicircle_flow(m0, 1.0, i, cfg);
    CHECK(r.converged);
    CHECK(std::abs(r.m - Cplx(0.0, 0.5)) < 1e-4);
  }
  SUBCASE("semigroup property") {
    const auto m0 = Measure::semicircle(1.0, 4001);
    const double s = 0.3, t = 0.7;
    for (const Cplx z : {Cplx(0.0, 1.0), Cplx(0.8, 0.4), Cplx(-1.2, 0.2)}) {
      auto inner = [&](Cplx zeta) { return semicircle_flow(m0, s, zeta, cfg).m; };
      const auto composed = semicircle_flow(inner, t, z, cfg);
      const auto direct = semicircle_flow(m0, s + t, z, cfg);
      REQUIRE(composed.converged);
      REQUIRE(direct.converged);
      CHECK(std::abs(composed.m - direct.m) < 10.0 * 1e-8);
    }
  }
}

TEST_CASE("classical locations") {
  SUBCASE("semicircle quantiles") {
    const auto g = classical_locations(Measure::semicircle(1.0), 2);
    CHECK(std::abs(g[0]) < 1e-8);
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("flowed point mass spreads like semicircle(t)") {
    const double t = 0.25;
    const auto m0 = Measure::dirac(0.0);
    std::vector<double> grid = linspace(-1.4, 1.4, 561);
    const auto inv = density_from_stieltjes(
        [&](Cplx z) { return semicircle_flow(m0, t, z).m; }, grid, 1e-3);
    const auto got = inv.density.quantiles(8);
    const auto expect = Measure::semicircle(t, 4001).quantiles(8);
    // top quantile of the Poisson-smoothed density is pinned to the grid end
    for (int k = 0; k < 7; ++k) CHECK(std::abs(got[k] - expect[k]) < 5e-3);
  }
  SUBCASE("ODE locations match quantiles of the flowed density") {
    const int n = 500;
    const double t = 1e-2;
    const auto m0 = Measure::semicircle(1.0, 8001);
    const auto ode = classical_locations_flowed(m0, t, n, 10);

    std::vector<double> grid = linspace(-2.3, 2.3, 2301);
    const auto inv = density_from_stieltjes(
        [&](Cplx z) { return semicircle_flow(m0, t, z).m; }, grid, 1e-3);
    const auto quant = inv.density.quantiles(n);

    double min_bulk_density = 1e300;
    for (int i = n / 10; i < 9 * n / 10; ++i) {
      const double d = 4.0 * (1.0 + t) - quant[i] * quant[i];
      min_bulk_density = std::min(min_bulk_density,
                                  std::sqrt(std::max(0.0, d)) / (2.0 * M_PI * (1.0 + t)));
    }
    double worst = 0.0;
    for (int i = n / 10; i < 9 * n / 10; ++i) worst = std::max(worst, std::abs(ode[i] - quant[i]));
    CHECK(worst <= 3.0 / (n * min_bulk_density));
  }
}

TEST_CASE("stability diagnostics") {
  SolverConfig cfg;
  const Cplx i(0.0, 1.0);

  SUBCASE("delta0 pair has a = b = 0") {
    const auto m = Measure::dirac(0.0);
    const auto sol = solve_pointwise(m, m, i, cfg);
    const auto d = stability_diagnostics(sol, m, m);
    CHECK(std::abs(d.a) < 1e-12);
    CHECK(std::abs(d.b) < 1e-12);
    CHECK(d.one_minus_ab == doctest::Approx(1.0));
  }
  SUBCASE("semicircle pair at z = i: a = b = -1/5, |ab| < 1") {
    const auto m = Measure::semicircle(1.0, 8001);
    const auto sol = solve_pointwise(m, m, i, cfg);
    const auto d = stability_diagnostics(sol, m, m);
    CHECK(std::abs(d.a - Cplx(-0.2, 0.0)) < 1e-3);
    CHECK(std::abs(d.b - Cplx(-0.2, 0.0)) < 1e-3);
    CHECK(std::abs(d.a * d.b) < 1.0);
  }
  SUBCASE("|1 - ab| stays positive on a bulk grid") {
    const auto m1 = Measure::semicircle(1.0, 2001);
    const auto m2 = Measure::uniform(-1.0, 1.0, 2001);
    for (double e : {-1.0, 0.0, 1.2}) {
      for (double eta : {0.5, 0.05}) {
        const auto sol = solve_pointwise(m1, m2, Cplx(e, eta), cfg);
        REQUIRE(sol.converged);
        const auto d = stability_diagnostics(sol, m1, m2);
        CHECK(d.one_minus_ab > 0.0);
      }
    }
  }
  SUBCASE("finite-n variant reports the r inhomogeneities") {
    const auto limit = Measure::semicircle(1.0, 4001);
    const auto atoms = Measure::from_spectrum(limit.quantiles(200));
    const Cplx z(0.4, 0.1);
    const auto fin = solve_pointwise(atoms, atoms, z, cfg);
    const auto lim = solve_pointwise(limit, limit, z, cfg);
    const auto d = stability_diagnostics(fin, lim, atoms, atoms, limit, limit);
    CHECK(std::abs(d.r1) > 0.0);
    CHECK(std::abs(d.r1) < 0.1);
    CHECK(d.one_minus_ab > 0.0);
    // the bound |w - w_N| <= (|a|+|b|+1)/|1-ab| (|r1|+|r2|) holds at this point
    const double lhs = std::max(std::abs(fin.w1 - lim.w1), std::abs(fin.w2 - lim.w2));
    const double rhs = (std::abs(d.a) + std::abs(d.b) + 1.0) / d.one_minus_ab *
                       (std::abs(d.r1) + std::abs(d.r2));
    CHECK(lhs <= rhs * (1.0 + 1e-6));
  }
}
