#include <doctest.h>

#include <cmath>
#include <complex>

#include "boxplus/measure.hpp"
#include "boxplus/rng.hpp"

using namespace boxplus;

namespace {

// closed form for the semicircle with variance t
Cplx semicircle_stieltjes(double t, Cplx z) {
  const Cplx root = std::sqrt(z * z - 4.0 * t);
  // branch with Im m > 0
  Cplx m = (-z + root) / (2.0 * t);
  if (m.imag() <= 0.0) m = (-z - root) / (2.0 * t);
  return m;
}

double semicircle_density(double t, double x) {
  const double d = 4.0 * t - x * x;
  return d > 0.0 ? std::sqrt(d) / (2.0 * M_PI * t) : 0.0;
}

}  // namespace

TEST_CASE("stieltjes transform oracle values") {
  const Cplx i(0.0, 1.0);

  SUBCASE("single atom at 0") {
    const auto m = Measure::dirac(0.0);
    CHECK(std::abs(m.stieltjes(i) - i) < 1e-15);
  }
  SUBCASE("semicircle, closed form at z = i") {
    const auto m = Measure::semicircle(1.0, 4001);
    const Cplx expected(0.0, (std::sqrt(5.0) - 1.0) / 2.0);
    CHECK(std::abs(m.stieltjes(i) - expected) < 2e-5);
    CHECK(std::abs(m.stieltjes(i) - semicircle_stieltjes(1.0, i)) < 2e-5);
  }
  SUBCASE("two-point law at z = 2i") {
    const auto m = Measure::two_point(1.0);
    CHECK(std::abs(m.stieltjes(2.0 * i) - Cplx(0.0, 0.4)) < 1e-15);
  }
  SUBCASE("rejects the closed half plane") {
    const auto m = Measure::dirac(0.0);
    CHECK_THROWS(m.stieltjes(Cplx(0.0, 0.0)));
    CHECK_THROWS(m.stieltjes(Cplx(1.0, -1.0)));
  }
}

TEST_CASE("stieltjes is Nevanlinna and bounded by 1/Im z") {
  RngStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> locs, ws;
    const int k = 2 + static_cast<int>(rng.next_u64() % 6);
    double tot = 0.0;
    for (int a = 0; a < k; ++a) {
      locs.push_back(2.0 * rng.next_double() - 1.0);
      ws.push_back(0.05 + rng.next_double());
      tot += ws.back();
    }
    for (auto& w : ws) w /= tot;
    const auto m = Measure::from_atoms(locs, ws);
    for (int p = 0; p < 10; ++p) {
      const Cplx z(4.0 * rng.next_double() - 2.0, 0.01 + 2.0 * rng.next_double());
      const Cplx v = m.stieltjes(z);
      CHECK(v.imag() > 0.0);
      CHECK(std::abs(v) * z.imag() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("quantiles") {
  SUBCASE("uniform[0,1], n = 4") {
    const auto m = Measure::uniform(0.0, 1.0);
    const auto q = m.quantiles(4);
    REQUIRE(q.size() == 4);
    CHECK(q[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(q[1] == doctest::Approx(0.50).epsilon(1e-9));
    CHECK(q[2] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(q[3] == doctest::Approx(1.00).epsilon(1e-9));
  }
  SUBCASE("point mass") {
    const auto q = Measure::dirac(1.5).quantiles(7);
    for (double v : q) CHECK(v == 1.5);
  }
  SUBCASE("semicircle, n = 2: median and right edge") {
    const auto q = Measure::semicircle(1.0).quantiles(2);
    CHECK(std::abs(q[0]) < 1e-8);
    CHECK(q[1] == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("nondecreasing on a lumpy measure") {
    const auto m = Measure::from_atoms({-1.0, -1.0 + 1e-9, 3.0}, {0.3, 0.3, 0.4});
    const auto q = m.quantiles(11);
    for (std::size_t i = 1; i < q.size(); ++i) CHECK(q[i] >= q[i - 1]);
  }
}

TEST_CASE("quantile atomization approximates the transform (finite-N bound)") {
  const int n = 1000;
  const auto grid_m = Measure::semicircle(1.0, 4001);
  const auto atom_m = Measure::from_spectrum(grid_m.quantiles(n));
  const double n_pow = std::pow(static_cast<double>(n), -0.9);
  for (double eta : {0.05, 0.1, 0.3, 1.0}) {
    for (double e : {-1.5, -0.4, 0.0, 0.8, 1.9}) {
      const Cplx z(e, eta);
      const double err = std::abs(grid_m.stieltjes(z) - atom_m.stieltjes(z));
      CHECK(err <= 10.0 * n_pow / (eta * eta));
    }
  }
}

TEST_CASE("measure construction guards") {
  CHECK_THROWS(Measure::from_atoms({0.0}, {0.5}));               // mass != 1
  CHECK_THROWS(Measure::from_atoms({0.0, 1.0}, {1.2, -0.2}));    // negative weight
  CHECK_THROWS(Measure::from_grid({0.0, 0.0, 1.0}, {1, 1, 1}));  // not ascending
  const auto m = Measure::two_point(1.0);
  CHECK(m.support_bound() == 1.0);
  Measure copy = m;
  CHECK_THROWS(copy.set_support_bound(0.5));
  copy.set_support_bound(4.0);
  CHECK(copy.support_bound() == 4.0);
}

TEST_CASE("check_assumptions") {
  SUBCASE("semicircle mu2 certifies a square-root-edge exponent") {
    const auto rep = check_assumptions(Measure::semicircle(1.0), Measure::semicircle(1.0, 4001));
    CHECK(rep.bounded_stieltjes);
    REQUIRE(rep.edge_constant_c.has_value());
    // sampled certificate sits inside the paper's (0, 1/2) band; the h -> 0
    // limit 1/2 is not reachable at finite window resolution
    CHECK(*rep.edge_constant_c > 0.12);
    CHECK(*rep.edge_constant_c < 0.5);
    CHECK(rep.quantile_gap_ok);
  }
  SUBCASE("point mass mu2 fails the edge condition") {
    const auto rep = check_assumptions(Measure::semicircle(1.0), Measure::dirac(0.0));
    CHECK_FALSE(rep.edge_constant_c.has_value());
  }
  SUBCASE("uniform mu2 certifies an exponent near 1") {
    const auto rep = check_assumptions(Measure::dirac(0.0), Measure::uniform(-1.0, 1.0, 4001));
    REQUIRE(rep.edge_constant_c.has_value());
    CHECK(*rep.edge_constant_c > 0.8);
    CHECK(*rep.edge_constant_c <= 1.0 + 1e-9);
    CHECK(rep.quantile_gap_ok);
  }
}

TEST_CASE("density_from_stieltjes") {
  SUBCASE("semicircle recovery") {
    const auto m = Measure::semicircle(1.0, 8001);
    std::vector<double> grid;
    for (double e = -2.5; e <= 2.5 + 1e-12; e += 1e-3) grid.push_back(e);
    const auto res =
        density_from_stieltjes([&](Cplx z) { return m.stieltjes(z); }, grid, 1e-3);
    CHECK_FALSE(res.flagged);
    double sup = 0.0;
    const auto& pts = res.density.grid_points();
    const auto& dens = res.density.grid_density();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::abs(pts[i]) > 1.9) continue;
      sup = std::max(sup, std::abs(dens[i] - semicircle_density(1.0, pts[i])));
    }
    CHECK(sup <= 2e-3);
  }
  SUBCASE("constant transform gives a flat density") {
    std::vector<double> grid;
    for (double e = 0.0; e <= 1.0 + 1e-12; e += 0.01) grid.push_back(e);
    const auto res = density_from_stieltjes([](Cplx) { return Cplx(0.3, 1.0); }, grid, 0.5);
    const auto& dens = res.density.grid_density();
    for (double d : dens) CHECK(d == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("point mass gives the Poisson kernel peak") {
    const auto m = Measure::dirac(0.0);
    std::vector<double> grid;
    for (double e = -0.5; e <= 0.5 + 1e-12; e += 1e-3) grid.push_back(e);
    const double eta0 = 1e-2;
    const auto res =
        density_from_stieltjes([&](Cplx z) { return m.stieltjes(z); }, grid, eta0);
    CHECK_FALSE(res.flagged);
    // renormalized peak: (1/(pi eta0)) / mass-inside-window
    const double mass_inside = (2.0 / M_PI) * std::atan(0.5 / eta0);
    const double peak = *std::max_element(res.density.grid_density().begin(),
                                          res.density.grid_density().end());
    CHECK(peak == doctest::Approx(1.0 / (M_PI * eta0) / mass_inside).epsilon(1e-3));
  }
  SUBCASE("mass preservation within the 5% gate on smooth densities") {
    const auto m = Measure::semicircle(2.0, 4001);
    std::vector<double> grid;
    for (double e = -3.0; e <= 3.0 + 1e-12; e += 2e-3) grid.push_back(e);
    const auto res =
        density_from_stieltjes([&](Cplx z) { return m.stieltjes(z); }, grid, 1e-3);
    CHECK_FALSE(res.flagged);
    CHECK(std::abs(res.renormalization - 1.0) < 0.05);
  }
}
