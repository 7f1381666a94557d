#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "boxplus/matrix_models.hpp"
#include "boxplus/measure.hpp"
#include "boxplus/rng.hpp"
#include "boxplus/spectral_stats.hpp"

using namespace boxplus;

namespace {

double semicircle_cdf(double t, double x) {
  const double r = 2.0 * std::sqrt(t);
  if (x <= -r) return 0.0;
  if (x >= r) return 1.0;
  return 0.5 + x * std::sqrt(4.0 * t - x * x) / (4.0 * M_PI * t) +
         std::asin(x / r) / M_PI;
}

}  // namespace

TEST_CASE("sample_haar") {
  RngStream rng(11);

  SUBCASE("unitarity for both symmetry classes") {
    for (int beta : {1, 2}) {
      for (int n : {1, 5, 40}) {
        const MatrixC u = sample_haar(n, beta, rng);
        const double defect =
            (u.adjoint() * u - MatrixC::Identity(n, n)).cwiseAbs().maxCoeff();
        CHECK(defect <= 1e-10);
        if (beta == 1) CHECK(u.imag().cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
  SUBCASE("n = 1 phase is uniform on the circle") {
    std::vector<double> args;
    for (int k = 0; k < 10000; ++k) {
      const MatrixC u = sample_haar(1, 2, rng);
      CHECK(std::abs(std::abs(u(0, 0)) - 1.0) < 1e-12);
      args.push_back(std::arg(u(0, 0)));
    }
    const double ks = ks_distance(
        args, [](double s) { return (s + M_PI) / (2.0 * M_PI); });
    CHECK(ks <= 0.02);
  }
  SUBCASE("Haar moment E|tr U|^2 = 1") {
    const int n = 20, trials = 10000;
    double acc = 0.0;
    for (int k = 0; k < trials; ++k) acc += std::norm(sample_haar(n, 2, rng).trace());
    const double mean = acc / trials;
    CHECK(mean >= 0.9);
    CHECK(mean <= 1.1);
  }
}

TEST_CASE("regularize") {
  RngStream rng(5);

  SUBCASE("epsilon = 0 leaves the diagonal exact") {
    const std::vector<double> x{0.5, -1.25, 3.0};
    const MatrixC h = regularize(x, 0.0, 2, rng);
    for (int i = 0; i < 3; ++i) CHECK(h(i, i) == Cplx(x[i], 0.0));
    CHECK(h.cwiseAbs().sum() == doctest::Approx(0.5 + 1.25 + 3.0));
  }
  SUBCASE("Weyl bound on eigenvalue displacement") {
    std::vector<double> x(20);
    for (int i = 0; i < 20; ++i) x[i] = -1.0 + 2.0 * i / 19.0;
    const double eps = 1e-3;
    for (int trial = 0; trial < 20; ++trial) {
      RngStream r1(1000 + trial), r2(1000 + trial);
      const MatrixC q = sample_gaussian_hermitian(20, 2, r1);
      const MatrixC h = regularize(x, eps, 2, r2);
      const double qnorm = eigh(q).values.cwiseAbs().maxCoeff();
      const auto alpha = eigh(h).values;
      for (int k = 0; k < 20; ++k)
        CHECK(std::abs(alpha(k) - x[k]) <= eps * qnorm + 1e-13);
    }
  }
  SUBCASE("spectrum is simple after regularization") {
    const std::vector<double> x(10, 0.0);  // maximally degenerate input
    for (int trial = 0; trial < 1000; ++trial) {
      RngStream r(40000 + trial);
      const auto es = eigh(regularize(x, 1e-8, 2, r));
      for (int k = 0; k + 1 < 10; ++k) CHECK(es.values(k + 1) - es.values(k) > 0.0);
    }
  }
}

TEST_CASE("assemble_h") {
  RngStream rng(3);

  SUBCASE("X = 0, U = I recovers Y") {
    const int n = 8;
    const MatrixC x = MatrixC::Zero(n, n);
    VectorR y(n);
    for (int i = 0; i < n; ++i) y(i) = std::sin(1.0 + i);
    const MatrixC v = sample_haar(n, 2, rng);
    const MatrixC h = assemble_h(x, y, v, MatrixC::Identity(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(h(i, j) - (i == j ? Cplx(y(i), 0) : Cplx(0, 0))) < 1e-12);
  }
  SUBCASE("norm bound ||H|| <= ||X|| + ||Y||") {
    const int n = 24;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> xs(n), ys(n);
      for (int i = 0; i < n; ++i) {
        xs[i] = 2.0 * rng.next_double() - 1.0;
        ys[i] = 3.0 * rng.next_double() - 1.5;
      }
      const MatrixC v = sample_haar(n, 2, rng), u = sample_haar(n, 2, rng);
      MatrixC x = MatrixC::Zero(n, n), y = MatrixC::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        x(i, i) = xs[i];
        y(i, i) = ys[i];
      }
      const auto es = eigh(assemble_h(x, y, v, u));
      const double xn = *std::max_element(xs.begin(), xs.end(),
                                          [](double a, double b) { return std::abs(a) < std::abs(b); });
      const double yn = *std::max_element(ys.begin(), ys.end(),
                                          [](double a, double b) { return std::abs(a) < std::abs(b); });
      CHECK(es.values.cwiseAbs().maxCoeff() <= std::abs(xn) + std::abs(yn) + 1e-10);
    }
  }
  SUBCASE("ESD of semicircle-quantile inputs matches semicircle(2)") {
    const int n = 500;
    const auto q = Measure::semicircle(1.0, 8001).quantiles(n);
    MatrixC x = MatrixC::Zero(n, n);
    VectorR y(n);
    for (int i = 0; i < n; ++i) {
      x(i, i) = q[i];
      y(i) = q[i];
    }
    const MatrixC v = sample_haar(n, 2, rng), u = sample_haar(n, 2, rng);
    const auto es = eigh(assemble_h(x, y, v, u));
    std::vector<double> eigs(es.values.data(), es.values.data() + n);
    const double ks = ks_distance(eigs, [](double s) { return semicircle_cdf(2.0, s); });
    CHECK(ks <= 0.05);
  }
  SUBCASE("dimension mismatch is rejected") {
    const MatrixC x3 = MatrixC::Zero(3, 3), y4 = MatrixC::Zero(4, 4);
    const MatrixC id3 = MatrixC::Identity(3, 3);
    CHECK_THROWS(assemble_h(x3, y4, id3, id3));
  }
}

TEST_CASE("eigh") {
  SUBCASE("diagonal permutation") {
    MatrixC a = MatrixC::Zero(3, 3);
    a(0, 0) = 3.0;
    a(1, 1) = 1.0;
    a(2, 2) = 2.0;
    const auto es = eigh(a);
    CHECK(es.values(0) == doctest::Approx(1.0));
    CHECK(es.values(1) == doctest::Approx(2.0));
    CHECK(es.values(2) == doctest::Approx(3.0));
    CHECK(std::abs(es.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(es.vectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(es.vectors(0, 2)) == doctest::Approx(1.0));
  }
  SUBCASE("reconstruction") {
    RngStream rng(17);
    const MatrixC q = sample_gaussian_hermitian(40, 2, rng);
    const auto es = eigh(q);
    const MatrixC rec =
        es.vectors * es.values.cast<Cplx>().asDiagonal() * es.vectors.adjoint();
    const double scale = q.cwiseAbs().maxCoeff();
    CHECK((rec - q).cwiseAbs().maxCoeff() <= 1e-9 * scale);
    CHECK((es.vectors.adjoint() * es.vectors - MatrixC::Identity(40, 40)).cwiseAbs().maxCoeff() <=
          1e-10);
  }
  SUBCASE("2x2 exchange matrix with the sign convention") {
    MatrixC a(2, 2);
    a << 0, 1, 1, 0;
    const auto es = eigh(a);
    CHECK(es.values(0) == doctest::Approx(-1.0));
    CHECK(es.values(1) == doctest::Approx(1.0));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(es.vectors(0, 0) - Cplx(s, 0)) < 1e-12);
    CHECK(std::abs(es.vectors(1, 0) - Cplx(-s, 0)) < 1e-12);
    CHECK(std::abs(es.vectors(0, 1) - Cplx(s, 0)) < 1e-12);
    CHECK(std::abs(es.vectors(1, 1) - Cplx(s, 0)) < 1e-12);
  }
  SUBCASE("first nonzero component has nonnegative real part") {
    RngStream rng(23);
    const auto es = eigh(sample_gaussian_hermitian(30, 2, rng));
    for (int k = 0; k < 30; ++k) {
      for (int i = 0; i < 30; ++i) {
        const Cplx c = es.vectors(i, k);
        if (std::abs(c) > 1e-12) {
          CHECK(c.real() >= 0.0);
          CHECK(std::abs(c.imag()) < 1e-12);
          break;
        }
      }
    }
  }
  SUBCASE("non-Hermitian input is rejected") {
    MatrixC a(2, 2);
    a << 0, 1, 2, 0;
    CHECK_THROWS(eigh(a));
  }
}

TEST_CASE("green_diag") {
  RngStream rng(29);
  const Cplx i(0.0, 1.0);

  SUBCASE("H = 0 gives G_ii = i at z = i") {
    const auto es = eigh(MatrixC::Zero(6, 6));
    const auto g = green_diag(es, i);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(g(k) - i) < 1e-14);
  }
  SUBCASE("diagonal H gives the exact resolvent") {
    MatrixC h = MatrixC::Zero(4, 4);
    const double ys[4] = {-1.0, -0.2, 0.4, 2.0};
    for (int k = 0; k < 4; ++k) h(k, k) = ys[k];
    const Cplx z(0.3, 0.25);
    const auto g = green_diag(eigh(h), z);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(g(k) - 1.0 / (ys[k] - z)) < 1e-12);
  }
  SUBCASE("trace identity and the lower bound on Im G_ii") {
    const MatrixC q = sample_gaussian_hermitian(50, 2, rng);
    const auto es = eigh(q);
    const Cplx z(0.2, 0.4);
    const auto g = green_diag(es, z);
    Cplx tr1 = 0.0, tr2 = 0.0;
    for (int k = 0; k < 50; ++k) {
      tr1 += g(k);
      tr2 += 1.0 / (es.values(k) - z);
    }
    CHECK(std::abs(tr1 - tr2) < 1e-10);
    const double hnorm = es.values.cwiseAbs().maxCoeff();
    const double c = 1.0 / std::pow(hnorm + std::abs(z), 2.0);
    for (int k = 0; k < 50; ++k) CHECK(g(k).imag() >= c * z.imag() - 1e-12);
  }
  SUBCASE("Ward identity on the full resolvent") {
    const MatrixC q = sample_gaussian_hermitian(30, 2, rng);
    const auto es = eigh(q);
    const Cplx z(0.1, 0.3);
    const MatrixC g = resolvent(es, z);
    for (int i2 = 0; i2 < 30; ++i2) {
      double row = 0.0;
      for (int k = 0; k < 30; ++k) row += std::norm(g(i2, k));
      CHECK(row == doctest::Approx(g(i2, i2).imag() / z.imag()).epsilon(1e-10));
    }
  }
}

TEST_CASE("overlaps") {
  SUBCASE("identity U on a diagonal matrix gives the window indicator") {
    const int n = 30;
    MatrixC h = MatrixC::Zero(n, n);
    for (int k = 0; k < n; ++k) h(k, k) = static_cast<double>(n - k);  // reversing permutation
    const auto es = eigh(h);
    const auto t = overlaps(MatrixC::Identity(n, n), es, 0.2);
    const int window = short_range_halfwidth(n, 0.2);
    for (int i2 = 0; i2 < n; ++i2)
      for (int j = 0; j < n; ++j) {
        // eigenvector k sits at basis index n-1-k
        const int pi = n - 1 - i2, pj = n - 1 - j;
        const double expect = std::abs(pi - pj) <= window ? 1.0 : 0.0;
        CHECK(t.gamma(i2, j) == doctest::Approx(expect).epsilon(1e-12));
      }
  }
  SUBCASE("columns of w are unit vectors") {
    RngStream rng(31);
    const int n = 60;
    const MatrixC u = sample_haar(n, 2, rng);
    const auto es = eigh(sample_gaussian_hermitian(n, 2, rng));
    const auto t = overlaps(u, es, 0.2);
    for (int k = 0; k < n; ++k)
      CHECK(std::abs(t.w.col(k).norm() - 1.0) <= 1e-10);
    CHECK((t.gamma - t.gamma.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(t.gamma.minCoeff() >= 0.0);
    CHECK(t.gamma.maxCoeff() <= 1.0 + 1e-12);
  }
  SUBCASE("bulk overlap factors are delocalized (Monte Carlo)") {
    // gamma_ij sums (2 floor(n^a) + 1) diagonals of |w|^2 products, so its
    // bulk maximum sits at (2 n^a + 1) c / n with c a small constant; assert
    // the normalized constant here
    const int n = 150, trials = 5;
    const double a_exp = 0.2;
    const auto q = Measure::semicircle(1.0, 4001).quantiles(n);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      RngStream rng(900 + trial);
      MatrixC x = MatrixC::Zero(n, n);
      VectorR y(n);
      for (int i2 = 0; i2 < n; ++i2) {
        x(i2, i2) = q[i2];
        y(i2) = q[i2];
      }
      const MatrixC v = sample_haar(n, 2, rng), u = sample_haar(n, 2, rng);
      const auto es = eigh(assemble_h(x, y, v, u));
      const auto t = overlaps(u, es, a_exp);
      for (int i2 = n / 5; i2 < 4 * n / 5; ++i2)
        for (int j = n / 5; j < 4 * n / 5; ++j)
          if (i2 != j) worst = std::max(worst, t.gamma(i2, j));
    }
    CHECK(worst * n / std::pow(n, a_exp) <= 6.0);
  }
}

TEST_CASE("spectrum law is invariant under right translation of (V, U)") {
  const int n = 40, trials = 50;
  const auto q = Measure::uniform(-1.0, 1.0).quantiles(n);
  std::vector<double> base, translated;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng(7777 + trial);
    MatrixC x = MatrixC::Zero(n, n);
    VectorR y(n);
    for (int i = 0; i < n; ++i) {
      x(i, i) = q[i];
      y(i) = q[i];
    }
    const MatrixC v = sample_haar(n, 2, rng), u = sample_haar(n, 2, rng);
    const MatrixC w = sample_haar(n, 2, rng);
    const auto es1 = eigh(assemble_h(x, y, v, u));
    const auto es2 = eigh(assemble_h(x, y, MatrixC(v * w), MatrixC(u * w)));
    for (int k = 0; k < n; ++k) {
      base.push_back(es1.values(k));
      translated.push_back(es2.values(k));
    }
  }
  CHECK(ks_distance_two_sample(base, translated) <= 0.08);
}
