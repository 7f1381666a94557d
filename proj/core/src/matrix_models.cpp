#include "boxplus/matrix_models.hpp"

#include <cmath>
#include <stdexcept>

namespace boxplus {

double EnsembleConfig::horizon() const {
  return std::pow(static_cast<double>(n), -1.0 + b_exp);
}

void EnsembleConfig::validate() const {
  if (n < 2) throw std::invalid_argument("EnsembleConfig: need n >= 2");
  if (beta != 1 && beta != 2) throw std::invalid_argument("EnsembleConfig: beta must be 1 or 2");
  if (!(a_exp > 0.0 && a_exp < 1.0))
    throw std::invalid_argument("EnsembleConfig: need 0 < a < 1");
  if (!(b_exp > 0.0 && b_exp <= a_exp / 100.0))
    throw std::invalid_argument("EnsembleConfig: need 0 < b <= a/100");
  if (epsilon_reg < 0.0) throw std::invalid_argument("EnsembleConfig: epsilon_reg >= 0");
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("EnsembleConfig: x and y must have length n");
}

int short_range_halfwidth(int n, double a_exp) {
  const double band = std::pow(static_cast<double>(n), a_exp);
  // largest integer k with k < band
  int k = static_cast<int>(std::ceil(band)) - 1;
  if (k < 0) k = 0;
  return std::min(k, n - 1);
}

MatrixC sample_haar(int n, int beta, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_haar: need n >= 1");
  MatrixC a(n, n);
  if (beta == 2) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) a(i, j) = rng.next_complex_gaussian();
  } else if (beta == 1) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) a(i, j) = rng.next_gaussian();
  } else {
    throw std::invalid_argument("sample_haar: beta must be 1 or 2");
  }
  Eigen::HouseholderQR<MatrixC> qr(a);
  MatrixC q = qr.householderQ();
  const MatrixC r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Cplx d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0 ? d / mag : Cplx(1.0, 0.0));
  }
  return q;
}

MatrixC sample_gaussian_hermitian(int n, int beta, RngStream& rng) {
  MatrixC q = MatrixC::Zero(n, n);
  const double off = 1.0 / std::sqrt(static_cast<double>(n));
  if (beta == 2) {
    for (int i = 0; i < n; ++i) {
      q(i, i) = off * rng.next_gaussian();
      for (int j = i + 1; j < n; ++j) {
        const Cplx g = off * rng.next_complex_gaussian();
        q(i, j) = g;
        q(j, i) = std::conj(g);
      }
    }
  } else if (beta == 1) {
    for (int i = 0; i < n; ++i) {
      q(i, i) = off * std::sqrt(2.0) * rng.next_gaussian();
      for (int j = i + 1; j < n; ++j) {
        const double g = off * rng.next_gaussian();
        q(i, j) = g;
        q(j, i) = g;
      }
    }
  } else {
    throw std::invalid_argument("sample_gaussian_hermitian: beta must be 1 or 2");
  }
  return q;
}

MatrixC regularize(const std::vector<double>& x, double epsilon, int beta, RngStream& rng) {
  const int n = static_cast<int>(x.size());
  MatrixC h = MatrixC::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = x[i];
  if (epsilon > 0.0) h += epsilon * sample_gaussian_hermitian(n, beta, rng);
  return h;
}

MatrixC assemble_h(const MatrixC& x, const MatrixC& y, const MatrixC& v, const MatrixC& u) {
  const auto n = x.rows();
  if (x.cols() != n || y.rows() != n || y.cols() != n || v.rows() != n || v.cols() != n ||
      u.rows() != n || u.cols() != n)
    throw std::invalid_argument("assemble_h: dimension mismatch");
  return v.adjoint() * x * v + u.adjoint() * y * u;
}

MatrixC assemble_h(const MatrixC& x, const VectorR& y, const MatrixC& v, const MatrixC& u) {
  const auto n = x.rows();
  if (y.size() != n) throw std::invalid_argument("assemble_h: dimension mismatch");
  MatrixC h = v.adjoint() * x * v;
  h += u.adjoint() * y.cast<Cplx>().asDiagonal() * u;
  return h;
}

MatrixC assemble_tilde_h(const MatrixC& x, const VectorR& y, const MatrixC& v, const MatrixC& u,
                         double t, double horizon, const VectorR& haty) {
  MatrixC h = assemble_h(x, y, v, u);
  const double w = horizon - t;
  for (int i = 0; i < h.rows(); ++i) h(i, i) += w * haty(i);
  return h;
}

EigenSystem eigh(const MatrixC& h) {
  const auto n = h.rows();
  if (h.cols() != n) throw std::invalid_argument("eigh: square matrix required");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("eigh: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixC> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: solver failed");
  EigenSystem es;
  es.values = solver.eigenvalues();
  es.vectors = solver.eigenvectors();
  // phase convention: first component with |.| > 1e-12 rotated to the
  // nonnegative real axis
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const Cplx c = es.vectors(i, k);
      const double mag = std::abs(c);
      if (mag > 1e-12) {
        es.vectors.col(k) *= std::conj(c) / mag;
        break;
      }
    }
  }
  return es;
}

VectorC green_diag(const EigenSystem& es, Cplx z) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("green_diag: need Im z > 0");
  const auto n = es.values.size();
  VectorC g = VectorC::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Cplx inv = 1.0 / (es.values(k) - z);
    for (Eigen::Index i = 0; i < n; ++i) g(i) += std::norm(es.vectors(i, k)) * inv;
  }
  return g;
}

MatrixC resolvent(const EigenSystem& es, Cplx z) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("resolvent: need Im z > 0");
  VectorC d(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) d(k) = 1.0 / (es.values(k) - z);
  return es.vectors * d.asDiagonal() * es.vectors.adjoint();
}

OverlapTable overlaps(const MatrixC& u, const EigenSystem& es, double a_exp) {
  const auto n = u.rows();
  if (u.cols() != n || es.vectors.rows() != n)
    throw std::invalid_argument("overlaps: dimension mismatch");
  OverlapTable t;
  t.a_exp = a_exp;
  t.window = short_range_halfwidth(static_cast<int>(n), a_exp);
  t.w = u * es.vectors;

  const MatrixR p = t.w.cwiseAbs2();
  // (S p)_{alpha j} = sum over |beta - alpha| <= window of p_{beta j},
  // via per-column prefix sums
  MatrixR sp(n, n);
  VectorR prefix(n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    prefix(0) = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + p(i, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - t.window);
      const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + t.window);
      sp(i, j) = prefix(hi + 1) - prefix(lo);
    }
  }
  t.gamma = p.transpose() * sp;
  return t;
}

}  // namespace boxplus
