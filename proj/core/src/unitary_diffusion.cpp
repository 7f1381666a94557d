#include "boxplus/unitary_diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace boxplus {

WeightTable build_weights(const std::vector<double>& y, double a_exp) {
  const int n = static_cast<int>(y.size());
  if (n < 2) throw std::invalid_argument("build_weights: need n >= 2");
  WeightTable w;
  w.n = n;
  w.a_exp = a_exp;
  w.window = a_exp >= 1.0 ? n - 1 : short_range_halfwidth(n, a_exp);
  w.sigma2 = MatrixR::Zero(n, n);
  w.a_diag = VectorR::Zero(n);
  w.haty = VectorR::Zero(n);
  const double cap = static_cast<double>(n) * n;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (b - a <= w.window) continue;
      const double d = y[a] - y[b];
      double s2 = d != 0.0 ? 1.0 / (d * d) : cap;
      if (s2 > cap) s2 = cap;
      if (d == 0.0 || 1.0 / (d * d) > cap) ++w.capped_pairs;
      w.sigma2(a, b) = s2;
      w.sigma2(b, a) = s2;
    }
  }
  for (int a = 0; a < n; ++a) {
    double acc = 0.0, acc_y = 0.0;
    for (int g = 0; g < n; ++g) {
      acc += w.sigma2(a, g);
      acc_y += w.sigma2(a, g) * (y[g] - y[a]);
    }
    w.a_diag(a) = acc / n;
    w.haty(a) = acc_y / n;
  }
  return w;
}

DiffusionState initial_diffusion_state(int n, int beta) {
  DiffusionState s;
  s.u = MatrixC::Identity(n, n);
  s.t = 0.0;
  s.beta = beta;
  s.unitarity_defect = 0.0;
  return s;
}

namespace {

MatrixC sample_weighted_increment(const WeightTable& w, double h, int beta, RngStream& rng) {
  const int n = w.n;
  MatrixC dw = MatrixC::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double s2 = w.sigma2(a, b);
      if (s2 == 0.0) continue;
      const double sd = std::sqrt(h * s2 / n);
      if (beta == 2) {
        const Cplx g = sd * rng.next_complex_gaussian();
        dw(a, b) = g;
        dw(b, a) = std::conj(g);
      } else {
        const double g = sd * rng.next_gaussian();
        dw(a, b) = g;
        dw(b, a) = -g;
      }
    }
  }
  return dw;
}

void retract(MatrixC& u, Retraction kind) {
  if (kind == Retraction::qr) {
    Eigen::HouseholderQR<MatrixC> qr(u);
    MatrixC q = qr.householderQ();
    const MatrixC r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const Cplx d = r(j, j);
      const double mag = std::abs(d);
      if (mag < 1e-300) throw std::runtime_error("diffusion_step: retraction rank loss");
      q.col(j) *= d / mag;
    }
    u = q;
  } else {
    Eigen::BDCSVD<MatrixC> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < 1e-300)
      throw std::runtime_error("diffusion_step: retraction rank loss");
    u = svd.matrixU() * svd.matrixV().adjoint();
  }
}

}  // namespace

void diffusion_step(DiffusionState& state, const WeightTable& w, double h, RngStream& rng,
                    MatrixC* dw_out, Retraction retraction) {
  if (!(h > 0.0)) throw std::invalid_argument("diffusion_step: need h > 0");
  const int n = w.n;
  if (state.u.rows() != n) throw std::invalid_argument("diffusion_step: dimension mismatch");
  MatrixC dw = sample_weighted_increment(w, h, state.beta, rng);

  MatrixC update;
  if (state.beta == 2) {
    update = Cplx(0.0, 1.0) * (dw * state.u);
  } else {
    update = dw * state.u;  // dw is already the antisymmetric generator increment
  }
  update.noalias() -= (0.5 * h) * w.a_diag.cast<Cplx>().asDiagonal() * state.u;
  state.u += update;
  retract(state.u, retraction);
  state.t += h;
  state.unitarity_defect = unitarity_defect_estimate(state.u);
  if (dw_out) *dw_out = std::move(dw);
}

double unitarity_defect_exact(const MatrixC& u) {
  return (u.adjoint() * u - MatrixC::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

double unitarity_defect_estimate(const MatrixC& u) {
  // column probes of U^*U - I; the exact defect is checked at recorded points
  const Eigen::Index n = u.cols();
  const Eigen::Index probes = std::min<Eigen::Index>(n, 8);
  double worst = 0.0;
  for (Eigen::Index p = 0; p < probes; ++p) {
    const Eigen::Index j = (p * std::max<Eigen::Index>(1, n / probes)) % n;
    VectorC col = u.adjoint() * (u * VectorC::Unit(n, j));
    col(j) -= 1.0;
    worst = std::max(worst, col.cwiseAbs().maxCoeff());
  }
  return worst;
}

TrajectoryResult trajectory(const EnsembleConfig& cfg, int steps, RngStream& rng,
                            int record_every, Retraction retraction) {
  if (steps < 1) throw std::invalid_argument("trajectory: need steps >= 1");
  const auto w = build_weights(cfg.y, cfg.a_exp);
  const double horizon = cfg.horizon();
  const double h = horizon / steps;

  TrajectoryResult res;
  DiffusionState state = initial_diffusion_state(cfg.n, cfg.beta);
  const MatrixC eye = MatrixC::Identity(cfg.n, cfg.n);
  // drift integral accumulates so M(t) = U(t) - I + int (1/2) A U ds
  MatrixC drift_integral = MatrixC::Zero(cfg.n, cfg.n);

  auto record = [&](void) {
    TrajectoryPoint p;
    p.t = state.t;
    p.unitarity_defect = unitarity_defect_exact(state.u);
    p.norm_u_minus_i = operator_norm(state.u - eye);
    p.norm_m = operator_norm(state.u - eye + drift_integral);
    res.samples.push_back(p);
    res.sup_norm_u_minus_i = std::max(res.sup_norm_u_minus_i, p.norm_u_minus_i);
  };

  record();
  for (int s = 0; s < steps; ++s) {
    drift_integral.noalias() += (0.5 * h) * w.a_diag.cast<Cplx>().asDiagonal() * state.u;
    diffusion_step(state, w, h, rng, nullptr, retraction);
    if ((s + 1) % record_every == 0 || s + 1 == steps) record();
    // sup over the full path, not only recorded samples
    if ((s + 1) % record_every != 0 && s + 1 != steps)
      res.sup_norm_u_minus_i =
          std::max(res.sup_norm_u_minus_i, operator_norm(state.u - eye, 12));
  }
  res.final_state = state;
  return res;
}

MatrixC hermitian_noise(const MatrixC& dw, const std::vector<double>& y, double a_exp, double h,
                        int beta, RngStream& rng) {
  const int n = static_cast<int>(y.size());
  if (dw.rows() != n || dw.cols() != n)
    throw std::invalid_argument("hermitian_noise: dimension mismatch");
  const int window = a_exp >= 1.0 ? n - 1 : short_range_halfwidth(n, a_exp);
  const double sqn = std::sqrt(static_cast<double>(n));
  MatrixC db = MatrixC::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    // diagonal is always short range
    db(a, a) = (beta == 2 ? std::sqrt(h) : std::sqrt(2.0 * h)) * rng.next_gaussian();
    for (int b = a + 1; b < n; ++b) {
      Cplx entry;
      const double dy = y[a] - y[b];
      if (b - a > window && dy != 0.0) {
        entry = beta == 2 ? Cplx(0.0, 1.0) * sqn * dy * dw(a, b) : sqn * dy * dw(a, b);
      } else {
        entry = beta == 2 ? std::sqrt(h) * rng.next_complex_gaussian()
                          : Cplx(std::sqrt(h) * rng.next_gaussian(), 0.0);
      }
      db(a, b) = entry;
      db(b, a) = std::conj(entry);
    }
  }
  return db;
}

VectorR rotated_diagonal(const MatrixC& db, const MatrixC& frame) {
  const MatrixC t = db * frame;
  VectorR out(frame.cols());
  for (Eigen::Index k = 0; k < frame.cols(); ++k)
    out(k) = frame.col(k).dot(t.col(k)).real();
  return out;
}

double operator_norm(const MatrixC& b, int iterations) {
  const Eigen::Index n = b.cols();
  if (n == 0) return 0.0;
  VectorC v = VectorC::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) += Cplx(0.0, 1e-3 * static_cast<double>(i % 7));
  v.normalize();
  double norm2 = 0.0;
  for (int it = 0; it < iterations; ++it) {
    VectorC w = b.adjoint() * (b * v);
    norm2 = w.norm();
    if (norm2 < 1e-300) return 0.0;
    v = w / norm2;
  }
  return std::sqrt(norm2);
}

}  // namespace boxplus
