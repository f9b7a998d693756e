#include "mbgk/gst.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "mbgk/errors.hpp"

namespace mbgk {

namespace {

// Symmetric Z = P^{-1/2}(D - A)P^{-1/2} with the diagonal of A cancelled
// analytically, so Z * P^{1/2} 1 = 0 holds to round-off.
MatrixXd weighted_laplacian(const MatrixXd& A, const VectorXd& w) {
  const int N = static_cast<int>(w.size());
  MatrixXd Z(N, N);
  for (int i = 0; i < N; ++i) {
    double row = 0.0;
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      row += A(i, j);
      Z(i, j) = -A(i, j) / std::sqrt(w(i) * w(j));
    }
    Z(i, i) = row / w(i);
  }
  return Z;
}

// Solve (I + c Z) X = RHS where Z annihilates the unit null vector v0.
// The null component passes through the inverse unchanged, so it is split
// off analytically and only the range part goes through the factorization.
// This keeps the conserved component exact even for c = dt/eps >> 1.
MatrixXd solve_shifted(const MatrixXd& Z, double c, const VectorXd& v0,
                       const MatrixXd& rhs) {
  MatrixXd sys = c * Z;
  sys.diagonal().array() += 1.0;
  Eigen::LLT<MatrixXd> llt(sys);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCategory::numeric, "GST linear solve: factorization failed");

  const Eigen::RowVectorXd null_coeff = v0.transpose() * rhs;
  const MatrixXd rhs_range = rhs - v0 * null_coeff;
  MatrixXd y = llt.solve(rhs_range);
  y -= v0 * (v0.transpose() * y);  // null part of y is exactly zero in theory
  return v0 * null_coeff + y;
}

VectorXd weighted_s(const VectorXd& rho, const MatrixXd& u) {
  return rho.cwiseProduct(u.rowwise().squaredNorm());
}

}  // namespace

void GstConfig::validate() const {
  if (max_iter < 1) throw_domain("GstConfig: max_iter must be >= 1");
  if (!(contraction_target > 0.0 && contraction_target < 1.0))
    throw_domain("GstConfig: contraction target must lie in (0,1)");
}

VectorXd be_residual(const SpeciesSet& sp, const MomentState& state_next,
                     const MomentState& state_n, double dt, double eps) {
  const int N = state_n.count();
  const int d = state_n.dim();
  if (state_next.count() != N || state_next.dim() != d)
    throw_contract("be_residual: state shape mismatch");
  if ((state_next.n() - state_n.n()).cwiseAbs().maxCoeff() != 0.0)
    throw_contract("be_residual: densities must be identical at both levels");

  const PairwiseCoefficients c = interaction_matrices(sp, state_next);
  const VectorXd rho = state_n.rho(sp);
  const VectorXd& n = state_n.n();
  const MatrixXd& u1 = state_next.u();
  const VectorXd& T1 = state_next.T();
  const VectorXd s1 = state_next.s();
  const VectorXd sn = state_n.s();
  const double r = dt / eps;

  VectorXd res(N * (d + 1));
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < d; ++k) {
      double exch = 0.0;
      for (int j = 0; j < N; ++j)
        if (j != i) exch += c.A(i, j) * (u1(j, k) - u1(i, k));
      res(i * d + k) = (u1(i, k) - state_n.u()(i, k)) - r / rho(i) * exch;
    }
  }
  for (int i = 0; i < N; ++i) {
    double exch = 0.0, source = 0.0;
    for (int j = 0; j < N; ++j) {
      if (j != i) exch += c.B(i, j) * (T1(j) - T1(i));
      source += c.B(i, j) * (sp.mass(j) * (s1(j) - c.S(i, j)) -
                             sp.mass(i) * (s1(i) - c.S(i, j)));
    }
    res(N * d + i) = (T1(i) - state_n.T()(i)) +
                     rho(i) / (d * n(i)) * (s1(i) - sn(i)) -
                     r / n(i) * exch - r / (d * n(i)) * source;
  }
  return res;
}

MatrixXd gst_velocity_step(const SpeciesSet& sp, const MomentState& state_n,
                           const PairwiseCoefficients& coeffs, double dt, double eps) {
  const VectorXd rho = state_n.rho(sp);
  const VectorXd sqrt_rho = rho.cwiseSqrt();
  const MatrixXd Z = weighted_laplacian(coeffs.A, rho);
  const VectorXd v0 = sqrt_rho / sqrt_rho.norm();

  const MatrixXd Wn = sqrt_rho.asDiagonal() * state_n.u();
  const MatrixXd Wnext = solve_shifted(Z, dt / eps, v0, Wn);
  return sqrt_rho.cwiseInverse().asDiagonal() * Wnext;
}

VectorXd gst_temperature_step(const SpeciesSet& sp, const MomentState& state_n,
                              const PairwiseCoefficients& coeffs,
                              const MatrixXd& u_next, double dt, double eps,
                              double* min_source) {
  const int N = state_n.count();
  const int d = state_n.dim();
  const VectorXd rho = state_n.rho(sp);
  const VectorXd& n = state_n.n();
  const VectorXd sqrt_n = n.cwiseSqrt();
  const VectorXd v0 = sqrt_n / sqrt_n.norm();
  const double r = dt / eps;

  const VectorXd s_next = u_next.rowwise().squaredNorm();
  const VectorXd s1 = weighted_s(rho, state_n.u()) - weighted_s(rho, u_next);

  // S^{l+1} from the new velocities and the iteration-invariant alpha weights.
  VectorXd s2 = VectorXd::Zero(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      double S_ij = 0.0;
      for (int k = 0; k < d; ++k) {
        const double uij =
            coeffs.alpha(i, j) * u_next(i, k) + coeffs.alpha(j, i) * u_next(j, k);
        S_ij += uij * uij;
      }
      s2(i) += coeffs.B(i, j) * (sp.mass(j) * (s_next(j) - S_ij) -
                                 sp.mass(i) * (s_next(i) - S_ij));
    }
  }

  if (min_source) {
    // Combined temperature source; provably nonnegative (tracked per species).
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
      const double src = sp.mass(i) / d * (state_n.s()(i) - s_next(i)) +
                         r / (d * n(i)) * s2(i);
      worst = std::min(worst, src);
    }
    *min_source = worst;
  }

  const MatrixXd Zhat = weighted_laplacian(coeffs.B, n);

  // The s^{(2)} contribution is orthogonal to Q^{1/2} 1 by symmetry of B;
  // removing its round-off null component keeps the dt/eps amplification
  // out of the conserved energy.
  VectorXd s2q = s2.cwiseQuotient(sqrt_n);
  s2q -= v0 * v0.dot(s2q);

  VectorXd rhs = sqrt_n.cwiseProduct(state_n.T());
  rhs += (1.0 / d) * s1.cwiseQuotient(sqrt_n);
  rhs += (r / d) * s2q;

  const VectorXd eta = solve_shifted(Zhat, r, v0, rhs);
  return eta.cwiseQuotient(sqrt_n);
}

std::pair<MomentState, GstReport> solve_moments(const SpeciesSet& sp,
                                                const MomentState& state_n,
                                                double dt, double eps,
                                                const GstConfig& cfg) {
  cfg.validate();
  if (!(dt > 0.0) || !(eps > 0.0))
    throw_domain("solve_moments: dt and eps must be positive");
  const int N = state_n.count();
  const int d = state_n.dim();

  GstReport report;
  report.min_temperature_source = 0.0;

  if (N == 1) {
    // Single species: collisions conserve all moments, the update is trivial.
    report.iterations = 1;
    report.converged = true;
    report.cauchy_norms = {0.0};
    report.x_norms = {0.0};
    report.tol_used = cfg.tol;
    return {state_n, report};
  }

  const VectorXd rho = state_n.rho(sp);
  const VectorXd sqrt_rho = rho.cwiseSqrt();
  const VectorXd sqrt_n = state_n.n().cwiseSqrt();
  const VectorXd v0 = sqrt_n / sqrt_n.norm();

  const double Wn_norm = (sqrt_rho.asDiagonal() * state_n.u()).norm();
  const double eta_n_norm = sqrt_n.cwiseProduct(state_n.T()).norm();
  const double tol =
      cfg.tol >= 0.0 ? cfg.tol : 1e-12 * (1.0 + Wn_norm + eta_n_norm);
  report.tol_used = tol;

  const VectorXd p_n = state_n.total_momentum(sp);
  const double e_n = state_n.total_energy(sp);
  double p_scale = 0.0;
  for (int i = 0; i < N; ++i)
    p_scale += rho(i) * (state_n.u().row(i).norm() +
                         std::sqrt(state_n.T()(i) / sp.mass(i)));

  // Componentwise velocity box and temperature floor of the n-level state.
  const VectorXd u_lo = state_n.u().colwise().minCoeff();
  const VectorXd u_hi = state_n.u().colwise().maxCoeff();
  const double T_min = state_n.T().minCoeff();
  const double box_tol = 1e-12 * std::max(1.0, state_n.u().cwiseAbs().maxCoeff());
  const double floor_tol = 1e-12 * std::max(1.0, T_min);

  MatrixXd U = state_n.u();
  VectorXd T = state_n.T();
  double worst_src = std::numeric_limits<double>::infinity();

  for (int sweep = 0; sweep < cfg.max_iter; ++sweep) {
    const MomentState iterate(d, state_n.n(), U, T);
    const PairwiseCoefficients coeffs = interaction_matrices(sp, iterate);

    const MatrixXd U_next = gst_velocity_step(sp, state_n, coeffs, dt, eps);
    double src = 0.0;
    const VectorXd T_next =
        gst_temperature_step(sp, state_n, coeffs, U_next, dt, eps, &src);
    worst_src = std::min(worst_src, src);

    if (cfg.enforce_bounds) {
      for (int i = 0; i < N; ++i) {
        for (int k = 0; k < d; ++k)
          if (U_next(i, k) < u_lo(k) - box_tol || U_next(i, k) > u_hi(k) + box_tol)
            throw_invariant("solve_moments: velocity iterate left the n-level box");
        if (T_next(i) < T_min - floor_tol)
          throw_invariant("solve_moments: temperature iterate fell below the floor");
      }
    }

    const MatrixXd dW = sqrt_rho.asDiagonal() * (U_next - U);
    const VectorXd deta = sqrt_n.cwiseProduct(T_next - T);
    const double dW_norm = dW.norm();
    const double deta_norm = deta.norm();
    const double deta_null = std::abs(v0.dot(deta));
    const double deta_range =
        std::sqrt(std::max(0.0, deta_norm * deta_norm - deta_null * deta_null));

    report.cauchy_norms.push_back(dW_norm + deta_norm);
    report.x_norms.push_back(dW_norm + deta_range + deta_null);

    U = U_next;
    T = T_next;
    ++report.iterations;

    const MomentState candidate(d, state_n.n(), U, T);
    const double p_drift =
        (candidate.total_momentum(sp) - p_n).cwiseAbs().maxCoeff() / p_scale;
    const double e_drift = std::abs(candidate.total_energy(sp) - e_n) / e_n;
    report.momentum_drift = std::max(report.momentum_drift, p_drift);
    report.energy_drift = std::max(report.energy_drift, e_drift);

    if (report.cauchy_norms.back() <= tol) {
      report.converged = true;
      break;
    }
  }

  report.final_norm = report.cauchy_norms.back();
  report.min_temperature_source = worst_src;
  return {MomentState(d, state_n.n(), U, T), report};
}

double ContractionBudget::contraction_bound(double dt_query) const {
  const double g = dt_query * eps / std::pow(eps + dt_query * z, 2);
  return C_X * g;
}

ContractionBudget contraction_budget(const SpeciesSet& sp, const MomentState& state_n,
                                     double dt, double eps) {
  const int N = state_n.count();
  const int d = state_n.dim();
  ContractionBudget c;
  c.dt = dt;
  c.eps = eps;
  c.T_min = state_n.T().minCoeff();
  if (!(c.T_min > 0.0))
    throw_domain("contraction_budget: requires strictly positive temperatures");

  if (N == 1) {
    // Z and Zhat vanish; the iteration is the identity and trivially contracts.
    c.Gamma_W = c.Gamma_eta = c.Gamma_X = dt / eps;
    c.gamma = c.gamma_hat = 1.0;
    return c;
  }

  const PairwiseCoefficients pc = interaction_matrices(sp, state_n);
  const VectorXd rho = state_n.rho(sp);
  const VectorXd& n = state_n.n();
  const double rho_min = rho.minCoeff(), rho_max = rho.maxCoeff();
  const double n_min = n.minCoeff();
  const double m_min = sp.mass_min(), m_max = sp.mass_max();
  const double sqrtN = std::sqrt(double(N));

  const SpectralBounds sb = spectral_bounds(sp, state_n);
  c.z_min = sb.z_min;
  c.zhat_min = sb.zhat_min;
  c.z = std::min(c.z_min, c.zhat_min);
  c.gamma = eps / (eps + dt * c.z_min);
  c.gamma_hat = eps / (eps + dt * c.zhat_min);
  c.Gamma_W = dt * eps / std::pow(eps + dt * c.z_min, 2);
  c.Gamma_eta = dt * eps / std::pow(eps + dt * c.zhat_min, 2);
  c.Gamma_X = dt * eps / std::pow(eps + dt * c.z, 2);

  c.b = 1.0 / std::sqrt(n.sum());
  c.W_norm = (rho.cwiseSqrt().asDiagonal() * state_n.u()).norm();
  c.u_max = state_n.u().cwiseAbs().colwise().maxCoeff().norm();

  double cA_max = 0.0, cB_max = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      cA_max = std::max(cA_max, sp.cA_unit(i, j) * rho(i) * rho(j));
      cB_max = std::max(cB_max, sp.cB_unit(i, j) * rho(i) * rho(j));
      c.alpha_max = std::max(c.alpha_max, pc.alpha(i, j));
    }

  const double lipschitz = std::sqrt(m_max) / (2.0 * std::sqrt(2.0) * m_min * std::sqrt(c.T_min));
  c.C_A = cA_max * lipschitz;
  c.C_B = cB_max * lipschitz;
  c.C_Z = 2.0 * (N + sqrtN) * c.C_A / (rho_min * std::sqrt(n_min));
  c.C_Zhat = 2.0 * (N + sqrtN) * c.C_B / std::pow(n_min, 1.5);
  c.C_W = c.C_Z * c.W_norm;
  c.C_s = 2.0 * std::sqrt(rho_max) * c.u_max * c.C_W;

  c.C_s2_0 = 8.0 * c.alpha_max * pc.B_max * c.u_max * m_max * sqrtN * (N - 1) *
             c.W_norm / std::sqrt(rho_min);
  c.C_s2_1 =
      6.0 * pc.B_max * c.u_max * m_max * N * (N - 1) * c.C_W / std::sqrt(rho_min);
  c.C_s2_2 = c.C_B * 16.0 * c.alpha_max * c.u_max * m_max * (N - 1) * c.W_norm /
             std::sqrt(rho_min);

  c.C_0 = (2.0 * c.b / d) * std::sqrt(rho_max) * c.u_max * sqrtN * c.C_W;
  const VectorXd sqrt_n = n.cwiseSqrt();
  const VectorXd eta_n = sqrt_n.cwiseProduct(state_n.T());
  const VectorXd sWq = weighted_s(rho, state_n.u()).cwiseQuotient(sqrt_n);
  c.C_1_1 = (eta_n + sWq / d).norm() * c.C_Zhat;
  c.C_2_1 = c.C_s / (d * std::sqrt(n_min));
  c.C_2_2 = c.u_max * c.u_max * rho.norm() * c.C_Zhat / (d * std::sqrt(n_min));
  // (1 - gamma_hat)/zhat_min <= 1/zhat_min keeps these independent of dt,eps.
  c.C_3_1 = c.C_s2_1 / (d * std::sqrt(n_min) * c.zhat_min);
  c.C_3_2 = c.C_s2_2 / (d * std::sqrt(n_min));
  c.C_3_3 = c.C_s2_0 * c.C_Zhat / (d * std::sqrt(n_min) * c.zhat_min);

  c.C_X = c.C_W + c.C_0 + c.C_1_1 + c.C_2_1 + c.C_2_2 + c.C_3_1 + c.C_3_2 + c.C_3_3;
  return c;
}

TimeStepSelection select_time_step(const ContractionBudget& budget, double dt0, double r) {
  if (!(dt0 > 0.0)) throw_domain("select_time_step: dt0 must be positive");
  if (!(r > 0.0 && r < 1.0)) throw_domain("select_time_step: r must lie in (0,1)");

  const double z = budget.z;
  const double CX = budget.C_X;
  const double eps = budget.eps;
  const auto q = [&](double t) {
    return r * z * z * t * t + (2.0 * r * z - CX) * eps * t + r * eps * eps;
  };

  TimeStepSelection sel;
  if (CX <= 0.0 || z <= 0.0 || CX <= 4.0 * r * z) {
    sel.tag = StepCase::always_contractive;
    sel.dt1 = dt0;
    sel.q_at_dt1 = q(dt0);
    return sel;
  }

  sel.roots_real = true;
  const double root = CX * std::sqrt(1.0 - 4.0 * r * z / CX);
  sel.dt_plus = eps * (CX - 2.0 * r * z + root) / (2.0 * r * z * z);
  // Product of the roots is eps^2/z^2; the small root stays accurate this way.
  sel.dt_minus = eps * eps / (z * z * sel.dt_plus);

  if (sel.dt_plus <= 0.0) {
    sel.tag = StepCase::roots_negative;
    sel.dt1 = dt0;
  } else if (sel.dt_minus < dt0 && dt0 < sel.dt_plus) {
    sel.tag = StepCase::shrunk;
    sel.dt1 = sel.dt_minus;
  } else {
    sel.tag = StepCase::outside_window;
    sel.dt1 = dt0;
  }
  sel.q_at_dt1 = q(sel.dt1);
  return sel;
}

}  // namespace mbgk
