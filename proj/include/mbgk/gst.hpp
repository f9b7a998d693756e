#pragma once

#include <utility>
#include <vector>

#include "mbgk/mixture.hpp"

namespace mbgk {

struct GstConfig {
  /// Absolute stopping tolerance on ||DW||_F + ||Deta||_2; a negative value
  /// selects the default 1e-12 * (1 + ||W^n||_F + ||eta^n||_2).
  double tol = -1.0;
  int max_iter = 100;
  /// Target contraction ratio r in (0,1) used when the caller falls back to
  /// select_time_step after a failed solve.
  double contraction_target = 0.9;
  /// Check the provable iterate bounds (velocity box, temperature floor) each
  /// sweep and fail hard on violation. Violations indicate a bug, not data.
  bool enforce_bounds = true;

  void validate() const;
};

struct GstReport {
  int iterations = 0;
  bool converged = false;
  double final_norm = 0.0;
  double tol_used = 0.0;
  /// Stopping norm ||D^l W||_F + ||D^l eta||_2 per sweep (first entry l=0->1).
  std::vector<double> cauchy_norms;
  /// Contraction norm |||D^l X||| = ||D^l W||_F + ||D^l eta_R||_2 + ||D^l eta_N||_2,
  /// the norm in which the contraction constants bound successive differences.
  std::vector<double> x_norms;
  double momentum_drift = 0.0;  // relative, worst over iterates
  double energy_drift = 0.0;    // relative, worst over iterates
  /// Most negative combined temperature source seen over all iterates/species
  /// (provably >= 0; tracked to observe round-off).
  double min_temperature_source = 0.0;
};

/// Every computable constant of the contraction analysis at one moment state,
/// plus the Gamma factors for a concrete (dt, eps). The C_* constants depend
/// only on the state; Gamma and gamma depend on dt and eps.
struct ContractionBudget {
  double dt = 0, eps = 0;
  double z_min = 0, zhat_min = 0, z = 0;  // z = min(z_min, zhat_min)
  double gamma = 0, gamma_hat = 0;        // eps/(eps + dt z_min), hatted
  double Gamma_W = 0, Gamma_eta = 0, Gamma_X = 0;
  double C_A = 0, C_B = 0;
  double C_Z = 0, C_Zhat = 0;
  double C_W = 0;
  double C_s = 0;
  double C_s2_0 = 0, C_s2_1 = 0, C_s2_2 = 0;
  double C_0 = 0, C_1_1 = 0, C_2_1 = 0, C_2_2 = 0;
  double C_3_1 = 0, C_3_2 = 0, C_3_3 = 0;
  double C_X = 0;
  // auxiliaries
  double b = 0;          // 1/||Q^{1/2} 1||_2
  double W_norm = 0;     // ||W^n||_F
  double u_max = 0;      // ||u_max^n||_2 (componentwise max magnitudes)
  double T_min = 0;
  double alpha_max = 0;  // max_{i != j} alpha_ij

  /// Contraction factor bound C_X * Gamma_X(dt) for an arbitrary step.
  double contraction_bound(double dt_query) const;
};

enum class StepCase {
  always_contractive,  // complex roots: Q_r >= 0 for every dt
  roots_negative,      // both roots real and negative: Q_r > 0 for dt > 0
  shrunk,              // dt0 inside (dt_-, dt_+): dt1 = dt_-
  outside_window,      // dt0 outside the open root interval: dt1 = dt0
};

struct TimeStepSelection {
  double dt1 = 0;
  StepCase tag = StepCase::always_contractive;
  bool roots_real = false;
  double dt_minus = 0, dt_plus = 0;  // valid when roots_real
  double q_at_dt1 = 0;               // Q_r(dt1), >= 0 up to round-off
};

/// Residual of the backward-Euler moment system at state_next, with
/// coefficients evaluated at state_next. Layout: N*d velocity rows
/// (species-major) followed by N temperature rows. Each velocity equation is
/// normalized by rho_i/dt and each temperature equation by d*n_i/dt, so the
/// zero set is unchanged and entries stay O(1) for O(1) states.
VectorXd be_residual(const SpeciesSet& sp, const MomentState& state_next,
                     const MomentState& state_n, double dt, double eps);

/// One velocity sweep: solve (I + (dt/eps) Z^l) W^{l+1} = W^n and map back.
/// coeffs must be assembled at the current iterate's temperatures.
MatrixXd gst_velocity_step(const SpeciesSet& sp, const MomentState& state_n,
                           const PairwiseCoefficients& coeffs, double dt, double eps);

/// One temperature sweep, given the freshly solved velocities U^{l+1}.
/// If min_source is non-null it receives the smallest combined temperature
/// source encountered (Appendix-level positivity diagnostic).
VectorXd gst_temperature_step(const SpeciesSet& sp, const MomentState& state_n,
                              const PairwiseCoefficients& coeffs,
                              const MatrixXd& u_next, double dt, double eps,
                              double* min_source = nullptr);

/// Full fixed-point solve of the backward-Euler moment system.
std::pair<MomentState, GstReport> solve_moments(const SpeciesSet& sp,
                                                const MomentState& state_n,
                                                double dt, double eps,
                                                const GstConfig& cfg);

/// All contraction constants at state_n. Requires T_min^n > 0.
ContractionBudget contraction_budget(const SpeciesSet& sp, const MomentState& state_n,
                                     double dt, double eps);

/// Largest certified time step dt1 <= dt0 with Q_r(dt1) >= 0, where
/// Q_r(dt) = r z^2 dt^2 + (2 r z - C_X) eps dt + r eps^2.
TimeStepSelection select_time_step(const ContractionBudget& budget, double dt0, double r);

}  // namespace mbgk
