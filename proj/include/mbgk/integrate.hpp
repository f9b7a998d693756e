#pragma once

#include <vector>

#include "mbgk/gst.hpp"
#include "mbgk/kinetic.hpp"
#include "mbgk/transport.hpp"

namespace mbgk {

/// Butcher tableaux of a diagonally implicit IMEX Runge-Kutta scheme. Row s
/// of a_expl feeds transport terms, row s of a_impl feeds collision terms.
struct ImexTableau {
  MatrixXd a_impl, a_expl;
  VectorXd b_impl, b_expl;

  int stages() const { return static_cast<int>(b_impl.size()); }

  /// The two-stage, second-order scheme with implicit diagonal
  /// gamma = 1 - 1/sqrt(2) (plus the conventional explicit first stage).
  static ImexTableau ars222();

  /// Max violation of the structural and order-2 conditions: lower-triangular
  /// shape, sum b = 1 for both tableaux, matching abscissae, b.c = 1/2.
  double consistency_error() const;
};

/// CFL-type step limits. The advection limit applies to the IMEX scheme; the
/// explicit scheme additionally pays for the stiff collision term through
/// Lambda = max_i max_cells sum_j lambda_ij.
struct StepControl {
  double safety = 0.9;

  static double imex_limit(const SpatialGrid& grid, const VelocityGrid& vgrid);
  static double explicit_limit(double eps, const SpatialGrid& grid,
                               const VelocityGrid& vgrid, double lambda_max);
};

/// Lambda^n: largest total collision frequency over species and cells.
double max_total_frequency(const SpeciesSet& sp, const std::vector<MomentState>& moments);

struct StepDiagnostics {
  int max_gst_iterations = 0;
  long total_gst_iterations = 0;
  double max_momentum_drift = 0.0;  // worst per-stage moment-solve drift
  double max_energy_drift = 0.0;
  double min_temperature_source = 0.0;
  bool retried = false;
  double dt_used = 0.0;
};

/// One IMEX step. May retry once with a certified smaller step if any cell's
/// moment solve fails to converge; the step actually taken is reported in the
/// diagnostics. Throws on a second failure.
StepDiagnostics imex_step(ChuState& state, double dt, double eps,
                          const ImexTableau& tableau, const SpatialGrid& grid,
                          const VelocityGrid& vgrid, const SpeciesSet& sp,
                          const GstConfig& cfg, int threads);

/// One fully explicit SSP RK2 step (caller enforces the stiff CFL).
StepDiagnostics explicit_step(ChuState& state, double dt, double eps,
                              const SpatialGrid& grid, const VelocityGrid& vgrid,
                              const SpeciesSet& sp, int threads);

}  // namespace mbgk
