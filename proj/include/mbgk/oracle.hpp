#pragma once

#include "mbgk/gst.hpp"
#include "mbgk/mixture.hpp"

namespace mbgk {

/// Primitive gas state for the gamma-law Riemann problem.
struct RiemannState {
  double rho = 0, u = 0, p = 0;
};

/// Star-region pressure of the Riemann problem (root of the pressure
/// function), found by a safeguarded bisection/Newton hybrid.
double sod_star_pressure(const RiemannState& left, const RiemannState& right,
                         double gamma);

/// Exact self-similar solution sampled at xi = x/t.
RiemannState sod_exact(const RiemannState& left, const RiemannState& right,
                       double gamma, double xi);

/// Reference solver for the backward-Euler moment system: damped Newton with
/// a finite-difference Jacobian on be_residual, with continuation in dt as a
/// fall-back. Independent of the GST iteration; used by tests.
MomentState newton_moments(const SpeciesSet& sp, const MomentState& state_n,
                           double dt, double eps);

}  // namespace mbgk
