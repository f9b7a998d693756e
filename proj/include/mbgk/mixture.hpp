#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mbgk {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Immutable per-species physical parameters plus the precomputed pair
/// prefactors of the hard-sphere collision model.
///
/// lambda_ij = c_lambda(i,j) * n_j * Psi_ij(T_i, T_j)
///
/// with Psi_ij = sqrt(T_i/m_i + T_j/m_j) the only state-dependent factor.
/// The exchange-matrix prefactors are stored per unit rho_i*rho_j so that a
/// single SpeciesSet serves every spatial cell:
///
///   A_ij = cA_unit(i,j) * rho_i*rho_j * Psi_ij
///   B_ij = cB_unit(i,j) * rho_i*rho_j * Psi_ij
class SpeciesSet {
public:
  SpeciesSet(std::vector<std::string> names, VectorXd mass, VectorXd diameter);
  SpeciesSet(VectorXd mass, VectorXd diameter);

  int count() const { return static_cast<int>(mass_.size()); }
  const std::string& name(int i) const { return names_[i]; }
  double mass(int i) const { return mass_(i); }
  double diameter(int i) const { return diam_(i); }
  const VectorXd& masses() const { return mass_; }
  const VectorXd& diameters() const { return diam_; }

  double mass_min() const { return mass_.minCoeff(); }
  double mass_max() const { return mass_.maxCoeff(); }

  double c_lambda(int i, int j) const { return c_lambda_(i, j); }
  double cA_unit(int i, int j) const { return cA_unit_(i, j); }
  double cB_unit(int i, int j) const { return cB_unit_(i, j); }

private:
  std::vector<std::string> names_;
  VectorXd mass_, diam_;
  MatrixXd c_lambda_, cA_unit_, cB_unit_;
};

/// Per-species moments (n_i, u_i, T_i) at one spatial point; the unknowns of
/// the implicit collision solve. Construction enforces n_i > 0 and T_i > 0.
class MomentState {
public:
  /// u has one row per species and `dim` columns (dim in {1,2,3}).
  MomentState(int dim, VectorXd n, MatrixXd u, VectorXd T);

  int dim() const { return dim_; }
  int count() const { return static_cast<int>(n_.size()); }
  const VectorXd& n() const { return n_; }
  const MatrixXd& u() const { return u_; }
  const VectorXd& T() const { return T_; }

  VectorXd rho(const SpeciesSet& sp) const;
  VectorXd s() const;  // s_i = |u_i|^2
  VectorXd energy(const SpeciesSet& sp) const;
  double total_energy(const SpeciesSet& sp) const;
  VectorXd total_momentum(const SpeciesSet& sp) const;  // length dim

private:
  int dim_;
  VectorXd n_;
  MatrixXd u_;
  VectorXd T_;
};

/// All pairwise interaction coefficients evaluated from one moment state.
struct PairwiseCoefficients {
  MatrixXd lambda;            // lambda_ij
  MatrixXd psi;               // Psi_ij
  MatrixXd alpha;             // rho_i lambda_ij / (rho_i lambda_ij + rho_j lambda_ji)
  MatrixXd beta;              // same with n in place of rho
  std::vector<MatrixXd> u_pair;  // u_pair[k](i,j) = k-th component of u_ij
  MatrixXd T_pair;            // T_ij
  MatrixXd A, B;              // exchange matrices (symmetric)
  VectorXd Ddiag, Fdiag;      // row sums of A resp. B
  MatrixXd S;                 // S_ij = |u_ij|^2
  // extrema over ordered pairs i != j (only entries of A/B that survive D-A, F-B)
  double A_min = 0, A_max = 0, B_min = 0, B_max = 0;
};

/// Hard-sphere collision frequency lambda_ij(n_j, T_i, T_j). Accepts T = 0
/// (limit value zero); negative temperature or non-positive density is a
/// domain error.
double hs_collision_frequency(const SpeciesSet& sp, int i, int j, double n_j,
                              double T_i, double T_j);

/// Psi_ij = sqrt(T_i/m_i + T_j/m_j), exposed separately for A/B assembly.
double hs_psi(const SpeciesSet& sp, int i, int j, double T_i, double T_j);

/// Mixture velocities u_ij and temperatures T_ij (plus lambda, alpha, beta).
PairwiseCoefficients mixture_moments(const SpeciesSet& sp, const MomentState& st);

/// Complete coefficient set: mixture_moments plus A, B, D, F, S and extrema.
PairwiseCoefficients interaction_matrices(const SpeciesSet& sp, const MomentState& st);

/// Bounds on the nonzero eigenvalues of Z = P^{-1/2}(D-A)P^{-1/2} and
/// Zhat = Q^{-1/2}(F-B)Q^{-1/2}. For N = 1 both matrices vanish and the
/// result is flagged degenerate with zero intervals.
struct SpectralBounds {
  double z_min = 0, z_max = 0;
  double zhat_min = 0, zhat_max = 0;
  bool degenerate = false;  // N == 1
};

SpectralBounds spectral_bounds(const SpeciesSet& sp, const MomentState& st);

/// Conserved mixture-wide equilibrium velocity and temperature.
VectorXd equilibrium_velocity(const SpeciesSet& sp, const MomentState& st);
double equilibrium_temperature(const SpeciesSet& sp, const MomentState& st);

}  // namespace mbgk
