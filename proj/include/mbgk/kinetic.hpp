#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mbgk/mixture.hpp"

namespace mbgk {

using Eigen::ArrayXXd;

/// Discrete velocity grid: N_v evenly spaced points spanning [v_min, v_max]
/// inclusive, with the mid-point quadrature weight w = dv for every point.
class VelocityGrid {
public:
  VelocityGrid(double v_min, double v_max, int n_points);

  int size() const { return static_cast<int>(v_.size()); }
  double dv() const { return dv_; }
  double weight() const { return dv_; }
  double point(int l) const { return v_(l); }
  const VectorXd& points() const { return v_; }
  double max_abs() const { return std::max(std::abs(v_(0)), std::abs(v_(size() - 1))); }

  /// True when the grid is mirror-symmetric about v = 0, i.e. -v_l is a grid
  /// point for every l (required by reflective walls).
  bool symmetric() const;
  /// Index of -v_l on a symmetric grid.
  int mirror(int l) const { return size() - 1 - l; }

private:
  VectorXd v_;
  double dv_;
};

/// 1-D Maxwellian n/(2 pi theta)^{1/2} exp(-(v-u)^2/(2 theta)) sampled on the
/// grid. theta <= 0 is a domain error.
VectorXd maxwellian_1d(double n, double u, double theta, const VelocityGrid& grid);

/// Chu-reduced kinetic state: per species, arrays g(v_l, x_k) and h(v_l, x_k)
/// of shape N_v x N_x (one column per spatial cell). Slab physics: transport
/// along the first velocity component, d_physics = 3 closed by the pair.
struct ChuState {
  std::vector<ArrayXXd> g, h;

  int species() const { return static_cast<int>(g.size()); }
  int cells() const { return g.empty() ? 0 : static_cast<int>(g[0].cols()); }
  int points() const { return g.empty() ? 0 : static_cast<int>(g[0].rows()); }

  static ChuState zeros(int species, int points, int cells);
};

/// Per-cell moments of the Chu pair:
///   n_i = sum g w,  n_i u_i = sum v g w,
///   (3 n_i / m_i) T_i = sum (v - u_i)^2 g w + sum h w.
/// Nonpositive density or temperature raises a diagnostic naming the cell.
std::vector<MomentState> moments_from_chu(const SpeciesSet& sp, const ChuState& state,
                                          const VelocityGrid& grid);

/// Moments of a single cell (column index) of the state.
MomentState cell_moments_from_chu(const SpeciesSet& sp, const ChuState& state,
                                  const VelocityGrid& grid, int cell);

/// Relaxation targets for one cell: G_ij = M^(1)(n_i, u_ij, T_ij/m_i) and
/// H_ij = 2 (T_ij/m_i) G_ij, stored with one N_v x N matrix per species i
/// (column j = partner).
struct PairTargets {
  std::vector<ArrayXXd> G, H;
};

PairTargets chu_targets(const SpeciesSet& sp, const MomentState& cell_moments,
                        const PairwiseCoefficients& coeffs, const VelocityGrid& grid);

/// Point-wise implicit relaxation on one cell:
///   g_new = (g + (dt_eff/eps) sum_j lambda_ij G_ij) / (1 + (dt_eff/eps) sum_j lambda_ij)
/// and identically for h with H. A convex combination: preserves nonnegativity.
void implicit_relax_cell(ChuState& state, int cell, const PairTargets& targets,
                         const MatrixXd& lambda, double dt_eff, double eps);

/// Whole-state relaxation given per-cell targets and frequency matrices.
ChuState implicit_relax(const ChuState& state, const std::vector<PairTargets>& targets,
                        const std::vector<MatrixXd>& lambda, double dt_eff, double eps);

}  // namespace mbgk
