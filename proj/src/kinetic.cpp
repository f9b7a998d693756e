#include "mbgk/kinetic.hpp"

#include <cmath>

#include "mbgk/errors.hpp"

namespace mbgk {

VelocityGrid::VelocityGrid(double v_min, double v_max, int n_points) {
  if (n_points < 2) throw_domain("VelocityGrid: need at least two points");
  if (!(v_max > v_min)) throw_domain("VelocityGrid: empty range");
  dv_ = (v_max - v_min) / (n_points - 1);
  v_.resize(n_points);
  for (int l = 0; l < n_points; ++l) v_(l) = v_min + l * dv_;
  if (max_abs() <= 0.0) throw_domain("VelocityGrid: max |v| must be positive");
}

bool VelocityGrid::symmetric() const {
  return std::abs(v_(0) + v_(size() - 1)) <= 1e-12 * max_abs();
}

VectorXd maxwellian_1d(double n, double u, double theta, const VelocityGrid& grid) {
  if (!(theta > 0.0)) throw_domain("maxwellian_1d: theta must be positive");
  if (!(n > 0.0)) throw_domain("maxwellian_1d: density must be positive");
  const double norm = n / std::sqrt(2.0 * M_PI * theta);
  return (norm * (-(grid.points().array() - u).square() / (2.0 * theta)).exp()).matrix();
}

ChuState ChuState::zeros(int species, int points, int cells) {
  ChuState st;
  st.g.assign(species, ArrayXXd::Zero(points, cells));
  st.h.assign(species, ArrayXXd::Zero(points, cells));
  return st;
}

MomentState cell_moments_from_chu(const SpeciesSet& sp, const ChuState& state,
                                  const VelocityGrid& grid, int cell) {
  const int N = state.species();
  const double w = grid.weight();
  const auto& v = grid.points().array();

  // Slab physics: the pair closes the full 3-D energy, so the moment state is
  // three-dimensional with zero transverse bulk velocity.
  VectorXd n(N), T(N);
  MatrixXd u = MatrixXd::Zero(N, 3);
  for (int i = 0; i < N; ++i) {
    const auto g = state.g[i].col(cell);
    const auto h = state.h[i].col(cell);
    const double ni = w * g.sum();
    if (!(ni > 0.0))
      throw Error(ErrorCategory::domain,
                  "moments_from_chu: nonpositive density for " + sp.name(i) +
                      " in cell " + std::to_string(cell));
    const double ui = w * (v * g).sum() / ni;
    const double e_par = w * ((v - ui).square() * g).sum();
    const double e_perp = w * h.sum();
    const double Ti = sp.mass(i) / (3.0 * ni) * (e_par + e_perp);
    if (!(Ti > 0.0))
      throw Error(ErrorCategory::domain,
                  "moments_from_chu: nonpositive temperature for " + sp.name(i) +
                      " in cell " + std::to_string(cell));
    n(i) = ni;
    u(i, 0) = ui;
    T(i) = Ti;
  }
  return MomentState(3, n, u, T);
}

std::vector<MomentState> moments_from_chu(const SpeciesSet& sp, const ChuState& state,
                                          const VelocityGrid& grid) {
  std::vector<MomentState> out;
  out.reserve(state.cells());
  for (int k = 0; k < state.cells(); ++k)
    out.push_back(cell_moments_from_chu(sp, state, grid, k));
  return out;
}

PairTargets chu_targets(const SpeciesSet& sp, const MomentState& cell_moments,
                        const PairwiseCoefficients& coeffs, const VelocityGrid& grid) {
  const int N = cell_moments.count();
  const int nv = grid.size();
  PairTargets t;
  t.G.assign(N, ArrayXXd(nv, N));
  t.H.assign(N, ArrayXXd(nv, N));
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double theta = coeffs.T_pair(i, j) / sp.mass(i);
      const VectorXd G =
          maxwellian_1d(cell_moments.n()(i), coeffs.u_pair[0](i, j), theta, grid);
      t.G[i].col(j) = G.array();
      t.H[i].col(j) = 2.0 * theta * G.array();
    }
  }
  return t;
}

void implicit_relax_cell(ChuState& state, int cell, const PairTargets& targets,
                         const MatrixXd& lambda, double dt_eff, double eps) {
  const int N = state.species();
  const double r = dt_eff / eps;
  for (int i = 0; i < N; ++i) {
    const double lam_row = lambda.row(i).sum();
    Eigen::ArrayXd gnum = state.g[i].col(cell);
    Eigen::ArrayXd hnum = state.h[i].col(cell);
    for (int j = 0; j < N; ++j) {
      gnum += r * lambda(i, j) * targets.G[i].col(j);
      hnum += r * lambda(i, j) * targets.H[i].col(j);
    }
    const double denom = 1.0 + r * lam_row;
    state.g[i].col(cell) = gnum / denom;
    state.h[i].col(cell) = hnum / denom;
  }
}

ChuState implicit_relax(const ChuState& state, const std::vector<PairTargets>& targets,
                        const std::vector<MatrixXd>& lambda, double dt_eff, double eps) {
  if (static_cast<int>(targets.size()) != state.cells() ||
      static_cast<int>(lambda.size()) != state.cells())
    throw_contract("implicit_relax: one target set and lambda matrix per cell required");
  ChuState out = state;
  for (int k = 0; k < state.cells(); ++k)
    implicit_relax_cell(out, k, targets[k], lambda[k], dt_eff, eps);
  return out;
}

}  // namespace mbgk
