#pragma once

#include <Eigen/Dense>

#include "mbgk/kinetic.hpp"

namespace mbgk {

enum class BoundaryKind { periodic, reflective };

/// Uniform finite-volume grid of N_x cells on [x_min, x_max].
class SpatialGrid {
public:
  SpatialGrid(double x_min, double x_max, int n_cells, BoundaryKind boundary);

  int cells() const { return n_; }
  double dx() const { return dx_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double center(int k) const { return x_min_ + (k + 0.5) * dx_; }
  BoundaryKind boundary() const { return boundary_; }

private:
  double x_min_, x_max_, dx_;
  int n_;
  BoundaryKind boundary_;
};

/// Pads a field (N_v x N_x) with two ghost cells on each side according to
/// the grid's boundary kind. Periodic: wraparound copy. Reflective: mirror in
/// x with v -> -v (requires a symmetric velocity grid).
ArrayXXd apply_boundary(const ArrayXXd& f, const SpatialGrid& grid,
                        const VelocityGrid& vgrid);

/// Second-order upwind finite-volume divergence -v df/dx with minmod-limited
/// linear reconstruction. Returns one value per (velocity point, cell).
ArrayXXd advect(const ArrayXXd& f, const SpatialGrid& grid, const VelocityGrid& vgrid);

}  // namespace mbgk
