#include "mbgk/transport.hpp"

#include <cmath>

#include "mbgk/errors.hpp"

namespace mbgk {

SpatialGrid::SpatialGrid(double x_min, double x_max, int n_cells, BoundaryKind boundary)
    : x_min_(x_min), x_max_(x_max), n_(n_cells), boundary_(boundary) {
  if (n_cells < 4) throw_domain("SpatialGrid: need at least 4 cells for the stencil");
  if (!(x_max > x_min)) throw_domain("SpatialGrid: empty range");
  dx_ = (x_max - x_min) / n_cells;
}

ArrayXXd apply_boundary(const ArrayXXd& f, const SpatialGrid& grid,
                        const VelocityGrid& vgrid) {
  const int nv = static_cast<int>(f.rows());
  const int nx = static_cast<int>(f.cols());
  ArrayXXd padded(nv, nx + 4);
  padded.middleCols(2, nx) = f;

  if (grid.boundary() == BoundaryKind::periodic) {
    padded.col(0) = f.col(nx - 2);
    padded.col(1) = f.col(nx - 1);
    padded.col(nx + 2) = f.col(0);
    padded.col(nx + 3) = f.col(1);
    return padded;
  }

  // Reflective wall: mirror in x and invert the transport velocity.
  if (!vgrid.symmetric())
    throw Error(ErrorCategory::config_validate,
                "reflective boundaries require a velocity grid symmetric about 0");
  for (int l = 0; l < nv; ++l) {
    const int lm = vgrid.mirror(l);
    padded(l, 1) = f(lm, 0);
    padded(l, 0) = f(lm, 1);
    padded(l, nx + 2) = f(lm, nx - 1);
    padded(l, nx + 3) = f(lm, nx - 2);
  }
  return padded;
}

namespace {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

ArrayXXd advect(const ArrayXXd& f, const SpatialGrid& grid, const VelocityGrid& vgrid) {
  const int nv = static_cast<int>(f.rows());
  const int nx = static_cast<int>(f.cols());
  const double dx = grid.dx();
  const ArrayXXd p = apply_boundary(f, grid, vgrid);

  ArrayXXd div(nv, nx);
  for (int l = 0; l < nv; ++l) {
    const double v = vgrid.point(l);
    // Interface values from minmod-limited linear reconstruction, upwinded on
    // the sign of v. Interface k+1/2 sits between padded columns k+2, k+3.
    double flux_left;
    {
      // interface at k = -1/2
      const int c = 1;  // padded index of cell -1
      double q;
      if (v >= 0.0) {
        const double s = minmod(p(l, c + 1) - p(l, c), p(l, c) - p(l, c - 1));
        q = p(l, c) + 0.5 * s;
      } else {
        const double s = minmod(p(l, c + 2) - p(l, c + 1), p(l, c + 1) - p(l, c));
        q = p(l, c + 1) - 0.5 * s;
      }
      flux_left = v * q;
    }
    for (int k = 0; k < nx; ++k) {
      const int c = k + 2;  // padded index of cell k; interface k+1/2
      double q;
      if (v >= 0.0) {
        const double s = minmod(p(l, c + 1) - p(l, c), p(l, c) - p(l, c - 1));
        q = p(l, c) + 0.5 * s;
      } else {
        const double s = minmod(p(l, c + 2) - p(l, c + 1), p(l, c + 1) - p(l, c));
        q = p(l, c + 1) - 0.5 * s;
      }
      const double flux_right = v * q;
      div(l, k) = -(flux_right - flux_left) / dx;
      flux_left = flux_right;
    }
  }
  return div;
}

}  // namespace mbgk
