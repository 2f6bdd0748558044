#ifndef MSROM_GRID_HPP
#define MSROM_GRID_HPP

#include <Eigen/Core>

#include <stdexcept>

namespace msrom {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Uniform periodic grid in one or two space dimensions.
///
/// Nodes of a 2D grid are ordered lexicographically with the x index running
/// fastest: node j sits at (x_lo + (j % nx) dx, y_lo + (j / nx) dy). Node nx
/// coincides with node 0 under periodicity, so only nx (resp. nx*ny) nodes
/// are stored.
struct Grid {
  int dims = 1;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  Index nx = 0;
  Index ny = 1;

  double dx() const { return (x_hi - x_lo) / static_cast<double>(nx); }
  double dy() const { return (y_hi - y_lo) / static_cast<double>(ny); }

  Index nodes() const { return dims == 1 ? nx : nx * ny; }

  // dx in 1D, dx*dy in 2D; the weight of one node in the discrete integrals
  double cell_volume() const { return dims == 1 ? dx() : dx() * dy(); }

  double x(Index j) const {
    return x_lo + static_cast<double>(dims == 1 ? j : j % nx) * dx();
  }
  double y(Index j) const {
    return dims == 1 ? 0.0 : y_lo + static_cast<double>(j / nx) * dy();
  }

  static Grid line(double lo, double hi, Index n) {
    if (n < 3) throw std::invalid_argument("Grid::line: need at least 3 nodes");
    if (!(hi > lo)) throw std::invalid_argument("Grid::line: empty interval");
    Grid g;
    g.dims = 1;
    g.x_lo = lo;
    g.x_hi = hi;
    g.nx = n;
    g.ny = 1;
    return g;
  }

  static Grid rect(double xlo, double xhi, Index nx, double ylo, double yhi,
                   Index ny) {
    if (nx < 3 || ny < 3)
      throw std::invalid_argument("Grid::rect: need at least 3 nodes per direction");
    if (!(xhi > xlo) || !(yhi > ylo))
      throw std::invalid_argument("Grid::rect: empty domain");
    Grid g;
    g.dims = 2;
    g.x_lo = xlo;
    g.x_hi = xhi;
    g.y_lo = ylo;
    g.y_hi = yhi;
    g.nx = nx;
    g.ny = ny;
    return g;
  }
};

}  // namespace msrom

#endif  // MSROM_GRID_HPP
