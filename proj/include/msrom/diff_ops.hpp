#ifndef MSROM_DIFF_OPS_HPP
#define MSROM_DIFF_OPS_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <utility>
#include <vector>

#include "msrom/grid.hpp"

namespace msrom {

using SpMat = Eigen::SparseMatrix<double>;

/// Skew-symmetric periodic centered-difference operator.
///
/// 1D: the circulant matrix with +-1/(2 dx) on the off-diagonals and the two
/// wrap-around corner entries. 2D operators are Kronecker products of the 1D
/// stencil with identities (x index fastest), built by build_2d_diffs.
/// Stored sparse; never materialized dense by the library itself.
class DiffOp {
 public:
  DiffOp() = default;
  explicit DiffOp(SpMat m) : m_(std::move(m)) { m_.makeCompressed(); }

  Index size() const { return m_.rows(); }
  const SpMat& matrix() const { return m_; }

  Vec apply(const Vec& v) const {
    if (v.size() != m_.rows())
      throw std::invalid_argument("DiffOp::apply: length mismatch");
    return m_ * v;
  }

 private:
  SpMat m_;
};

namespace detail {

// Sparse Kronecker product, row/col = (i_a * rows_b + i_b, ...).
inline SpMat kron(const SpMat& a, const SpMat& b) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(a.nonZeros()) * static_cast<size_t>(b.nonZeros()));
  for (Index ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
      for (Index kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(),
                             ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

inline SpMat sparse_identity(Index n) {
  SpMat id(n, n);
  id.setIdentity();
  return id;
}

// Unscaled circulant stencil D_N: +1 above the diagonal, -1 below, corners
// D_N(0, N-1) = -1 and D_N(N-1, 0) = +1.
inline SpMat circulant_stencil(Index n) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(2 * n));
  for (Index i = 0; i < n; ++i) {
    trips.emplace_back(i, (i + 1) % n, 1.0);
    trips.emplace_back(i, (i + n - 1) % n, -1.0);
  }
  SpMat d(n, n);
  d.setFromTriplets(trips.begin(), trips.end());
  return d;
}

}  // namespace detail

/// D = (1/(2 dx)) D_N. Exactly skew-symmetric, two nonzeros per row, and
/// D * (constant vector) = 0 without rounding because the stencil entries
/// cancel pairwise.
inline DiffOp build_centered_diff(Index n, double dx) {
  if (n < 3)
    throw std::invalid_argument(
        "build_centered_diff: need n >= 3, the periodic stencil overlaps itself");
  if (!(dx > 0.0)) throw std::invalid_argument("build_centered_diff: dx must be positive");
  return DiffOp((1.0 / (2.0 * dx)) * detail::circulant_stencil(n));
}

/// Dx = I_{ny} (x) (1/(2 dx)) D_{nx},  Dy = (1/(2 dy)) D_{ny} (x) I_{nx}.
/// Both act on vectors in x-fastest lexicographic node order.
inline std::pair<DiffOp, DiffOp> build_2d_diffs(const Grid& grid) {
  if (grid.dims != 2)
    throw std::invalid_argument("build_2d_diffs: grid is not two-dimensional");
  if (grid.nx < 3 || grid.ny < 3)
    throw std::invalid_argument("build_2d_diffs: need at least 3 nodes per direction");
  SpMat dnx = (1.0 / (2.0 * grid.dx())) * detail::circulant_stencil(grid.nx);
  SpMat dny = (1.0 / (2.0 * grid.dy())) * detail::circulant_stencil(grid.ny);
  DiffOp dx_op(detail::kron(detail::sparse_identity(grid.ny), dnx));
  DiffOp dy_op(detail::kron(dny, detail::sparse_identity(grid.nx)));
  return {std::move(dx_op), std::move(dy_op)};
}

}  // namespace msrom

#endif  // MSROM_DIFF_OPS_HPP
