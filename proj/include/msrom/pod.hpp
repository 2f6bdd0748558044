#ifndef MSROM_POD_HPP
#define MSROM_POD_HPP

#include <Eigen/Dense>

#include <iostream>
#include <stdexcept>

#include "msrom/diff_ops.hpp"

namespace msrom {

/// Mode-count rule: either all modes with sigma_i / sigma_1 >= tau (ties
/// retained), or a fixed count clamped to the numerical rank.
struct PodRule {
  double tau = -1.0;
  Index count = -1;

  static PodRule tolerance(double tau) {
    if (!(tau > 0.0) || tau >= 1.0)
      throw std::invalid_argument("PodRule::tolerance: need 0 < tau < 1");
    PodRule r;
    r.tau = tau;
    return r;
  }
  static PodRule fixed(Index n) {
    if (n < 1) throw std::invalid_argument("PodRule::fixed: need n >= 1");
    PodRule r;
    r.count = n;
    return r;
  }
};

/// Truncated left singular basis of a snapshot matrix. sigma keeps the full
/// singular-value sequence for decay plots; V the leading n columns.
struct PodBasis {
  Mat V;
  Vec sigma;
  double tau_used = -1.0;
  bool clamped = false;

  Index n() const { return V.cols(); }
};

// relative floor under which singular values count as numerically zero
inline constexpr double kPodRankTol = 1e-12;

inline PodBasis compute_pod(const Mat& snapshots, const PodRule& rule) {
  if (snapshots.size() == 0 || snapshots.norm() == 0.0)
    throw std::invalid_argument("compute_pod: zero snapshot matrix");

  Eigen::BDCSVD<Mat> svd(snapshots, Eigen::ComputeThinU);
  PodBasis basis;
  basis.sigma = svd.singularValues();

  const double s0 = basis.sigma(0);
  Index rank = 0;
  while (rank < basis.sigma.size() && basis.sigma(rank) > kPodRankTol * s0) ++rank;

  Index keep;
  if (rule.tau > 0.0) {
    keep = 0;
    while (keep < basis.sigma.size() && basis.sigma(keep) / s0 >= rule.tau) ++keep;
    basis.tau_used = rule.tau;
    if (keep > rank) keep = rank;
  } else {
    keep = rule.count;
    if (keep > rank) {
      std::cerr << "compute_pod: requested " << rule.count
                << " modes but the snapshots have numerical rank " << rank
                << "; clamping\n";
      basis.clamped = true;
      keep = rank;
    }
  }
  if (keep < 1) keep = 1;
  basis.V = svd.matrixU().leftCols(keep);
  return basis;
}

inline Vec project(const PodBasis& basis, const Vec& z) {
  if (z.size() != basis.V.rows())
    throw std::invalid_argument("project: state length does not match basis");
  return basis.V.transpose() * z;
}

inline Vec lift(const PodBasis& basis, const Vec& alpha) {
  if (alpha.size() != basis.V.cols())
    throw std::invalid_argument("lift: coefficient length does not match basis");
  return basis.V * alpha;
}

/// Dense congruence V^T D V: skewness survives the projection, and reduced
/// powers are taken of this matrix (never projections of powers of D).
inline Mat reduce_operator(const PodBasis& basis, const DiffOp& op) {
  if (op.size() != basis.V.rows())
    throw std::invalid_argument("reduce_operator: operator size does not match basis");
  return basis.V.transpose() * (op.matrix() * basis.V);
}

inline Mat cross_mass(const PodBasis& a, const PodBasis& b) {
  if (a.V.rows() != b.V.rows())
    throw std::invalid_argument("cross_mass: bases live on different grids");
  return a.V.transpose() * b.V;
}

}  // namespace msrom

#endif  // MSROM_POD_HPP
