#ifndef MSROM_DEIM_HPP
#define MSROM_DEIM_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "msrom/models.hpp"
#include "msrom/pod.hpp"

namespace msrom {

/// Empirical basis of a nonlinear snapshot matrix; same SVD machinery as the
/// state POD, typically truncated at a tighter tolerance.
inline PodBasis compute_deim(const Mat& nonlinear_snapshots, const PodRule& rule) {
  return compute_pod(nonlinear_snapshots, rule);
}

/// Interpolation points by column-pivoted QR of Phi^T: the first n_tilde
/// pivot columns of Phi^T (rows of Phi) make P^T Phi invertible by
/// construction.
inline std::vector<Index> qdeim_select(const Mat& phi) {
  const Index ntilde = phi.cols();
  if (ntilde < 1 || ntilde > phi.rows())
    throw std::invalid_argument("qdeim_select: need 1 <= n_tilde <= N");
  Eigen::ColPivHouseholderQR<Mat> qr(phi.transpose());
  if (qr.rank() < ntilde)
    throw std::runtime_error("qdeim_select: basis is rank deficient at column " +
                             std::to_string(qr.rank()));
  auto perm = qr.colsPermutation().indices();
  std::vector<Index> idx(ntilde);
  for (Index k = 0; k < ntilde; ++k) idx[k] = perm(k);
  return idx;
}

/// Precomputed DEIM interpolation: W = Phi (P^T Phi)^{-1}, its projection
/// V^T W onto the POD space, and the two constants of the energy-defect
/// bound. |I - Phi Phi^T| equals exactly 1 whenever n_tilde < N.
struct DeimOperator {
  Mat phi;
  std::vector<Index> indices;
  Mat W;
  Mat projected;  // V^T W
  double inv_norm = 0.0;         // |(P^T Phi)^{-1}|_2
  double complement_norm = 0.0;  // |I - Phi Phi^T|_2

  Index n_tilde() const { return phi.cols(); }

  // interpolation applied to a full vector: W P^T y
  Vec reconstruct(const Vec& y) const {
    Vec sampled(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) sampled(static_cast<Index>(i)) = y(indices[i]);
    return W * sampled;
  }
};

inline DeimOperator build_deim_operator(const Mat& phi, const std::vector<Index>& indices,
                                        const PodBasis& pod) {
  const Index ntilde = phi.cols();
  if (static_cast<Index>(indices.size()) != ntilde)
    throw std::invalid_argument("build_deim_operator: index count != basis size");
  std::unordered_set<Index> seen;
  for (Index i : indices) {
    if (i < 0 || i >= phi.rows())
      throw std::invalid_argument("build_deim_operator: index out of range");
    if (!seen.insert(i).second)
      throw std::invalid_argument("build_deim_operator: duplicate interpolation index");
  }
  if (pod.V.rows() != phi.rows())
    throw std::invalid_argument("build_deim_operator: POD and DEIM bases disagree on N");

  Mat pt_phi(ntilde, ntilde);
  for (Index k = 0; k < ntilde; ++k) pt_phi.row(k) = phi.row(indices[k]);

  Eigen::FullPivLU<Mat> lu(pt_phi);
  if (!lu.isInvertible())
    throw std::runtime_error("build_deim_operator: P^T Phi is singular");

  DeimOperator op;
  op.phi = phi;
  op.indices = indices;
  op.W = phi * lu.inverse();  // Phi (P^T Phi)^{-1}, n_tilde x n_tilde inverse
  op.projected = pod.V.transpose() * op.W;

  Eigen::JacobiSVD<Mat> svd(pt_phi);
  op.inv_norm = 1.0 / svd.singularValues().tail(1)(0);
  op.complement_norm = ntilde < phi.rows() ? 1.0 : 0.0;
  return op;
}

/// Nonlinear term evaluated only at the interpolation rows: for the nodewise
/// nonlinearities of all models here this needs just the selected rows of the
/// component bases, so no length-N quantity appears online.
struct SampledNonlinearity {
  int term = 0;
  std::vector<Mat> basis_rows;  // P^T V_c per component
  Vec coeff_rows;
  std::function<Vec(int, const Mat&, const Vec&)> term_eval;

  Vec operator()(const std::vector<Vec>& alphas) const {
    const Index rows = basis_rows.empty() ? 0 : basis_rows[0].rows();
    Mat comps(rows, static_cast<Index>(basis_rows.size()));
    for (size_t c = 0; c < basis_rows.size(); ++c)
      comps.col(static_cast<Index>(c)) = basis_rows[c] * alphas[c];
    return term_eval(term, comps, coeff_rows);
  }
};

inline SampledNonlinearity make_sampled_nonlinearity(const ModelSpec& model, int term,
                                                     const std::vector<PodBasis>& bases,
                                                     const std::vector<Index>& indices) {
  SampledNonlinearity s;
  s.term = term;
  s.term_eval = model.term_eval;
  const Index rows = static_cast<Index>(indices.size());
  for (const auto& b : bases) {
    Mat slice(rows, b.n());
    for (Index k = 0; k < rows; ++k) slice.row(k) = b.V.row(indices[k]);
    s.basis_rows.push_back(std::move(slice));
  }
  if (model.node_coeff.size() > 0) {
    s.coeff_rows.resize(rows);
    for (Index k = 0; k < rows; ++k) s.coeff_rows(k) = model.node_coeff(indices[k]);
  }
  return s;
}

}  // namespace msrom

#endif  // MSROM_DEIM_HPP
