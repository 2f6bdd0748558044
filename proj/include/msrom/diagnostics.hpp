#ifndef MSROM_DIAGNOSTICS_HPP
#define MSROM_DIAGNOSTICS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "msrom/fom.hpp"

namespace msrom {

/// Relative solution error |Zh - Ze|_F / |Ze|_F. Multi-component states are
/// stacked into the rows, one column per time level.
inline double e_sol(const Mat& numeric, const Mat& exact) {
  if (numeric.rows() != exact.rows() || numeric.cols() != exact.cols())
    throw std::invalid_argument("e_sol: shape mismatch");
  double ref = exact.norm();
  if (ref == 0.0) throw std::invalid_argument("e_sol: zero reference trajectory");
  return (numeric - exact).norm() / ref;
}

/// Column-by-column accumulator for trajectories too large to materialize.
class SolErrorAccum {
 public:
  void add(const Vec& numeric, const Vec& exact) {
    num_ += (numeric - exact).squaredNorm();
    den_ += exact.squaredNorm();
  }
  double value() const {
    if (den_ == 0.0) throw std::invalid_argument("e_sol: zero reference trajectory");
    return std::sqrt(num_ / den_);
  }

 private:
  double num_ = 0.0;
  double den_ = 0.0;
};

/// Relative shape error: min over the discrete time grid of
/// |z_final - z_exact(t_k)|^2 / |z_exact(T)|^2.
inline double e_shape(const Vec& z_final, const std::function<Vec(Index)>& exact_at_step,
                      Index nt) {
  Vec exact_T = exact_at_step(nt);
  double ref = exact_T.squaredNorm();
  if (ref == 0.0) throw std::invalid_argument("e_shape: zero reference state");
  double best = (z_final - exact_T).squaredNorm();
  for (Index k = 0; k < nt; ++k)
    best = std::min(best, (z_final - exact_at_step(k)).squaredNorm());
  return best / ref;
}

/// Relative energy error max_k |e^k - e^0| / |e^0|.
inline double e_energy(const EnergyTrace& trace) {
  if (trace.values.empty()) throw std::invalid_argument("e_energy: empty trace");
  const double e0 = trace.values.front();
  if (e0 == 0.0) throw std::invalid_argument("e_energy: zero initial energy");
  double worst = 0.0;
  for (double e : trace.values) worst = std::max(worst, std::abs(e - e0) / std::abs(e0));
  return worst;
}

struct ErrorReport {
  std::string model;
  std::string variant;  // FOM, P-ROM, PD-ROM
  Index n = 0;
  Index n_tilde = 0;
  double e_sol = 0.0;
  double e_shape = 0.0;
  double e_energy = 0.0;
  double wall_clock_s = 0.0;
  double speedup = 1.0;  // vs the FOM of the same case
};

}  // namespace msrom

#endif  // MSROM_DIAGNOSTICS_HPP
