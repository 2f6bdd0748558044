#ifndef MSROM_FOM_HPP
#define MSROM_FOM_HPP

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "msrom/avf.hpp"
#include "msrom/models.hpp"

namespace msrom {

/// Discrete states over the time grid, one column per t_k = k dt, components
/// blocked within each column. wall_clock_s covers the stepping loop only.
struct Trajectory {
  std::string model;
  double dt = 0.0;
  Mat states;
  double wall_clock_s = 0.0;

  Index steps() const { return states.cols() - 1; }
};

struct EnergyTrace {
  double dt = 0.0;
  std::vector<double> values;  // length steps + 1
};

struct SnapshotMatrix {
  Mat data;
  std::string provenance;
};

struct FomResult {
  Trajectory traj;
  EnergyTrace energy;
};

namespace detail {

inline Index step_count(double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (T < 0.0) throw std::invalid_argument("run: negative final time");
  double ratio = T / dt;
  Index n = static_cast<Index>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("run: T must be an integer multiple of dt");
  return n;
}

}  // namespace detail

class SteppingError : public std::runtime_error {
 public:
  SteppingError(Index step, const StepFailure& cause)
      : std::runtime_error("step " + std::to_string(step) + ": " + cause.what()),
        step_(step) {}
  Index step() const { return step_; }

 private:
  Index step_;
};

/// Full-order run from the model's exact initial data. Records every state
/// and the discrete global energy per step; the wall clock accumulates only
/// the time spent inside avf_step.
inline FomResult run_fom(const ModelSpec& model, const AvfConfig& cfg, double T) {
  const Index nt = detail::step_count(T, cfg.dt);
  ImplicitSkewSystem sys = full_system(model);
  StepWorkspace<SpMat> ws(sys, cfg);

  FomResult out;
  out.traj.model = model.name;
  out.traj.dt = cfg.dt;
  out.traj.states.resize(model.state_size(), nt + 1);
  out.energy.dt = cfg.dt;
  out.energy.values.reserve(nt + 1);

  Vec z = model.exact(0.0);
  out.traj.states.col(0) = z;
  out.energy.values.push_back(discrete_energy(model, z));

  using clock = std::chrono::steady_clock;
  double elapsed = 0.0;
  for (Index k = 0; k < nt; ++k) {
    auto t0 = clock::now();
    try {
      z = avf_step(sys, z, cfg, ws);
    } catch (const StepFailure& f) {
      throw SteppingError(k + 1, f);
    }
    elapsed += std::chrono::duration<double>(clock::now() - t0).count();
    out.traj.states.col(k + 1) = z;
    out.energy.values.push_back(discrete_energy(model, z));
  }
  out.traj.wall_clock_s = elapsed;
  return out;
}

/// Pure stepping run used for timing repetitions: no recording, no energy
/// evaluation, returns seconds spent in the loop.
inline double time_fom_stepping(const ModelSpec& model, const AvfConfig& cfg, double T) {
  const Index nt = detail::step_count(T, cfg.dt);
  ImplicitSkewSystem sys = full_system(model);
  StepWorkspace<SpMat> ws(sys, cfg);
  Vec z = model.exact(0.0);
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  for (Index k = 0; k < nt; ++k) z = avf_step(sys, z, cfg, ws);
  return std::chrono::duration<double>(clock::now() - t0).count();
}

/// Derivative-augmented state snapshots, one matrix per reduced component.
/// Columns run over t_1..t_Nt for each block of the model's recipe, e.g.
/// KdV: [u^1..u^Nt | gamma D u^1..gamma D u^Nt].
inline std::vector<SnapshotMatrix> assemble_snapshots(const Trajectory& traj,
                                                      const ModelSpec& model) {
  const Index nt = traj.steps();
  if (nt < 1) throw std::invalid_argument("assemble_snapshots: empty trajectory");
  if (traj.states.rows() != model.state_size())
    throw std::invalid_argument("assemble_snapshots: trajectory does not match model");
  const Index n = model.n_nodes();

  std::vector<SnapshotMatrix> out;
  for (int c = 0; c < model.components; ++c) {
    const auto& recipe = model.snapshot_recipe[c];
    SnapshotMatrix snap;
    snap.data.resize(n, static_cast<Index>(recipe.size()) * nt);
    snap.provenance = model.name + " component " + std::to_string(c);
    for (size_t b = 0; b < recipe.size(); ++b) {
      for (Index k = 1; k <= nt; ++k) {
        Vec col = traj.states.col(k).segment(c * n, n);
        if (recipe[b].op >= 0) col = model.ops[recipe[b].op].apply(col);
        snap.data.col(static_cast<Index>(b) * nt + (k - 1)) = recipe[b].scale * col;
      }
    }
    out.push_back(std::move(snap));
  }
  return out;
}

/// Nonlinear-term snapshots, one matrix per term, columns f(z^k), k = 1..Nt.
inline std::vector<SnapshotMatrix> collect_nonlinear_snapshots(const Trajectory& traj,
                                                               const ModelSpec& model) {
  const Index nt = traj.steps();
  if (nt < 1) throw std::invalid_argument("collect_nonlinear_snapshots: empty trajectory");
  if (traj.states.rows() != model.state_size())
    throw std::invalid_argument("collect_nonlinear_snapshots: trajectory does not match model");
  const Index n = model.n_nodes();

  std::vector<SnapshotMatrix> out(model.terms);
  for (int t = 0; t < model.terms; ++t) {
    out[t].data.resize(n, nt);
    out[t].provenance = model.name + " nonlinear term " + std::to_string(t);
  }
  for (Index k = 1; k <= nt; ++k) {
    Mat comps = model.components_of(traj.states.col(k));
    for (int t = 0; t < model.terms; ++t)
      out[t].data.col(k - 1) = model.term_eval(t, comps, model.node_coeff);
  }
  return out;
}

}  // namespace msrom

#endif  // MSROM_FOM_HPP
