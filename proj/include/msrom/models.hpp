#ifndef MSROM_MODELS_HPP
#define MSROM_MODELS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msrom/avf.hpp"
#include "msrom/diff_ops.hpp"
#include "msrom/grid.hpp"

namespace msrom {

// result in [0, p) for any sign of a, so sech arguments stay continuous
// across the periodic wrap
inline double mod_pos(double a, double p) {
  double r = std::fmod(a, p);
  return r < 0.0 ? r + p : r;
}

/// One quadratic derivative term of a discrete energy:
/// coeff * | ops[op] applied to component comp |^2.
struct QuadEnergyTerm {
  int op;
  int comp;
  double coeff;
};

struct ReducedLinearParts {
  Mat C, A, B;
};

/// One benchmark PDE in its eliminated multi-symplectic form
///   C d_t z + A A_t z = B * avg of N(z),
/// together with its exact solution, nonlinearity, discrete global energy,
/// and the recipes the reduction stage needs (snapshot blocks and the
/// structure-preserving reduced operator assembly).
///
/// States are stored component-blocked: z = u for KdV/ZK, z = (p; q) for the
/// NLS models, each block holding all grid nodes of one component.
struct ModelSpec {
  std::string name;
  Grid grid;
  int components = 1;  // solved state components after elimination
  int terms = 1;       // nonlinear terms (f, or f and g)

  // model parameters; unused entries stay zero
  double eta = 0.0;    // KdV convection strength
  double gamma = 0.0;  // KdV dispersion
  double beta = 0.0;   // NLS focusing strength
  double mu = 0.0;     // 2D NLS dispersion
  double speed = 0.0;  // soliton speed c
  double period = 0.0; // spatial period P

  std::vector<DiffOp> ops;  // 1D: {D}; 2D: {Dx, Dy}
  Vec node_coeff;           // per-node coefficient in the nonlinearity (2D NLS R1)

  // exact solution on the grid at time t, component blocks stacked
  std::function<Vec(double)> exact;

  // nonlinear term evaluated row-wise; comps has one column per component,
  // coeff carries the matching rows of node_coeff and may be empty
  std::function<Vec(int term, const Mat& comps, const Vec& coeff)> term_eval;

  // nodal potential whose componentwise gradient is the stacked terms
  std::function<Vec(const Mat& comps, const Vec& coeff)> nl_potential;

  // discrete global energy = vol * sum(energy_density) + quadratic terms
  std::function<Vec(const Mat& comps, const Vec& coeff)> energy_density;
  std::vector<QuadEnergyTerm> energy_quad;
  double vol = 0.0;

  // snapshot recipe per reduced component: list of (op, scale) column blocks,
  // op = -1 meaning the state itself
  struct SnapshotBlock {
    int op;
    double scale;
  };
  std::vector<std::vector<SnapshotBlock>> snapshot_recipe;

  // the per-node quantity the error tables compare: the state itself for the
  // real models, the modulus sqrt(p^2+q^2) for the complex pair models
  std::function<Vec(const Vec&)> error_view;

  ImplicitSkewSystem system;

  // assemble the dense reduced (C, A, B) from the reduced difference
  // operators dhat[op][comp] = V_comp^T ops[op] V_comp and the basis
  // matrices themselves (for the NLS cross-mass blocks)
  std::function<ReducedLinearParts(const std::vector<std::vector<Mat>>& dhat,
                                   const std::vector<Mat>& bases)>
      reduce_linear;

  Index n_nodes() const { return grid.nodes(); }
  Index state_size() const { return static_cast<Index>(components) * grid.nodes(); }

  Mat components_of(const Vec& state) const {
    if (state.size() != state_size())
      throw std::invalid_argument("ModelSpec: state length does not match layout");
    const Index n = n_nodes();
    Mat comps(n, components);
    for (int c = 0; c < components; ++c) comps.col(c) = state.segment(c * n, n);
    return comps;
  }

  // stacked nonlinear terms, the N(z) fed to the AVF average
  Vec nonlinearity(const Vec& state) const {
    const Mat comps = components_of(state);
    Vec out(static_cast<Index>(terms) * n_nodes());
    for (int t = 0; t < terms; ++t)
      out.segment(t * n_nodes(), n_nodes()) = term_eval(t, comps, node_coeff);
    return out;
  }
};

inline double discrete_energy(const ModelSpec& model, const Vec& state) {
  const Mat comps = model.components_of(state);
  double e = model.vol * model.energy_density(comps, model.node_coeff).sum();
  for (const auto& qt : model.energy_quad)
    e += qt.coeff * model.ops[qt.op].apply(comps.col(qt.comp)).squaredNorm();
  return e;
}

namespace detail {

inline std::function<Vec(const Vec&)> identity_view() {
  return [](const Vec& z) { return z; };
}

inline std::function<Vec(const Vec&)> modulus_view(Index n) {
  return [n](const Vec& z) {
    return Vec((z.head(n).array().square() + z.tail(n).array().square()).sqrt());
  };
}

inline SpMat blkdiag2(const SpMat& a, const SpMat& b) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(a.nonZeros() + b.nonZeros()));
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (Index k = 0; k < b.outerSize(); ++k)
    for (SpMat::InnerIterator it(b, k); it; ++it)
      trips.emplace_back(a.rows() + it.row(), a.cols() + it.col(), it.value());
  SpMat out(a.rows() + b.rows(), a.cols() + b.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// [[0, I], [-I, 0]] of size 2n: the rotation coupling of the split
// real/imaginary NLS time derivative
inline SpMat rotation_coupling(Index n) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(2 * n));
  for (Index i = 0; i < n; ++i) {
    trips.emplace_back(i, n + i, 1.0);
    trips.emplace_back(n + i, i, -1.0);
  }
  SpMat out(2 * n, 2 * n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

inline Mat dense_rotation_coupling(const Mat& m12) {
  const Index n1 = m12.rows(), n2 = m12.cols();
  Mat c = Mat::Zero(n1 + n2, n1 + n2);
  c.topRightCorner(n1, n2) = m12;
  c.bottomLeftCorner(n2, n1) = -m12.transpose();
  return c;
}

inline Mat dense_blkdiag2(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace detail

/// KdV  u_t + eta u u_x + gamma^2 u_xxx = 0  on the P-periodic line, solved
/// for u only:  d_t u + gamma^2 D^3 A_t u = -D avg(f),  f(u) = eta u^2 / 2.
inline ModelSpec kdv_model(double eta, double gamma, double c, double P,
                           const Grid& grid) {
  if (grid.dims != 1) throw std::invalid_argument("kdv_model: needs a 1D grid");
  if (gamma == 0.0) throw std::invalid_argument("kdv_model: gamma must be nonzero");
  if (std::abs((grid.x_hi - grid.x_lo) - P) > 1e-12 * std::abs(P))
    throw std::invalid_argument("kdv_model: grid does not span one period [0, P]");

  ModelSpec m;
  m.name = "kdv";
  m.grid = grid;
  m.components = 1;
  m.terms = 1;
  m.eta = eta;
  m.gamma = gamma;
  m.speed = c;
  m.period = P;
  m.vol = grid.dx();

  const Index n = grid.nodes();
  m.ops.push_back(build_centered_diff(n, grid.dx()));
  const SpMat& d = m.ops[0].matrix();

  m.exact = [grid, c, P](double t) {
    Vec u(grid.nodes());
    for (Index j = 0; j < grid.nodes(); ++j) {
      double xi = mod_pos(-grid.x(j) + c * t, P);
      double s = 1.0 / std::cosh(xi - 0.5 * P);
      u(j) = 0.5 * c * s * s;
    }
    return u;
  };

  m.term_eval = [eta](int, const Mat& comps, const Vec&) -> Vec {
    return 0.5 * eta * comps.col(0).array().square();
  };
  m.nl_potential = [eta](const Mat& comps, const Vec&) -> Vec {
    return (eta / 6.0) * comps.col(0).array().cube();
  };
  m.energy_density = m.nl_potential;
  m.energy_quad = {{0, 0, -0.5 * gamma * gamma * m.vol}};
  m.snapshot_recipe = {{{-1, 1.0}, {0, gamma}}};
  m.error_view = detail::identity_view();

  m.system.C = detail::sparse_identity(n);
  m.system.A = (gamma * gamma) * SpMat(d * d * d);
  m.system.B = SpMat(-d);

  m.reduce_linear = [gamma](const std::vector<std::vector<Mat>>& dhat,
                            const std::vector<Mat>&) {
    const Mat& dh = dhat[0][0];
    ReducedLinearParts p;
    p.C = Mat::Identity(dh.rows(), dh.cols());
    p.A = (gamma * gamma) * (dh * dh * dh);
    p.B = -dh;
    return p;
  };
  return m;
}

/// Focusing 1D NLS  i psi_t + psi_xx + beta |psi|^2 psi = 0 split into
/// psi = p + i q and solved for (p; q):
///   d_t q - D^2 A_t p = avg(f),  -d_t p - D^2 A_t q = avg(g),
/// f = beta (p^2+q^2) p, g = beta (p^2+q^2) q.
inline ModelSpec nls1d_model(double beta, const Grid& grid) {
  if (grid.dims != 1) throw std::invalid_argument("nls1d_model: needs a 1D grid");
  if (!(beta > 0.0))
    throw std::invalid_argument("nls1d_model: beta must be positive (focusing case)");

  ModelSpec m;
  m.name = "nls1d";
  m.grid = grid;
  m.components = 2;
  m.terms = 2;
  m.beta = beta;
  m.vol = grid.dx();

  const Index n = grid.nodes();
  m.ops.push_back(build_centered_diff(n, grid.dx()));
  const SpMat& d = m.ops[0].matrix();

  m.exact = [grid](double t) {
    Vec z(2 * grid.nodes());
    for (Index j = 0; j < grid.nodes(); ++j) {
      double x = grid.x(j);
      double env = 1.0 / std::cosh(x - 2.0 * t);
      z(j) = env * std::cos(x);
      z(grid.nodes() + j) = env * std::sin(x);
    }
    return z;
  };

  m.term_eval = [beta](int term, const Mat& comps, const Vec&) -> Vec {
    Eigen::ArrayXd s =
        comps.col(0).array().square() + comps.col(1).array().square();
    return beta * s * comps.col(term).array();
  };
  m.nl_potential = [beta](const Mat& comps, const Vec&) -> Vec {
    Eigen::ArrayXd s =
        comps.col(0).array().square() + comps.col(1).array().square();
    return 0.25 * beta * s.square();
  };
  m.energy_density = m.nl_potential;
  m.energy_quad = {{0, 0, -0.5 * m.vol}, {0, 1, -0.5 * m.vol}};
  m.snapshot_recipe = {{{-1, 1.0}, {0, 1.0}}, {{-1, 1.0}, {0, 1.0}}};
  m.error_view = detail::modulus_view(n);

  SpMat d2 = SpMat(-(d * d));
  m.system.C = detail::rotation_coupling(n);
  m.system.A = detail::blkdiag2(d2, d2);
  m.system.B = detail::sparse_identity(2 * n);

  m.reduce_linear = [](const std::vector<std::vector<Mat>>& dhat,
                       const std::vector<Mat>& bases) {
    const Mat& d1 = dhat[0][0];
    const Mat& d2 = dhat[0][1];
    ReducedLinearParts p;
    p.C = detail::dense_rotation_coupling(bases[0].transpose() * bases[1]);
    p.A = detail::dense_blkdiag2(Mat(-(d1 * d1)), Mat(-(d2 * d2)));
    p.B = Mat::Identity(p.A.rows(), p.A.cols());
    return p;
  };
  return m;
}

/// Zakharov-Kuznetsov  u_t + u u_x + u_xxx + u_xyy = 0  on a P-periodic
/// square, solved for u only:
///   d_t u + Dx (Dx^2 + Dy^2) A_t u = -Dx avg(f),  f(u) = u^2 / 2.
inline ModelSpec zk_model(double c, double P, const Grid& grid) {
  if (grid.dims != 2) throw std::invalid_argument("zk_model: needs a 2D grid");
  if (std::abs((grid.x_hi - grid.x_lo) - P) > 1e-12 * std::abs(P) ||
      std::abs((grid.y_hi - grid.y_lo) - P) > 1e-12 * std::abs(P))
    throw std::invalid_argument("zk_model: grid does not span [0, P]^2");

  ModelSpec m;
  m.name = "zk";
  m.grid = grid;
  m.components = 1;
  m.terms = 1;
  m.speed = c;
  m.period = P;
  m.vol = grid.dx() * grid.dy();

  auto [dx_op, dy_op] = build_2d_diffs(grid);
  m.ops.push_back(std::move(dx_op));
  m.ops.push_back(std::move(dy_op));
  const SpMat& dx = m.ops[0].matrix();
  const SpMat& dy = m.ops[1].matrix();

  m.exact = [grid, c, P](double t) {
    Vec u(grid.nodes());
    double half_sqrt_c = 0.5 * std::sqrt(c);
    for (Index j = 0; j < grid.nodes(); ++j) {
      double xi = mod_pos(grid.x(j) - c * t, P);
      double s = 1.0 / std::cosh(half_sqrt_c * (xi - 0.5 * P));
      u(j) = 3.0 * c * s * s;
    }
    return u;
  };

  m.term_eval = [](int, const Mat& comps, const Vec&) -> Vec {
    return 0.5 * comps.col(0).array().square();
  };
  m.nl_potential = [](const Mat& comps, const Vec&) -> Vec {
    return comps.col(0).array().cube() / 6.0;
  };
  m.energy_density = [](const Mat& comps, const Vec&) -> Vec {
    return -comps.col(0).array().cube() / 6.0;
  };
  m.energy_quad = {{0, 0, 0.5 * m.vol}, {1, 0, 0.5 * m.vol}};
  m.snapshot_recipe = {{{-1, 1.0}, {0, 1.0}, {1, 1.0}}};
  m.error_view = detail::identity_view();

  const Index n = grid.nodes();
  m.system.C = detail::sparse_identity(n);
  m.system.A = SpMat(dx * SpMat(dx * dx + dy * dy));
  m.system.B = SpMat(-dx);

  m.reduce_linear = [](const std::vector<std::vector<Mat>>& dhat,
                       const std::vector<Mat>&) {
    const Mat& dhx = dhat[0][0];
    const Mat& dhy = dhat[1][0];
    ReducedLinearParts p;
    p.C = Mat::Identity(dhx.rows(), dhx.cols());
    p.A = dhx * (dhx * dhx + dhy * dhy);
    p.B = -dhx;
    return p;
  };
  return m;
}

/// 2D NLS (Gross-Pitaevskii)  i psi_t + mu (psi_xx + psi_yy)
/// + R'(|psi|^2, x, y) psi = 0 with R(s,x,y) = R1(x,y) s + (beta/2) s^2,
/// R1 = -(x^2+y^2)/2 - 2 exp(-(x^2+y^2)); solved for (p; q) like 1D NLS with
/// D^2 replaced by mu (Dx^2 + Dy^2).
inline ModelSpec nls2d_model(double mu, double beta, const Grid& grid) {
  if (grid.dims != 2) throw std::invalid_argument("nls2d_model: needs a 2D grid");

  ModelSpec m;
  m.name = "nls2d";
  m.grid = grid;
  m.components = 2;
  m.terms = 2;
  m.mu = mu;
  m.beta = beta;
  m.vol = grid.dx() * grid.dy();

  auto [dx_op, dy_op] = build_2d_diffs(grid);
  m.ops.push_back(std::move(dx_op));
  m.ops.push_back(std::move(dy_op));
  const SpMat& dx = m.ops[0].matrix();
  const SpMat& dy = m.ops[1].matrix();

  const Index n = grid.nodes();
  m.node_coeff.resize(n);
  for (Index j = 0; j < n; ++j) {
    double r2 = grid.x(j) * grid.x(j) + grid.y(j) * grid.y(j);
    m.node_coeff(j) = -0.5 * r2 - 2.0 * std::exp(-r2);
  }

  m.exact = [grid](double t) {
    Vec z(2 * grid.nodes());
    const double amp = std::sqrt(2.0);
    for (Index j = 0; j < grid.nodes(); ++j) {
      double r2 = grid.x(j) * grid.x(j) + grid.y(j) * grid.y(j);
      double env = amp * std::exp(-0.5 * r2);
      z(j) = env * std::cos(t);
      z(grid.nodes() + j) = -env * std::sin(t);
    }
    return z;
  };

  m.term_eval = [beta](int term, const Mat& comps, const Vec& coeff) -> Vec {
    Eigen::ArrayXd s =
        comps.col(0).array().square() + comps.col(1).array().square();
    return (coeff.array() + beta * s) * comps.col(term).array();
  };
  m.nl_potential = [beta](const Mat& comps, const Vec& coeff) -> Vec {
    Eigen::ArrayXd s =
        comps.col(0).array().square() + comps.col(1).array().square();
    return 0.5 * (coeff.array() * s + 0.5 * beta * s.square());
  };
  m.energy_density = m.nl_potential;
  m.energy_quad = {{0, 0, -0.5 * mu * m.vol},
                   {0, 1, -0.5 * mu * m.vol},
                   {1, 0, -0.5 * mu * m.vol},
                   {1, 1, -0.5 * mu * m.vol}};
  m.snapshot_recipe = {{{-1, 1.0}, {0, 1.0}, {1, 1.0}},
                       {{-1, 1.0}, {0, 1.0}, {1, 1.0}}};
  m.error_view = detail::modulus_view(n);

  SpMat lap = SpMat(-mu * SpMat(dx * dx + dy * dy));
  m.system.C = detail::rotation_coupling(n);
  m.system.A = detail::blkdiag2(lap, lap);
  m.system.B = detail::sparse_identity(2 * n);

  m.reduce_linear = [mu](const std::vector<std::vector<Mat>>& dhat,
                         const std::vector<Mat>& bases) {
    Mat a1 = -mu * (dhat[0][0] * dhat[0][0] + dhat[1][0] * dhat[1][0]);
    Mat a2 = -mu * (dhat[0][1] * dhat[0][1] + dhat[1][1] * dhat[1][1]);
    ReducedLinearParts p;
    p.C = detail::dense_rotation_coupling(bases[0].transpose() * bases[1]);
    p.A = detail::dense_blkdiag2(a1, a2);
    p.B = Mat::Identity(p.A.rows(), p.A.cols());
    return p;
  };
  return m;
}

/// Step-ready copy of the model's eliminated system, with the nonlinear map
/// bound to the model's term evaluator. Self-contained: survives the model
/// going out of scope.
inline ImplicitSkewSystem full_system(const ModelSpec& model) {
  ImplicitSkewSystem sys;
  sys.C = model.system.C;
  sys.A = model.system.A;
  sys.B = model.system.B;
  sys.nonlin = [term_eval = model.term_eval, coeff = model.node_coeff,
                n = model.n_nodes(), ncomp = model.components,
                nterm = model.terms](const Vec& z) {
    Mat comps(n, ncomp);
    for (int c = 0; c < ncomp; ++c) comps.col(c) = z.segment(c * n, n);
    Vec out(static_cast<Index>(nterm) * n);
    for (int t = 0; t < nterm; ++t) out.segment(t * n, n) = term_eval(t, comps, coeff);
    return out;
  };
  return sys;
}

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"kdv", "nls1d", "zk", "nls2d"};
  return names;
}

/// Benchmark model instances, keyed by name. nx/ny override the default
/// resolution (kdv, nls1d: N = 1000; zk, nls2d: 100 x 100).
inline ModelSpec make_model(const std::string& name, Index nx = -1, Index ny = -1) {
  if (name == "kdv")
    return kdv_model(6.0, 1.0, 4.0, 20.0, Grid::line(0.0, 20.0, nx > 0 ? nx : 1000));
  if (name == "nls1d")
    return nls1d_model(2.0, Grid::line(-20.0, 60.0, nx > 0 ? nx : 1000));
  if (name == "zk") {
    Index rx = nx > 0 ? nx : 100, ry = ny > 0 ? ny : (nx > 0 ? nx : 100);
    return zk_model(1.0, 20.0, Grid::rect(0.0, 20.0, rx, 0.0, 20.0, ry));
  }
  if (name == "nls2d") {
    Index rx = nx > 0 ? nx : 100, ry = ny > 0 ? ny : (nx > 0 ? nx : 100);
    return nls2d_model(0.5, 1.0, Grid::rect(-6.0, 6.0, rx, -6.0, 6.0, ry));
  }
  throw std::invalid_argument("make_model: unknown model '" + name +
                              "' (valid: kdv, nls1d, zk, nls2d)");
}

}  // namespace msrom

#endif  // MSROM_MODELS_HPP
