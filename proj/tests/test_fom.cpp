#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msrom/fom.hpp"

using namespace msrom;

TEST_CASE("desk-scale KdV run: flat energy trace") {
  ModelSpec m = kdv_model(6.0, 1.0, 4.0, 20.0, Grid::line(0.0, 20.0, 250));
  AvfConfig cfg;
  cfg.dt = 0.02;
  FomResult r = run_fom(m, cfg, 2.0);
  REQUIRE(r.traj.steps() == 100);
  REQUIRE(r.energy.values.size() == 101);
  double e0 = r.energy.values.front();
  double worst = 0.0;
  for (double e : r.energy.values) worst = std::max(worst, std::abs(e - e0) / std::abs(e0));
  CHECK(worst <= 1e-10);
}

TEST_CASE("T = 0 gives a single-state trajectory equal to the initial data") {
  ModelSpec m = kdv_model(6.0, 1.0, 4.0, 20.0, Grid::line(0.0, 20.0, 64));
  AvfConfig cfg;
  cfg.dt = 0.02;
  FomResult r = run_fom(m, cfg, 0.0);
  CHECK(r.traj.steps() == 0);
  CHECK((r.traj.states.col(0) - m.exact(0.0)).norm() == 0.0);
  CHECK(r.energy.values.size() == 1);
}

TEST_CASE("T not a multiple of dt is rejected") {
  ModelSpec m = kdv_model(6.0, 1.0, 4.0, 20.0, Grid::line(0.0, 20.0, 32));
  AvfConfig cfg;
  cfg.dt = 0.3;
  CHECK_THROWS_AS(run_fom(m, cfg, 1.0), std::invalid_argument);
}

TEST_CASE("snapshot shapes and column identities") {
  ModelSpec m = kdv_model(6.0, 1.0, 4.0, 20.0, Grid::line(0.0, 20.0, 100));
  AvfConfig cfg;
  cfg.dt = 0.05;
  FomResult r = run_fom(m, cfg, 0.5);  // 10 steps
  auto snaps = assemble_snapshots(r.traj, m);
  REQUIRE(snaps.size() == 1);
  CHECK(snaps[0].data.rows() == 100);
  CHECK(snaps[0].data.cols() == 20);  // [u | gamma D u]

  // first column is the state at t_1, not t_0
  CHECK((snaps[0].data.col(0) - r.traj.states.col(1)).norm() == 0.0);
  // derivative block recomputed independently
  Vec du = m.ops[0].apply(r.traj.states.col(3));
  CHECK((snaps[0].data.col(10 + 2) - m.gamma * du).norm() == 0.0);

  auto nl = collect_nonlinear_snapshots(r.traj, m);
  REQUIRE(nl.size() == 1);
  CHECK(nl[0].data.rows() == 100);
  CHECK(nl[0].data.cols() == 10);
  // column k equals f(u^k) recomputed
  Vec f4 = m.nonlinearity(r.traj.states.col(4));
  CHECK((nl[0].data.col(3) - f4).norm() == 0.0);
}

TEST_CASE("NLS snapshots: one matrix per component with [state | D state] blocks") {
  ModelSpec m = nls1d_model(2.0, Grid::line(-20.0, 60.0, 80));
  AvfConfig cfg;
  cfg.dt = 0.05;
  FomResult r = run_fom(m, cfg, 0.25);  // 5 steps
  auto snaps = assemble_snapshots(r.traj, m);
  REQUIRE(snaps.size() == 2);
  for (const auto& s : snaps) {
    CHECK(s.data.rows() == 80);
    CHECK(s.data.cols() == 10);
  }
  Vec p2 = r.traj.states.col(2).head(80);
  CHECK((snaps[0].data.col(1) - p2).norm() == 0.0);
  Vec q2 = r.traj.states.col(2).tail(80);
  CHECK((snaps[1].data.col(5 + 1) - m.ops[0].apply(q2)).norm() == 0.0);

  auto nl = collect_nonlinear_snapshots(r.traj, m);
  REQUIRE(nl.size() == 2);
  CHECK(nl[0].data.cols() == 5);
}

TEST_CASE("empty trajectory is rejected by snapshot assembly") {
  ModelSpec m = kdv_model(6.0, 1.0, 4.0, 20.0, Grid::line(0.0, 20.0, 32));
  AvfConfig cfg;
  cfg.dt = 0.02;
  FomResult r = run_fom(m, cfg, 0.0);
  CHECK_THROWS_AS(assemble_snapshots(r.traj, m), std::invalid_argument);
  CHECK_THROWS_AS(collect_nonlinear_snapshots(r.traj, m), std::invalid_argument);
}

TEST_CASE("identical configurations produce bitwise-identical trajectories") {
  ModelSpec m = nls1d_model(2.0, Grid::line(-20.0, 60.0, 120));
  AvfConfig cfg;
  cfg.dt = 0.02;
  FomResult a = run_fom(m, cfg, 0.4);
  FomResult b = run_fom(m, cfg, 0.4);
  CHECK(a.traj.states == b.traj.states);  // exact equality, not approx
}

TEST_CASE("desk-scale shape preservation for the moving soliton") {
  ModelSpec m = kdv_model(6.0, 1.0, 4.0, 20.0, Grid::line(0.0, 20.0, 250));
  AvfConfig cfg;
  cfg.dt = 0.02;
  FomResult r = run_fom(m, cfg, 2.0);
  Vec final_state = r.traj.states.col(r.traj.steps());
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k <= r.traj.steps(); ++k) {
    double d = (final_state - m.exact(k * cfg.dt)).squaredNorm();
    best = std::min(best, d);
  }
  double ref = m.exact(2.0).squaredNorm();
  CHECK(best / ref <= 1e-3);
}
