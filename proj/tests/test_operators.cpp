#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "msrom/diff_ops.hpp"
#include "msrom/grid.hpp"

using namespace msrom;

namespace {

// dense oracle: explicit periodic centered-difference entries
Mat dense_centered_diff(Index n, double dx) {
  Mat d = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, (i + 1) % n) = 1.0 / (2.0 * dx);
    d(i, (i + n - 1) % n) = -1.0 / (2.0 * dx);
  }
  return d;
}

// dense Kronecker oracle
Mat dense_kron(const Mat& a, const Mat& b) {
  Mat k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

}  // namespace

TEST_CASE("1D stencil structure, N=4, dx=0.5") {
  DiffOp d = build_centered_diff(4, 0.5);
  Mat dense = Mat(d.matrix());
  Vec row0_expected(4);
  row0_expected << 0.0, 1.0, 0.0, -1.0;  // 1/(2*0.5) = 1
  CHECK((dense.row(0).transpose() - row0_expected).norm() == doctest::Approx(0.0));
  CHECK(dense(3, 0) == doctest::Approx(1.0));
  CHECK(dense(0, 3) == doctest::Approx(-1.0));
}

TEST_CASE("constant vectors are in the null space exactly") {
  for (Index n : {3, 5, 64, 1000}) {
    DiffOp d = build_centered_diff(n, 0.137);
    Vec ones = Vec::Ones(n);
    CHECK(d.apply(ones).lpNorm<Eigen::Infinity>() == 0.0);  // entries cancel, no rounding
  }
}

TEST_CASE("hand-evaluated stencil with periodic wrap, N=5") {
  DiffOp d = build_centered_diff(5, 1.0);
  Vec v(5);
  v << 1, 2, 3, 4, 5;
  Vec expected(5);
  expected << -1.5, 1.0, 1.0, 1.0, -1.5;
  CHECK((d.apply(v) - expected).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("each row has exactly two nonzeros of opposite sign") {
  DiffOp d = build_centered_diff(17, 0.25);
  Mat dense = Mat(d.matrix());
  for (Index i = 0; i < 17; ++i) {
    int nnz = 0;
    double sum = 0.0;
    for (Index j = 0; j < 17; ++j) {
      if (dense(i, j) != 0.0) {
        ++nnz;
        sum += dense(i, j);
        CHECK(std::abs(dense(i, j)) == doctest::Approx(1.0 / (2.0 * 0.25)));
      }
    }
    CHECK(nnz == 2);
    CHECK(sum == 0.0);
  }
}

TEST_CASE("skew-symmetry against random vectors") {
  std::mt19937 rng(071);
  std::normal_distribution<double> gauss;
  DiffOp d = build_centered_diff(200, 0.05);
  auto [dx, dy] = build_2d_diffs(Grid::rect(0, 1, 12, 0, 2, 9));
  for (const DiffOp* op : {&d, &dx, &dy}) {
    for (int trial = 0; trial < 1000; ++trial) {
      Vec v(op->size());
      for (Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
      CHECK(std::abs(v.dot(op->apply(v))) <= 1e-12 * v.squaredNorm());
    }
  }
}

TEST_CASE("transpose equals negation entrywise") {
  DiffOp d = build_centered_diff(31, 0.7);
  Mat dense = Mat(d.matrix());
  CHECK((dense.transpose() + dense).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(build_centered_diff(2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_centered_diff(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_2d_diffs(Grid::line(0, 1, 10)), std::invalid_argument);
  DiffOp d = build_centered_diff(5, 1.0);
  CHECK_THROWS_AS(d.apply(Vec::Zero(4)), std::invalid_argument);
}

TEST_CASE("apply to zero vector gives zero") {
  DiffOp d = build_centered_diff(9, 0.3);
  CHECK(d.apply(Vec::Zero(9)).norm() == 0.0);
}

TEST_CASE("second-order consistency on a smooth periodic function") {
  const double period = 2.0;
  auto worst_error = [&](Index n) {
    double dx = period / double(n);
    DiffOp d = build_centered_diff(n, dx);
    Vec f(n), df_exact(n);
    for (Index j = 0; j < n; ++j) {
      double x = dx * double(j);
      f(j) = std::sin(2.0 * M_PI * x / period);
      df_exact(j) = (2.0 * M_PI / period) * std::cos(2.0 * M_PI * x / period);
    }
    return (d.apply(f) - df_exact).lpNorm<Eigen::Infinity>();
  };
  double e1 = worst_error(64);
  double e2 = worst_error(128);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.08));
}

TEST_CASE("2D operators: block structure for Nx=Ny=3, dx=dy=1") {
  Grid g = Grid::rect(0, 3, 3, 0, 3, 3);
  auto [dx, dy] = build_2d_diffs(g);
  Mat dxd = Mat(dx.matrix());
  Mat block = dense_centered_diff(3, 1.0);
  for (int b = 0; b < 3; ++b)
    CHECK((dxd.block(3 * b, 3 * b, 3, 3) - block).lpNorm<Eigen::Infinity>() == 0.0);
  // off-diagonal blocks vanish
  CHECK(dxd.block(0, 3, 3, 6).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(dxd.block(3, 0, 3, 3).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("2D operators match the dense Kronecker oracle") {
  Grid g = Grid::rect(0, 1.2, 6, -1, 1, 5);
  auto [dx, dy] = build_2d_diffs(g);
  Mat eye_x = Mat::Identity(6, 6), eye_y = Mat::Identity(5, 5);
  Mat dx_oracle = dense_kron(eye_y, dense_centered_diff(6, g.dx()));
  Mat dy_oracle = dense_kron(dense_centered_diff(5, g.dy()), eye_x);
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    Vec v(30);
    for (Index i = 0; i < 30; ++i) v(i) = gauss(rng);
    CHECK((dx.apply(v) - dx_oracle * v).lpNorm<Eigen::Infinity>() < 1e-13);
    CHECK((dy.apply(v) - dy_oracle * v).lpNorm<Eigen::Infinity>() < 1e-13);
  }
}

TEST_CASE("Dx and Dy commute") {
  Grid g = Grid::rect(0, 2, 8, 0, 3, 6);
  auto [dx, dy] = build_2d_diffs(g);
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  Vec v(g.nodes());
  for (Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  Vec a = dx.apply(dy.apply(v));
  Vec b = dy.apply(dx.apply(v));
  CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-13 * std::max(1.0, a.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("Dy on the y-index field: wrap residuals only at y-boundary rows") {
  Grid g = Grid::rect(0, 4, 4, 0, 3, 3);
  auto [dx, dy] = build_2d_diffs(g);
  Vec v(g.nodes());
  for (Index j = 0; j < g.nodes(); ++j) v(j) = double(j / g.nx);  // y index
  Vec dv = dy.apply(v);
  const double dyh = g.dy();
  const Index ny = g.ny;
  for (Index j = 0; j < g.nodes(); ++j) {
    Index iy = j / g.nx;
    double expected;
    if (iy == 0)
      expected = (1.0 - double(ny - 1)) / (2.0 * dyh);
    else if (iy == ny - 1)
      expected = (0.0 - double(ny - 2)) / (2.0 * dyh);
    else
      expected = 1.0 / dyh;
    CHECK(dv(j) == doctest::Approx(expected));
  }
}
