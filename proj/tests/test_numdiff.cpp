#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dynsindy/numdiff.hpp"

using namespace dynsindy;

namespace {

Matrix sample_fn(double (*f)(double), double dt, Index T, double t0 = 0.0) {
  Matrix out(T, 1);
  for (Index k = 0; k < T; ++k) out(k, 0) = f(t0 + static_cast<double>(k) * dt);
  return out;
}

}  // namespace

TEST_CASE("central difference is exact on linear data") {
  const double dt = 0.05;
  Matrix x(50, 2);
  for (Index k = 0; k < 50; ++k) {
    x(k, 0) = 3.0 * static_cast<double>(k) * dt;
    x(k, 1) = -1.5 * static_cast<double>(k) * dt + 2.0;
  }
  const Matrix dx = central_difference(x, dt);
  CHECK((dx.col(0).array() - 3.0).abs().maxCoeff() <= 1e-10);
  CHECK((dx.col(1).array() + 1.5).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("central difference on sin has second-order error") {
  auto interior_err = [](double dt) {
    const Index T = static_cast<Index>(std::round(6.28 / dt));
    Matrix x = sample_fn(std::sin, dt, T);
    Matrix dx = central_difference(x, dt);
    double e = 0.0;
    for (Index k = 1; k + 1 < T; ++k) {
      e = std::max(e, std::abs(dx(k, 0) - std::cos(static_cast<double>(k) * dt)));
    }
    return e;
  };
  const double e1 = interior_err(0.01);
  const double e2 = interior_err(0.005);
  CHECK(e1 <= 2e-5);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("constant series has zero derivative") {
  Matrix x = Matrix::Constant(20, 3, 4.2);
  CHECK(central_difference(x, 0.1).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("smooth with window one is the identity") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(30, 2);
  for (Index i = 0; i < x.size(); ++i) x(i / 2, i % 2) = n(gen);
  CHECK((smooth(x, 1) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("smooth leaves constants unchanged") {
  Matrix x = Matrix::Constant(101, 1, -2.5);
  for (Index w : {3, 9, 51, 101}) {
    CHECK((smooth(x, w).array() + 2.5).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("smoothing white noise shrinks its std by sqrt(window)") {
  const Index T = 100000;
  const Index w = 9;
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(T, 1);
  for (Index k = 0; k < T; ++k) x(k, 0) = n(gen);
  const Matrix y = smooth(x, w);
  const double std_out = std::sqrt(y.array().square().mean());
  CHECK(std_out == doctest::Approx(1.0 / std::sqrt(static_cast<double>(w))).epsilon(0.15));
}

TEST_CASE("smooth validates the window") {
  Matrix x = Matrix::Zero(10, 1);
  CHECK_THROWS_AS(smooth(x, 2), std::invalid_argument);
  CHECK_THROWS_AS(smooth(x, 11), std::invalid_argument);
}

TEST_CASE("spline refine with factor one is the identity") {
  Matrix x = sample_fn(std::sin, 0.3, 12);
  Vector t = Vector::LinSpaced(12, 0.0, 0.3 * 11);
  auto [xr, tr] = cubic_spline_refine(x, t, 1);
  CHECK((xr - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((tr - t).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spline reproduces linear data") {
  Matrix x(6, 1);
  Vector t(6);
  for (Index k = 0; k < 6; ++k) {
    t[k] = 0.5 * static_cast<double>(k);
    x(k, 0) = 2.0 * t[k] - 1.0;
  }
  auto [xr, tr] = cubic_spline_refine(x, t, 10);
  CHECK(xr.rows() == 51);
  for (Index k = 0; k < xr.rows(); ++k) {
    CHECK(xr(k, 0) == doctest::Approx(2.0 * tr[k] - 1.0).epsilon(1e-10));
  }
}

TEST_CASE("spline interpolates coarse sin within 1e-3") {
  // window ends near inflection points of sin, where the natural boundary
  // condition S''=0 is benign
  const double dt = 0.35;
  const Index T = 28;  // t in [0, 9.45], 9.45 ~ 3*pi
  Matrix x = sample_fn(std::sin, dt, T);
  Vector t(T);
  for (Index k = 0; k < T; ++k) t[k] = dt * static_cast<double>(k);
  auto [xr, tr] = cubic_spline_refine(x, t, 100);
  double err = 0.0;
  for (Index k = 0; k < xr.rows(); ++k) err = std::max(err, std::abs(xr(k, 0) - std::sin(tr[k])));
  CHECK(err <= 1e-3);
  // knots are hit exactly
  for (Index k = 0; k < T; ++k) CHECK(xr(k * 100, 0) == x(k, 0));
}

TEST_CASE("differentiate then integrate recovers the series to O(dt^2)") {
  for (double dt : {0.01, 0.005}) {
    const Index T = static_cast<Index>(std::round(3.0 / dt));
    Matrix x = sample_fn(std::sin, dt, T);
    const Matrix dx = central_difference(x, dt);
    const Matrix xi = cumulative_trapezoid(dx, dt);
    double err = 0.0;
    for (Index k = 0; k < T; ++k) err = std::max(err, std::abs(xi(k, 0) - (x(k, 0) - x(0, 0))));
    CHECK(err <= 5.0 * dt * dt);
  }
}

TEST_CASE("exact derivatives come from the dataset, numeric from differencing") {
  TrajectoryDataset ds;
  ds.dt = 0.1;
  ds.times = Vector::LinSpaced(5, 0.0, 0.4);
  Matrix traj(5, 1);
  traj << 0.0, 0.1, 0.2, 0.3, 0.4;  // x = t
  ds.states = {traj};
  CHECK_THROWS_AS(trajectory_derivatives(ds, DerivativeSource::Exact), std::invalid_argument);
  const auto numeric = trajectory_derivatives(ds, DerivativeSource::Numeric);
  CHECK((numeric[0].array() - 1.0).abs().maxCoeff() <= 1e-12);
  ds.derivs = {Matrix::Constant(5, 1, 42.0)};
  CHECK(trajectory_derivatives(ds, DerivativeSource::Exact)[0](0, 0) == 42.0);
}
