#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dynsindy/library.hpp"
#include "dynsindy/simulate.hpp"
#include "dynsindy/stlsq.hpp"

using namespace dynsindy;

TEST_CASE("cubic library in two variables has ten terms in the documented order") {
  LibrarySpec spec;
  CHECK(term_count(spec, 2) == 10);
  const auto names = term_names(spec, 2);
  const std::vector<std::string> expect = {"1",    "x0",      "x1",      "x0^2",    "x0*x1",
                                           "x1^2", "x0^3",    "x0^2*x1", "x0*x1^2", "x1^3"};
  CHECK(names == expect);
}

TEST_CASE("library row for state (2,3) matches direct monomial evaluation") {
  LibrarySpec spec;
  Matrix state(1, 2);
  state << 2.0, 3.0;
  const Matrix theta = build_library(state, spec);
  Vector expect(10);
  expect << 1, 2, 3, 4, 6, 9, 8, 12, 18, 27;
  CHECK((theta.row(0).transpose() - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degree one library is bias plus the raw state") {
  LibrarySpec spec;
  spec.degree = 1;
  Matrix states(4, 3);
  states.setRandom();
  const Matrix theta = build_library(states, spec);
  CHECK(theta.cols() == 4);
  CHECK((theta.col(0).array() - 1.0).abs().maxCoeff() == 0.0);
  CHECK((theta.rightCols(3) - states).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("variable subset restricts monomials to one variable") {
  LibrarySpec spec;
  spec.include_bias = false;
  spec.variable_subset = std::vector<int>{0};
  const auto names = term_names(spec, 1);
  CHECK(names == std::vector<std::string>{"x0", "x0^2", "x0^3"});
}

TEST_CASE("library spec validation") {
  LibrarySpec bad;
  bad.degree = 4;
  CHECK_THROWS_AS(library_terms(bad, 2), std::invalid_argument);
  LibrarySpec oob;
  oob.variable_subset = std::vector<int>{3};
  CHECK_THROWS_AS(library_terms(oob, 2), std::invalid_argument);
}

TEST_CASE("stlsq recovers a constructed sparse model") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix states(400, 2);
  for (Index i = 0; i < states.rows(); ++i) {
    states(i, 0) = n(gen);
    states(i, 1) = n(gen);
  }
  LibrarySpec spec;
  const Matrix theta = build_library(states, spec);

  Matrix xi_true = Matrix::Zero(10, 2);
  xi_true(2, 0) = -1.7;  // x1 in eq 0
  xi_true(6, 0) = 0.8;   // x0^3 in eq 0
  xi_true(1, 1) = 2.4;   // x0 in eq 1
  xi_true(0, 1) = -0.5;  // bias in eq 1
  const Matrix derivs = theta * xi_true;

  const auto fit = stlsq(theta, derivs, 0.1);
  CHECK((fit.values - xi_true).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("a threshold above every least squares coefficient yields the zero matrix") {
  Matrix states(50, 2);
  states.setRandom();
  LibrarySpec spec;
  const Matrix theta = build_library(states, spec);
  Matrix xi = Matrix::Zero(10, 2);
  xi(1, 0) = 0.3;
  const auto fit = stlsq(theta, theta * xi, 1e6);
  CHECK(fit.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stlsq recovers the autonomous Lorenz equations") {
  SystemSpec spec = Lorenz{};
  Vector x0(3);
  x0 << 1.0, 1.0, 1.0;
  auto ds = simulate(spec, x0, 0.01, 1999);  // 2000 samples
  LibrarySpec lib;
  const Matrix theta = build_library(ds.states[0], lib);
  const auto fit = stlsq(theta, ds.derivs[0], 0.1);

  const auto names = term_names(lib, 3);
  auto idx = [&](const std::string& n) {
    return static_cast<Index>(std::find(names.begin(), names.end(), n) - names.begin());
  };
  struct Expect {
    std::string term;
    Index eq;
    double value;
  };
  const std::vector<Expect> truth = {{"x0", 0, -10.0}, {"x1", 0, 10.0},      {"x0", 1, 28.0},
                                     {"x1", 1, -1.0},  {"x0*x2", 1, -1.0},   {"x0*x1", 2, 1.0},
                                     {"x2", 2, -8.0 / 3.0}};
  Index nonzeros = 0;
  for (Index k = 0; k < fit.values.rows(); ++k) {
    for (Index j = 0; j < 3; ++j) {
      if (fit.values(k, j) != 0.0) ++nonzeros;
    }
  }
  CHECK(nonzeros == 7);
  for (const auto& e : truth) {
    CHECK(fit.values(idx(e.term), e.eq) == doctest::Approx(e.value).epsilon(0.02));
  }
}

TEST_CASE("stlsq is idempotent on its own active set") {
  Matrix states(200, 2);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Index i = 0; i < states.size(); ++i) states(i % 200, i / 200) = n(gen);
  LibrarySpec lib;
  const Matrix theta = build_library(states, lib);
  Matrix xi = Matrix::Zero(10, 2);
  xi(2, 0) = 1.0;
  xi(3, 1) = -2.0;
  Matrix derivs = theta * xi;
  derivs.array() += 1e-4;  // slight model mismatch

  const auto first = stlsq(theta, derivs, 0.05);
  // refit restricted to the recovered active set per equation: nothing changes
  for (Index j = 0; j < 2; ++j) {
    std::vector<Index> active;
    for (Index k = 0; k < first.values.rows(); ++k) {
      if (first.values(k, j) != 0.0) active.push_back(k);
    }
    REQUIRE(!active.empty());
    Matrix sub(theta.rows(), static_cast<Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c) sub.col(static_cast<Index>(c)) = theta.col(active[c]);
    const auto again = stlsq(sub, derivs.col(j), 0.05);
    for (std::size_t c = 0; c < active.size(); ++c) {
      CHECK(again.values(static_cast<Index>(c), 0) ==
            doctest::Approx(first.values(active[c], j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("support equals the generating support for thresholds below the smallest coefficient") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> pick_term(0, 9);
  std::uniform_real_distribution<double> mag(0.5, 3.0);
  LibrarySpec lib;

  for (int trial = 0; trial < 20; ++trial) {
    Matrix states(300, 2);
    for (Index i = 0; i < states.rows(); ++i) {
      states(i, 0) = n(gen);
      states(i, 1) = n(gen);
    }
    const Matrix theta = build_library(states, lib);
    Matrix xi = Matrix::Zero(10, 2);
    double min_mag = 1e9;
    for (Index j = 0; j < 2; ++j) {
      for (int s = 0; s < 3; ++s) {
        const Index k = pick_term(gen);
        const double v = mag(gen) * (gen() % 2 ? 1.0 : -1.0);
        xi(k, j) = v;
      }
    }
    for (Index k = 0; k < 10; ++k) {
      for (Index j = 0; j < 2; ++j) {
        if (xi(k, j) != 0.0) min_mag = std::min(min_mag, std::abs(xi(k, j)));
      }
    }
    const double threshold = std::uniform_real_distribution<double>(1e-6, 0.9 * min_mag)(gen);
    const auto fit = stlsq(theta, theta * xi, threshold);
    CHECK(((fit.values.array() != 0.0) == (xi.array() != 0.0)).all());
  }
}

TEST_CASE("predict_derivative basics") {
  Matrix coeffs = Matrix::Zero(10, 2);
  RowVector row(10);
  row.setRandom();
  CHECK(predict_derivative(row, coeffs).cwiseAbs().maxCoeff() == 0.0);

  coeffs(0, 1) = 3.5;  // bias only in equation 1
  row(0) = 1.0;
  Vector dx = predict_derivative(row, coeffs);
  CHECK(dx[1] == doctest::Approx(3.5));

  Vector twice = predict_derivative(row, (2.0 * coeffs).eval());
  CHECK(twice[1] == doctest::Approx(7.0));
}

TEST_CASE("normalized oscillator coefficient follows the change of variables") {
  // after scaling x by qx and y by qy the y-coefficient of dx/dt becomes A*qy/qx;
  // several jittered trajectories keep the cubic library full rank
  const double A = -2.0, B = 1.0;
  SystemSpec spec = HarmonicOscillator{ConstantSchedule{A}, ConstantSchedule{B}};
  Vector x0(2);
  x0 << 1.0, 0.0;
  SimulateOptions opt;
  opt.n_traj = 3;
  opt.seed = 9;
  opt.x0_jitter_std = 0.2;
  auto ds = simulate(spec, x0, 0.01, 999, opt);
  auto norm = normalize(ds);
  const double qx = (*norm.scale)[0], qy = (*norm.scale)[1];

  LibrarySpec lib;
  const auto fit = stlsq(build_library(stack_states(norm), lib), stack_derivs(norm), 0.05);
  const auto names = term_names(lib, 2);
  const Index iy = static_cast<Index>(std::find(names.begin(), names.end(), "x1") - names.begin());
  CHECK(fit.values(iy, 0) == doctest::Approx(A * qy / qx).epsilon(1e-6));

  // cross-check against re-simulating the scaled system directly
  SystemSpec scaled = HarmonicOscillator{ConstantSchedule{A * qy / qx}, ConstantSchedule{B * qx / qy}};
  Vector z0(2);
  z0 << x0[0] / qx, x0[1] / qy;
  auto ds2 = simulate(scaled, z0, 0.01, 999);
  CHECK((ds2.states[0] - norm.states[0]).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("stlsq reports rank deficiency") {
  Matrix states(50, 2);
  states.setRandom();
  states.col(1) = states.col(0);  // x1 duplicates x0
  LibrarySpec lib;
  lib.degree = 1;
  const Matrix theta = build_library(states, lib);
  Matrix derivs(50, 2);
  derivs.setRandom();
  CHECK_THROWS_AS(stlsq(theta, derivs, 0.0), RankDeficiencyError);
}
