#pragma once

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "dynsindy/coefficients.hpp"
#include "dynsindy/common.hpp"
#include "dynsindy/dataset.hpp"
#include "dynsindy/library.hpp"
#include "dynsindy/numdiff.hpp"
#include "dynsindy/stlsq.hpp"

namespace dynsindy {

// Windowed identification with one sparsity pattern shared across all time
// windows. Data is deliberately left unnormalized here; these fits behave
// better on raw trajectories.

struct Window {
  Matrix theta;   // rows: samples in the window (all trajectories stacked)
  Matrix derivs;  // matching derivative rows
  double t_begin = 0.0;
  double t_end = 0.0;
  double t_mid = 0.0;
};

struct WindowedProblem {
  std::vector<Window> windows;
  Index window_len = 0;
  Index dim = 0;
  std::vector<std::string> term_names;

  Index n_windows() const { return static_cast<Index>(windows.size()); }
  Index n_terms() const { return windows.empty() ? 0 : windows.front().theta.cols(); }

  Vector midpoint_times() const {
    Vector t(n_windows());
    for (Index i = 0; i < n_windows(); ++i) t[i] = windows[static_cast<std::size_t>(i)].t_mid;
    return t;
  }
};

struct GroupFitResult {
  std::vector<CoefficientMatrix> window_coeffs;
  bool converged = true;
  int iterations = 0;
};

/// Tiles the trajectory into floor(T/window_len) contiguous windows, dropping
/// the trailing remainder. Rows of every trajectory falling in a window are
/// stacked, so multi-trajectory datasets contribute jointly per window.
inline WindowedProblem partition_windows(const TrajectoryDataset& dataset, Index window_len,
                                         const LibrarySpec& spec,
                                         DerivativeSource source = DerivativeSource::Exact) {
  const Index T = dataset.n_samples();
  const Index n_terms = term_count(spec, static_cast<int>(dataset.dim()));
  if (window_len < n_terms) {
    throw std::invalid_argument("partition_windows: window_len must be >= the library term count");
  }
  if (T < 2 * window_len) throw std::invalid_argument("partition_windows: need at least two windows");

  const auto derivs = trajectory_derivatives(dataset, source);
  const Index M = T / window_len;
  const Index n_traj = dataset.n_traj();

  WindowedProblem problem;
  problem.window_len = window_len;
  problem.dim = dataset.dim();
  problem.term_names = term_names(spec, static_cast<int>(dataset.dim()));
  problem.windows.reserve(static_cast<std::size_t>(M));

  for (Index i = 0; i < M; ++i) {
    const Index begin = i * window_len;
    Matrix states(n_traj * window_len, dataset.dim());
    Matrix dx(n_traj * window_len, dataset.dim());
    for (Index tr = 0; tr < n_traj; ++tr) {
      states.middleRows(tr * window_len, window_len) =
          dataset.states[static_cast<std::size_t>(tr)].middleRows(begin, window_len);
      dx.middleRows(tr * window_len, window_len) =
          derivs[static_cast<std::size_t>(tr)].middleRows(begin, window_len);
    }
    Window w;
    w.theta = build_library(states, spec);
    w.derivs = std::move(dx);
    w.t_begin = dataset.times[begin];
    w.t_end = dataset.times[begin + window_len - 1];
    w.t_mid = 0.5 * (w.t_begin + w.t_end);
    problem.windows.push_back(std::move(w));
  }
  return problem;
}

/// Number of rows with nonzero Euclidean norm; counts support, not magnitude.
/// Checked entry-wise so subnormal-squaring underflow cannot miss a row.
inline Index l20_norm(const Eigen::Ref<const Matrix>& stacked) {
  Index count = 0;
  for (Index k = 0; k < stacked.rows(); ++k) {
    if ((stacked.row(k).array() != 0.0).any()) ++count;
  }
  return count;
}

namespace detail {

/// Unconstrained per-window solve. Short windows of a single trajectory are
/// routinely ill-conditioned (a short arc looks like a low-degree curve to
/// the monomial dictionary), so the init uses a truncated-SVD minimum-norm
/// solution; directions below 1e-8 of the top singular value carry no signal.
inline Matrix window_least_squares(const Window& w) {
  Eigen::BDCSVD<Matrix> svd(w.theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-8);
  return svd.solve(w.derivs);
}

/// Refit each equation of each window on the given support; entries outside
/// the support stay zero.
inline void refit_on_support(const WindowedProblem& problem, const BoolMatrix& support,
                             std::vector<Matrix>& coeffs) {
  const Index d = problem.dim;
  for (Index i = 0; i < problem.n_windows(); ++i) {
    const Window& w = problem.windows[static_cast<std::size_t>(i)];
    Matrix& xi = coeffs[static_cast<std::size_t>(i)];
    xi.setZero();
    for (Index j = 0; j < d; ++j) {
      std::vector<Index> active;
      for (Index k = 0; k < problem.n_terms(); ++k) {
        if (support(k, j)) active.push_back(k);
      }
      if (active.empty()) continue;
      const Vector sol = dynsindy::detail::active_set_solve(w.theta, w.derivs.col(j), active);
      for (std::size_t c = 0; c < active.size(); ++c) xi(active[c], j) = sol[static_cast<Index>(c)];
    }
  }
}

inline std::vector<CoefficientMatrix> package(const WindowedProblem& problem, std::vector<Matrix> coeffs) {
  std::vector<CoefficientMatrix> out;
  out.reserve(coeffs.size());
  for (auto& m : coeffs) out.push_back(CoefficientMatrix{std::move(m), problem.term_names});
  return out;
}

}  // namespace detail

/// Group hard-iterative thresholding: per-window gradient steps on the
/// least-squares objective, a joint hard threshold H_sqrt(gamma) on the row
/// norms of the window-stacked coefficients to pick one shared support, then
/// a constrained per-window refit. Stops when successive iterates move by at
/// most `tol`; otherwise returns the last iterate flagged as non-converged.
inline GroupFitResult ght_dynamics(const WindowedProblem& problem, double gamma, double tol,
                                   int max_iters = 50) {
  if (!(gamma > 0)) throw std::invalid_argument("ght_dynamics: gamma must be positive");
  if (!(tol > 0)) throw std::invalid_argument("ght_dynamics: tol must be positive");
  const Index M = problem.n_windows();
  const Index n_terms = problem.n_terms();
  const Index d = problem.dim;
  const double level = std::sqrt(gamma);

  // Per-window gradient step sizes 1/||Theta||_2^2 guarantee descent.
  std::vector<double> step(static_cast<std::size_t>(M));
  for (Index i = 0; i < M; ++i) {
    const double sigma_max = problem.windows[static_cast<std::size_t>(i)].theta.bdcSvd().singularValues()(0);
    step[static_cast<std::size_t>(i)] = 1.0 / (sigma_max * sigma_max);
  }

  std::vector<Matrix> coeffs(static_cast<std::size_t>(M));
  for (Index i = 0; i < M; ++i) {
    coeffs[static_cast<std::size_t>(i)] = detail::window_least_squares(problem.windows[static_cast<std::size_t>(i)]);
  }

  GroupFitResult result;
  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    std::vector<Matrix> stepped(static_cast<std::size_t>(M));
    for (Index i = 0; i < M; ++i) {
      const Window& w = problem.windows[static_cast<std::size_t>(i)];
      const Matrix& xi = coeffs[static_cast<std::size_t>(i)];
      stepped[static_cast<std::size_t>(i)] =
          xi - step[static_cast<std::size_t>(i)] * (w.theta.transpose() * (w.theta * xi - w.derivs));
    }

    BoolMatrix support(n_terms, d);
    for (Index k = 0; k < n_terms; ++k) {
      for (Index j = 0; j < d; ++j) {
        double sq = 0.0;
        for (Index i = 0; i < M; ++i) {
          const double v = stepped[static_cast<std::size_t>(i)](k, j);
          sq += v * v;
        }
        support(k, j) = std::sqrt(sq) >= level;
      }
    }

    std::vector<Matrix> next(static_cast<std::size_t>(M), Matrix(n_terms, d));
    detail::refit_on_support(problem, support, next);

    double delta = 0.0;
    for (Index i = 0; i < M; ++i) {
      delta = std::max(delta, (next[static_cast<std::size_t>(i)] - coeffs[static_cast<std::size_t>(i)]).norm());
    }
    coeffs = std::move(next);
    if (delta <= tol) {
      result.window_coeffs = detail::package(problem, std::move(coeffs));
      result.converged = true;
      return result;
    }
  }
  result.window_coeffs = detail::package(problem, std::move(coeffs));
  result.converged = false;
  return result;
}

/// Simple sequential thresholding across windows: initialize with per-window
/// least squares, then repeatedly zero every (term, equation) whose mean
/// absolute coefficient over windows falls strictly below the threshold and
/// refit the surviving support per window. With a single window this is
/// exactly stlsq.
inline GroupFitResult simple_sequential_threshold(const WindowedProblem& problem, double threshold,
                                                  int iters = 100) {
  if (threshold < 0) throw std::invalid_argument("simple_sequential_threshold: threshold must be >= 0");
  const Index M = problem.n_windows();
  const Index n_terms = problem.n_terms();
  const Index d = problem.dim;

  std::vector<Matrix> coeffs(static_cast<std::size_t>(M));
  for (Index i = 0; i < M; ++i) {
    coeffs[static_cast<std::size_t>(i)] = detail::window_least_squares(problem.windows[static_cast<std::size_t>(i)]);
  }

  GroupFitResult result;
  BoolMatrix prev_support = BoolMatrix::Constant(n_terms, d, true);
  for (int iter = 0; iter < iters; ++iter) {
    result.iterations = iter + 1;
    Matrix meanabs = Matrix::Zero(n_terms, d);
    for (Index i = 0; i < M; ++i) meanabs += coeffs[static_cast<std::size_t>(i)].cwiseAbs();
    meanabs /= static_cast<double>(M);

    const BoolMatrix support = meanabs.array() >= threshold;
    if ((support == prev_support).all() && iter > 0) break;
    prev_support = support;

    detail::refit_on_support(problem, support, coeffs);
  }
  result.window_coeffs = detail::package(problem, std::move(coeffs));
  return result;
}

/// Piecewise-constant series over window midpoints, for shared serialization.
inline CoefficientSeries to_series(const WindowedProblem& problem, const GroupFitResult& fit) {
  CoefficientSeries s;
  s.term_names = problem.term_names;
  s.times = problem.midpoint_times();
  s.values.reserve(fit.window_coeffs.size());
  for (const auto& cm : fit.window_coeffs) s.values.push_back(cm.values);
  return s;
}

}  // namespace dynsindy
