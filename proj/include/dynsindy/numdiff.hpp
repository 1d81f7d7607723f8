#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "dynsindy/common.hpp"
#include "dynsindy/dataset.hpp"

namespace dynsindy {

/// Second-order finite differences on a uniform grid: central stencils in the
/// interior, one-sided three-point stencils at both ends. Exact for
/// polynomials up to degree 2.
inline Matrix central_difference(const Eigen::Ref<const Matrix>& series, double dt) {
  const Index T = series.rows();
  if (T < 3) throw std::invalid_argument("central_difference: need at least 3 samples");
  Matrix out(T, series.cols());
  out.row(0) = (-3.0 * series.row(0) + 4.0 * series.row(1) - series.row(2)) / (2.0 * dt);
  for (Index k = 1; k + 1 < T; ++k) out.row(k) = (series.row(k + 1) - series.row(k - 1)) / (2.0 * dt);
  out.row(T - 1) = (3.0 * series.row(T - 1) - 4.0 * series.row(T - 2) + series.row(T - 3)) / (2.0 * dt);
  return out;
}

inline std::vector<Matrix> central_difference(const TrajectoryDataset& ds) {
  std::vector<Matrix> out;
  out.reserve(ds.states.size());
  for (const auto& traj : ds.states) out.push_back(central_difference(traj, ds.dt));
  return out;
}

/// Centered moving average with an odd window; the window shrinks
/// symmetrically near the ends. window=1 is the identity.
inline Matrix smooth(const Eigen::Ref<const Matrix>& series, Index window) {
  const Index T = series.rows();
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("smooth: window must be odd and >= 1");
  if (window > T) throw std::invalid_argument("smooth: window exceeds series length");
  if (window == 1) return series;
  const Index half = window / 2;
  Matrix out(T, series.cols());
  for (Index k = 0; k < T; ++k) {
    const Index r = std::min({half, k, T - 1 - k});
    out.row(k) = series.middleRows(k - r, 2 * r + 1).colwise().mean();
  }
  return out;
}

/// Natural cubic spline through the knots, resampled at step dt/factor.
/// Passes through every original sample exactly; factor=1 returns the input.
inline std::pair<Matrix, Vector> cubic_spline_refine(const Eigen::Ref<const Matrix>& series,
                                                     const Eigen::Ref<const Vector>& times,
                                                     Index factor) {
  const Index T = series.rows();
  if (factor < 1) throw std::invalid_argument("cubic_spline_refine: factor must be >= 1");
  if (T < 4) throw std::invalid_argument("cubic_spline_refine: need at least 4 knots");
  if (times.size() != T) throw std::invalid_argument("cubic_spline_refine: times/series length mismatch");
  if (factor == 1) return {series, times};

  const double dt = times[1] - times[0];
  const Index n_out = (T - 1) * factor + 1;
  Vector out_times(n_out);
  for (Index k = 0; k < n_out; ++k) out_times[k] = times[0] + static_cast<double>(k) * dt / static_cast<double>(factor);

  // Second derivatives from the natural-spline tridiagonal system (Thomas
  // algorithm); uniform knot spacing keeps the coefficients constant.
  Matrix second = Matrix::Zero(T, series.cols());
  const Index n = T - 2;  // interior knots
  if (n > 0) {
    Matrix rhs(n, series.cols());
    for (Index i = 0; i < n; ++i) {
      rhs.row(i) = 6.0 / (dt * dt) * (series.row(i) - 2.0 * series.row(i + 1) + series.row(i + 2));
    }
    Vector diag = Vector::Constant(n, 4.0);
    for (Index i = 1; i < n; ++i) {
      const double w = 1.0 / diag[i - 1];
      diag[i] -= w;
      rhs.row(i) -= w * rhs.row(i - 1);
    }
    second.row(n) = rhs.row(n - 1) / diag[n - 1];
    for (Index i = n - 2; i >= 0; --i) {
      second.row(i + 1) = (rhs.row(i) - second.row(i + 2)) / diag[i];
    }
  }

  Matrix out(n_out, series.cols());
  for (Index k = 0; k < n_out; ++k) {
    Index seg = k / factor;
    if (seg >= T - 1) seg = T - 2;
    const double a = (times[seg + 1] - out_times[k]) / dt;
    const double b = 1.0 - a;
    out.row(k) = a * series.row(seg) + b * series.row(seg + 1) +
                 ((a * a * a - a) * second.row(seg) + (b * b * b - b) * second.row(seg + 1)) * (dt * dt) / 6.0;
  }
  // Knots are reproduced exactly, not through the polynomial evaluation.
  for (Index i = 0; i < T; ++i) out.row(i * factor) = series.row(i);
  return {out, out_times};
}

/// Which derivative estimate downstream fits regress against. Synthetic data
/// carries the exact simulation derivative; measured data falls back to
/// finite differences.
enum class DerivativeSource { Exact, Numeric };

inline std::vector<Matrix> trajectory_derivatives(const TrajectoryDataset& ds, DerivativeSource source) {
  if (source == DerivativeSource::Exact) {
    if (!ds.has_derivs()) throw std::invalid_argument("dataset carries no exact derivatives");
    return ds.derivs;
  }
  return central_difference(ds);
}

/// Cumulative trapezoid; inverse of differentiation up to O(dt^2) and the
/// initial value.
inline Matrix cumulative_trapezoid(const Eigen::Ref<const Matrix>& series, double dt) {
  Matrix out = Matrix::Zero(series.rows(), series.cols());
  for (Index k = 1; k < series.rows(); ++k) {
    out.row(k) = out.row(k - 1) + 0.5 * dt * (series.row(k - 1) + series.row(k));
  }
  return out;
}

}  // namespace dynsindy
