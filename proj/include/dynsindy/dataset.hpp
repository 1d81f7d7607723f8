#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "dynsindy/common.hpp"
#include "dynsindy/system.hpp"

namespace dynsindy {

/// Multi-trajectory state time series on a uniform grid. `states[i]` is the
/// T x d sample matrix of trajectory i. `derivs`, when present, holds the
/// exact right-hand side evaluated along each trajectory; it survives noise
/// injection so trainers can regress against the true derivatives.
struct TrajectoryDataset {
  Vector times;
  std::vector<Matrix> states;
  std::vector<Matrix> derivs;  // empty when unavailable
  double dt = 0.0;
  double noise_std = 0.0;
  GroundTruthMap ground_truth;
  std::optional<Vector> scale;  // per-dimension max-abs factors after normalize()

  Index n_traj() const { return static_cast<Index>(states.size()); }
  Index n_samples() const { return times.size(); }
  Index dim() const { return states.empty() ? 0 : states.front().cols(); }
  bool has_derivs() const { return !derivs.empty(); }
};

inline void validate(const TrajectoryDataset& ds) {
  if (ds.states.empty()) throw std::invalid_argument("dataset has no trajectories");
  const Index T = ds.n_samples();
  const Index d = ds.dim();
  const double tol = 1e-12 * std::max(1.0, std::abs(ds.dt));
  for (Index k = 0; k + 1 < T; ++k) {
    if (std::abs(ds.times[k + 1] - ds.times[k] - ds.dt) > tol) {
      throw std::invalid_argument("dataset times are not uniformly spaced");
    }
  }
  for (const auto& traj : ds.states) {
    if (traj.rows() != T || traj.cols() != d) throw std::invalid_argument("dataset trajectory shape mismatch");
  }
  if (!ds.derivs.empty() && ds.derivs.size() != ds.states.size()) {
    throw std::invalid_argument("dataset derivative count mismatch");
  }
}

/// All trajectories stacked row-wise into one (n_traj*T) x d matrix.
inline Matrix stack_states(const TrajectoryDataset& ds) {
  const Index T = ds.n_samples();
  Matrix out(ds.n_traj() * T, ds.dim());
  for (Index i = 0; i < ds.n_traj(); ++i) out.middleRows(i * T, T) = ds.states[static_cast<std::size_t>(i)];
  return out;
}

inline Matrix stack_derivs(const TrajectoryDataset& ds) {
  if (!ds.has_derivs()) throw std::invalid_argument("dataset carries no derivatives");
  const Index T = ds.n_samples();
  Matrix out(ds.n_traj() * T, ds.dim());
  for (Index i = 0; i < ds.n_traj(); ++i) out.middleRows(i * T, T) = ds.derivs[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace dynsindy
