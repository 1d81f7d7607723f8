#pragma once

#include <cmath>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dynsindy/common.hpp"
#include "dynsindy/dataset.hpp"
#include "dynsindy/rng.hpp"
#include "dynsindy/system.hpp"

namespace dynsindy {

enum class IntegrationMethod { Rk4, Euler };

struct SimulateOptions {
  IntegrationMethod method = IntegrationMethod::Rk4;
  Index n_traj = 1;
  double x0_jitter_std = 0.1;
  std::uint64_t seed = 0;
  double t0 = 0.0;
  double divergence_bound = 1e8;
  int n_threads = 1;
};

namespace detail {

/// Classic RK4 step; time-varying coefficients are re-evaluated at the
/// substage times t, t+dt/2, t+dt rather than frozen over the step.
inline Vector rk4_step(const SystemSpec& spec, const Vector& x, double t, double dt) {
  const Vector k1 = system_rhs(spec, x, t);
  const Vector k2 = system_rhs(spec, x + 0.5 * dt * k1, t + 0.5 * dt);
  const Vector k3 = system_rhs(spec, x + 0.5 * dt * k2, t + 0.5 * dt);
  const Vector k4 = system_rhs(spec, x + dt * k3, t + dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline Vector euler_step(const SystemSpec& spec, const Vector& x, double t, double dt) {
  return x + dt * system_rhs(spec, x, t);
}

inline void integrate_trajectory(const SystemSpec& spec, const Vector& x0, double t0, double dt,
                                 Index n_steps, IntegrationMethod method, double bound,
                                 Matrix& states, Matrix& derivs) {
  Vector x = x0;
  for (Index k = 0; k <= n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > bound) {
      throw DivergenceError("integration diverged at t=" + std::to_string(t));
    }
    states.row(k) = x.transpose();
    derivs.row(k) = system_rhs(spec, x, t).transpose();
    if (k < n_steps) {
      x = method == IntegrationMethod::Rk4 ? rk4_step(spec, x, t, dt) : euler_step(spec, x, t, dt);
    }
  }
}

}  // namespace detail

/// Integrates `n_steps` steps from x0, producing n_steps+1 samples per
/// trajectory. Trajectory 0 starts exactly at x0; later trajectories perturb
/// x0 with Gaussian jitter drawn from a per-trajectory derived RNG stream, so
/// results are independent of thread count.
inline TrajectoryDataset simulate(const SystemSpec& spec, const Vector& x0, double dt, Index n_steps,
                                  const SimulateOptions& opt = {}) {
  const int d = state_dim(spec);
  if (!(dt > 0)) throw std::invalid_argument("simulate: dt must be positive");
  if (n_steps < 2) throw std::invalid_argument("simulate: n_steps must be >= 2");
  if (x0.size() != d) throw std::invalid_argument("simulate: x0 dimension does not match system");
  if (opt.n_traj < 1) throw std::invalid_argument("simulate: n_traj must be >= 1");

  const Index T = n_steps + 1;
  TrajectoryDataset ds;
  ds.dt = dt;
  ds.noise_std = 0.0;
  ds.times.resize(T);
  for (Index k = 0; k < T; ++k) ds.times[k] = opt.t0 + static_cast<double>(k) * dt;
  ds.states.assign(static_cast<std::size_t>(opt.n_traj), Matrix(T, d));
  ds.derivs.assign(static_cast<std::size_t>(opt.n_traj), Matrix(T, d));
  ds.ground_truth = ground_truth_map(spec);

  std::vector<Vector> starts(static_cast<std::size_t>(opt.n_traj));
  starts[0] = x0;
  for (Index i = 1; i < opt.n_traj; ++i) {
    Rng rng = Rng::derived(opt.seed, static_cast<std::uint64_t>(i));
    Vector x = x0;
    for (int c = 0; c < d; ++c) x[c] += opt.x0_jitter_std * rng.normal();
    starts[static_cast<std::size_t>(i)] = x;
  }

  auto run_range = [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      detail::integrate_trajectory(spec, starts[static_cast<std::size_t>(i)], opt.t0, dt, n_steps,
                                   opt.method, opt.divergence_bound,
                                   ds.states[static_cast<std::size_t>(i)],
                                   ds.derivs[static_cast<std::size_t>(i)]);
    }
  };

  const int threads = std::max(1, opt.n_threads);
  if (threads == 1 || opt.n_traj == 1) {
    run_range(0, opt.n_traj);
  } else {
    std::vector<std::thread> pool;
    const Index chunk = (opt.n_traj + threads - 1) / threads;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (Index b = 0; b < opt.n_traj; b += chunk) {
      pool.emplace_back([&, b] {
        try {
          run_range(b, std::min(b + chunk, opt.n_traj));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  return ds;
}

/// Additive i.i.d. Gaussian measurement noise on every state entry. Exact
/// derivatives, when present, are left untouched: they describe the clean
/// dynamics that generated the data.
inline TrajectoryDataset add_noise(const TrajectoryDataset& dataset, double std, std::uint64_t seed) {
  if (std < 0) throw std::invalid_argument("add_noise: std must be >= 0");
  TrajectoryDataset out = dataset;
  out.noise_std = std;
  if (std == 0.0) return out;
  for (Index i = 0; i < out.n_traj(); ++i) {
    Rng rng = Rng::derived(seed, static_cast<std::uint64_t>(i));
    Matrix& traj = out.states[static_cast<std::size_t>(i)];
    for (Index r = 0; r < traj.rows(); ++r) {
      for (Index c = 0; c < traj.cols(); ++c) traj(r, c) += std * rng.normal();
    }
  }
  return out;
}

/// Divides each state dimension by its max absolute value over all
/// trajectories, recording the factors in `scale`. Derivatives share the state
/// scale (d/dt of x/s is xdot/s). Ground truth is untouched.
inline TrajectoryDataset normalize(const TrajectoryDataset& dataset) {
  TrajectoryDataset out = dataset;
  const Index d = out.dim();
  Vector scale = Vector::Zero(d);
  for (const auto& traj : out.states) {
    scale = scale.cwiseMax(traj.cwiseAbs().colwise().maxCoeff().transpose());
  }
  for (Index c = 0; c < d; ++c) {
    if (scale[c] <= 0.0) {
      throw std::invalid_argument("normalize: state dimension " + std::to_string(c) + " is identically zero");
    }
  }
  for (auto& traj : out.states) traj.array().rowwise() /= scale.transpose().array();
  for (auto& traj : out.derivs) traj.array().rowwise() /= scale.transpose().array();
  out.scale = scale;
  return out;
}

}  // namespace dynsindy
