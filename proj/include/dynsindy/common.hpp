#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dynsindy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Simulated or reconstructed state left the configured magnitude bound.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Active-set least squares hit an effectively singular system.
struct RankDeficiencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent experiment configuration; message carries the field path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace dynsindy
