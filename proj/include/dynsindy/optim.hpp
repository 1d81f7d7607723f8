#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dynsindy/autodiff.hpp"
#include "dynsindy/common.hpp"

namespace dynsindy {

enum class OptimizerKind { Adam, AdamW, RmsProp };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  bool amsgrad = false;
  double rms_decay = 0.99;  // smoothing constant for RmsProp
  double lr_gamma = 1.0;    // exponential learning-rate decay per step
};

/// First-order optimizers over a fixed parameter list, with global-norm
/// gradient clipping and an exponential learning-rate schedule. Semantics
/// follow the common conventions: Adam/RmsProp couple weight decay through
/// the gradient, AdamW decays parameters directly.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, const std::vector<ad::Var>& params)
      : cfg_(config), lr_(config.lr) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    vmax_.reserve(params.size());
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.value().rows(), p.value().cols()));
      v_.push_back(Matrix::Zero(p.value().rows(), p.value().cols()));
      vmax_.push_back(Matrix::Zero(p.value().rows(), p.value().cols()));
    }
  }

  double current_lr() const { return lr_; }
  long step_count() const { return steps_; }

  /// Clip by global norm, apply one update, advance the schedule, zero grads.
  void step(std::vector<ad::Var>& params, double clip_norm = 0.0) {
    if (params.size() != m_.size()) throw std::invalid_argument("optimizer: parameter count changed");
    ++steps_;

    double sq = 0.0;
    for (auto& p : params) {
      if (p.grad().size() > 0) sq += p.grad().squaredNorm();
    }
    const double gnorm = std::sqrt(sq);
    const double clip_factor = (clip_norm > 0.0 && gnorm > clip_norm) ? clip_norm / gnorm : 1.0;

    for (std::size_t i = 0; i < params.size(); ++i) {
      ad::Var& p = params[i];
      Matrix g = p.grad().size() > 0
                     ? Matrix(clip_factor * p.grad())
                     : Matrix(Matrix::Zero(p.value().rows(), p.value().cols()));
      switch (cfg_.kind) {
        case OptimizerKind::Adam:
          if (cfg_.weight_decay != 0.0) g += cfg_.weight_decay * p.value();
          adam_update(i, p, g);
          break;
        case OptimizerKind::AdamW:
          if (cfg_.weight_decay != 0.0) p.value() -= lr_ * cfg_.weight_decay * p.value();
          adam_update(i, p, g);
          break;
        case OptimizerKind::RmsProp: {
          if (cfg_.weight_decay != 0.0) g += cfg_.weight_decay * p.value();
          Matrix& v = v_[i];
          v = cfg_.rms_decay * v + (1.0 - cfg_.rms_decay) * g.cwiseProduct(g);
          p.value() -= lr_ * g.cwiseQuotient((v.cwiseSqrt().array() + cfg_.eps).matrix());
          break;
        }
      }
      p.zero_grad();
    }
    lr_ *= cfg_.lr_gamma;
  }

 private:
  void adam_update(std::size_t i, ad::Var& p, const Matrix& g) {
    Matrix& m = m_[i];
    Matrix& v = v_[i];
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
    Matrix mhat = m / bc1;
    Matrix vhat = v / bc2;
    if (cfg_.amsgrad) {
      vmax_[i] = vmax_[i].cwiseMax(vhat);
      vhat = vmax_[i];
    }
    p.value() -= lr_ * mhat.cwiseQuotient((vhat.cwiseSqrt().array() + cfg_.eps).matrix());
  }

  OptimizerConfig cfg_;
  double lr_;
  long steps_ = 0;
  std::vector<Matrix> m_, v_, vmax_;
};

}  // namespace dynsindy
