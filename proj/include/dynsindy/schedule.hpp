#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "dynsindy/common.hpp"

namespace dynsindy {

// Time courses for ODE coefficients. A schedule is a total function of time;
// evaluation never throws on finite t.

struct ConstantSchedule {
  double value = 0.0;
};

/// offset + amplitude / (1 + exp(-slope * (t - center)))
struct SigmoidSchedule {
  double offset = 0.0;
  double amplitude = 1.0;
  double center = 0.0;
  double slope = 1.0;
};

/// Piecewise constant. levels[k] holds on [switch_times[k-1], switch_times[k])
/// with levels.front() before the first switch; intervals are left-closed, so
/// the new level takes effect exactly at its switch time.
struct SwitchSchedule {
  std::vector<double> levels;
  std::vector<double> switch_times;
};

/// offset + amplitude * sin(frequency * t + phase), frequency in rad/time.
struct SinusoidSchedule {
  double offset = 0.0;
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
};

struct FourierTerm {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

/// offset + sum_k amplitude_k * sin(frequency_k * t + phase_k). A single term
/// with zero offset is identical to SinusoidSchedule.
struct FourierSchedule {
  double offset = 0.0;
  std::vector<FourierTerm> terms;
};

using CoefficientSchedule = std::variant<ConstantSchedule, SigmoidSchedule, SwitchSchedule,
                                         SinusoidSchedule, FourierSchedule>;

inline void validate(const SwitchSchedule& s) {
  if (s.levels.size() != s.switch_times.size() + 1) {
    throw std::invalid_argument("switch schedule: levels must have exactly one more entry than switch_times");
  }
  for (std::size_t k = 1; k < s.switch_times.size(); ++k) {
    if (!(s.switch_times[k] > s.switch_times[k - 1])) {
      throw std::invalid_argument("switch schedule: switch_times must be strictly increasing");
    }
  }
}

inline double eval_schedule(const CoefficientSchedule& schedule, double t) {
  struct Visitor {
    double t;
    double operator()(const ConstantSchedule& s) const { return s.value; }
    double operator()(const SigmoidSchedule& s) const {
      return s.offset + s.amplitude / (1.0 + std::exp(-s.slope * (t - s.center)));
    }
    double operator()(const SwitchSchedule& s) const {
      std::size_t k = 0;
      while (k < s.switch_times.size() && t >= s.switch_times[k]) ++k;
      return s.levels[k];
    }
    double operator()(const SinusoidSchedule& s) const {
      return s.offset + s.amplitude * std::sin(s.frequency * t + s.phase);
    }
    double operator()(const FourierSchedule& s) const {
      double v = s.offset;
      for (const auto& term : s.terms) v += term.amplitude * std::sin(term.frequency * t + term.phase);
      return v;
    }
  };
  return std::visit(Visitor{t}, schedule);
}

/// Schedule for -f(t). Used to express ground-truth coefficients that enter an
/// equation with a sign flip (e.g. the -sigma*x term of the Lorenz system).
inline CoefficientSchedule negated(const CoefficientSchedule& schedule) {
  struct Visitor {
    CoefficientSchedule operator()(ConstantSchedule s) const {
      s.value = -s.value;
      return s;
    }
    CoefficientSchedule operator()(SigmoidSchedule s) const {
      s.offset = -s.offset;
      s.amplitude = -s.amplitude;
      return s;
    }
    CoefficientSchedule operator()(SwitchSchedule s) const {
      for (auto& v : s.levels) v = -v;
      return s;
    }
    CoefficientSchedule operator()(SinusoidSchedule s) const {
      s.offset = -s.offset;
      s.amplitude = -s.amplitude;
      return s;
    }
    CoefficientSchedule operator()(FourierSchedule s) const {
      s.offset = -s.offset;
      for (auto& term : s.terms) term.amplitude = -term.amplitude;
      return s;
    }
  };
  return std::visit(Visitor{}, schedule);
}

/// Samples the schedule on a time grid.
inline Vector sample_schedule(const CoefficientSchedule& schedule, const Vector& times) {
  Vector out(times.size());
  for (Index k = 0; k < times.size(); ++k) out[k] = eval_schedule(schedule, times[k]);
  return out;
}

}  // namespace dynsindy
