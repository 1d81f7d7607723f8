#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>

#include "dynsindy/common.hpp"
#include "dynsindy/schedule.hpp"

namespace dynsindy {

// Benchmark systems. Time enters only through coefficient schedules, never
// mixed into the state nonlinearly.

/// dx/dt = A(t) y,  dy/dt = B(t) x
struct HarmonicOscillator {
  CoefficientSchedule A = ConstantSchedule{1.0};
  CoefficientSchedule B = ConstantSchedule{-1.0};
};

/// dx/dt = sigma(t)(y - x),  dy/dt = x(rho(t) - z) - y,  dz/dt = xy - beta(t) z
struct Lorenz {
  CoefficientSchedule sigma = ConstantSchedule{10.0};
  CoefficientSchedule rho = ConstantSchedule{28.0};
  CoefficientSchedule beta = ConstantSchedule{8.0 / 3.0};
};

/// dx/dt = alpha x - beta xy,  dy/dt = -gamma y + delta xy
struct LotkaVolterra {
  double alpha = 1.0;
  double beta = 0.5;
  double gamma = 1.0;
  double delta = 0.2;
};

/// dx/dt = y,  dy/dt = a3 x^3 + a2 x^2 + a1 x + ay y + u(t)
struct CubicControl {
  double a3 = -0.002;
  double a2 = 0.0087;
  double a1 = 0.05;
  double ay = -0.22;
  CoefficientSchedule u = ConstantSchedule{0.0};
};

using SystemSpec = std::variant<HarmonicOscillator, Lorenz, LotkaVolterra, CubicControl>;

inline int state_dim(const SystemSpec& spec) {
  struct Visitor {
    int operator()(const HarmonicOscillator&) const { return 2; }
    int operator()(const Lorenz&) const { return 3; }
    int operator()(const LotkaVolterra&) const { return 2; }
    int operator()(const CubicControl&) const { return 2; }
  };
  return std::visit(Visitor{}, spec);
}

inline Vector system_rhs(const SystemSpec& spec, const Vector& x, double t) {
  struct Visitor {
    const Vector& x;
    double t;
    Vector operator()(const HarmonicOscillator& s) const {
      Vector dx(2);
      dx[0] = eval_schedule(s.A, t) * x[1];
      dx[1] = eval_schedule(s.B, t) * x[0];
      return dx;
    }
    Vector operator()(const Lorenz& s) const {
      Vector dx(3);
      dx[0] = eval_schedule(s.sigma, t) * (x[1] - x[0]);
      dx[1] = x[0] * (eval_schedule(s.rho, t) - x[2]) - x[1];
      dx[2] = x[0] * x[1] - eval_schedule(s.beta, t) * x[2];
      return dx;
    }
    Vector operator()(const LotkaVolterra& s) const {
      Vector dx(2);
      dx[0] = s.alpha * x[0] - s.beta * x[0] * x[1];
      dx[1] = -s.gamma * x[1] + s.delta * x[0] * x[1];
      return dx;
    }
    Vector operator()(const CubicControl& s) const {
      Vector dx(2);
      dx[0] = x[1];
      dx[1] = s.a3 * x[0] * x[0] * x[0] + s.a2 * x[0] * x[0] + s.a1 * x[0] + s.ay * x[1] +
              eval_schedule(s.u, t);
      return dx;
    }
  };
  return std::visit(Visitor{x, t}, spec);
}

/// Ground-truth coefficient schedules keyed by (equation index, library term
/// name). Term names follow the library naming convention ("x0", "x0*x1", ...).
using GroundTruthMap = std::map<std::pair<int, std::string>, CoefficientSchedule>;

inline GroundTruthMap ground_truth_map(const SystemSpec& spec) {
  struct Visitor {
    GroundTruthMap operator()(const HarmonicOscillator& s) const {
      return {{{0, "x1"}, s.A}, {{1, "x0"}, s.B}};
    }
    GroundTruthMap operator()(const Lorenz& s) const {
      return {{{0, "x1"}, s.sigma},
              {{0, "x0"}, negated(s.sigma)},
              {{1, "x0"}, s.rho},
              {{1, "x0*x2"}, ConstantSchedule{-1.0}},
              {{1, "x1"}, ConstantSchedule{-1.0}},
              {{2, "x0*x1"}, ConstantSchedule{1.0}},
              {{2, "x2"}, negated(s.beta)}};
    }
    GroundTruthMap operator()(const LotkaVolterra& s) const {
      return {{{0, "x0"}, ConstantSchedule{s.alpha}},
              {{0, "x0*x1"}, ConstantSchedule{-s.beta}},
              {{1, "x1"}, ConstantSchedule{-s.gamma}},
              {{1, "x0*x1"}, ConstantSchedule{s.delta}}};
    }
    GroundTruthMap operator()(const CubicControl& s) const {
      return {{{0, "x1"}, ConstantSchedule{1.0}},
              {{1, "x0^3"}, ConstantSchedule{s.a3}},
              {{1, "x0^2"}, ConstantSchedule{s.a2}},
              {{1, "x0"}, ConstantSchedule{s.a1}},
              {{1, "x1"}, ConstantSchedule{s.ay}},
              {{1, "1"}, s.u}};
    }
  };
  return std::visit(Visitor{}, spec);
}

}  // namespace dynsindy
