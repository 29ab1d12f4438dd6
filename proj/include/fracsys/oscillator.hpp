#pragma once

// The damped oscillator D^{2 alpha} x + 2a D^alpha x + b x = 0, solved as the
// first-order system in (x, y = D^alpha x).

#include "fracsys/system_solver.hpp"

namespace fracsys {

struct OscillatorSpec {
  double a = 0.0;  // damping
  double b = 0.0;  // stiffness
  double alpha = 1.0;
  double x0 = 0.0;
  double dx0 = 0.0;  // D^alpha x at t = 0

  void validate() const;
};

/// Matrix [[0, 1], [-b, -2a]] with initial state (x0, dx0).
SystemSpec reduce_to_system(const OscillatorSpec& spec);

AnalyticSolution solve_oscillator(const OscillatorSpec& spec,
                                  SolutionMode mode = SolutionMode::ComplexExact);

/// sup over nodes 1..n-1 of |D^{2 alpha} x + 2a D^alpha x + b x| on [0, t_max],
/// with D^{2 alpha} taken as the oracle applied twice.
double oscillator_residual(const OscillatorSpec& spec, const AnalyticSolution& sol,
                           double t_max, double h);

}  // namespace fracsys
