#pragma once

// Closed-form Jumarie derivative rules and a discretized derivative oracle.
//
// For 0 < alpha < 1 the Jumarie derivative of f is the Riemann-Liouville
// derivative of f - f(0), which for continuously differentiable f equals the
// Caputo derivative. The oracle discretizes the Caputo form by product
// integration against piecewise-quadratic interpolants of f, plus
// starting-weight corrections that make it exact for t, t^2 and the
// t^{k alpha} powers below 3. Functions of the form g(t^alpha) (all solutions
// produced by this library) are then resolved at better than O(h^{2-alpha})
// uniformly up to t = 0. At alpha = 1 the oracle is the classical derivative.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace fracsys {

/// Uniform samples f(t0 + j h), j = 0..n-1.
struct SampledFunction {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> values;
  /// Set on oracle output when values[0] was obtained by extrapolation.
  bool head_extrapolated = false;

  std::size_t size() const { return values.size(); }
  double abscissa(std::size_t j) const { return t0 + static_cast<double>(j) * h; }
  void validate() const;
};

/// Grid [0, t_max] with step h.
struct UniformGrid {
  double t_max = 1.0;
  double h = 1e-3;

  std::size_t nodes() const;
  void validate() const;
};

SampledFunction sample(const std::function<double(double)>& f, const UniformGrid& grid);

/// The term coefficient * t^{exponent_multiple * alpha}.
struct PowerTerm {
  double coefficient = 1.0;
  int exponent_multiple = 0;
};

/// Gamma(n alpha + 1) / Gamma((n - 1) alpha + 1).
double power_rule_coefficient(double alpha, int n);

/// D^alpha applied to a PowerTerm; constants map to the zero term.
PowerTerm apply_power_rule(double alpha, const PowerTerm& term);

/// Sampled D^alpha f on the same grid; alpha in (0, 1].
SampledFunction jumarie_oracle(const SampledFunction& f, double alpha);

/// D^alpha applied `times` times in sequence.
SampledFunction jumarie_oracle_composed(const SampledFunction& f, double alpha, int times);

/// Result of comparing the oracle on a grid and on its 2x refinement.
struct ConvergenceCheck {
  double max_change = 0.0;
  bool too_coarse = false;
};

/// Runs the oracle on f with steps h and h/2 and compares on the common
/// nodes (node 0 excluded). too_coarse is set when the change exceeds
/// 10 * tol.
ConvergenceCheck oracle_convergence(const std::function<double(double)>& f, double alpha,
                                    const UniformGrid& grid, double tol);

/// sup over nodes 1..n-1 of |oracle(E_a(a t^a)) - a E_a(a t^a)|.
double ml_eigen_check(double alpha, double a, const UniformGrid& grid);

struct TrigDeviation {
  double sin_deviation = 0.0;  // |D sin_a - cos_a|
  double cos_deviation = 0.0;  // |D cos_a + sin_a|
};

TrigDeviation trig_derivative_check(double alpha, const UniformGrid& grid);

/// sup over nodes 1..n-1 of |a_j - b_j|.
double max_interior_deviation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fracsys
