#pragma once

// Closed-form solutions of D^alpha X = A X for a real 2x2 matrix A.
//
// Every solution is a short list of terms
//   Re( coef * (t^alpha)^poly_n * E_alpha(rate * t^alpha) ) * trig(q t^alpha)
// where trig is 1, cos_alpha or sin_alpha. The integration constants are
// fitted from X(0) by a 2x2 linear solve.

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "fracsys/special_functions.hpp"

namespace fracsys {

struct SystemSpec {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double alpha = 1.0;
  double x0 = 0.0, y0 = 0.0;

  void validate() const;
};

struct DistinctReal {
  double lambda1 = 0.0;  // lambda1 < lambda2
  double lambda2 = 0.0;
};

struct Repeated {
  double lambda = 0.0;
  bool defective = true;
};

struct ComplexPair {
  double p = 0.0;
  double q = 0.0;  // q > 0
};

using EigenClassification = std::variant<DistinctReal, Repeated, ComplexPair>;

enum class SolutionMode { ComplexExact, PaperFactored };
enum class TrigFactor { None, Cos, Sin };

using ComplexVec2 = std::array<ComplexValue, 2>;

struct SolutionTerm {
  ComplexVec2 vec{};
  ComplexValue rate{};
  int poly_n = 0;
  TrigFactor trig = TrigFactor::None;
  double q = 0.0;
};

struct AnalyticSolution {
  std::vector<SolutionTerm> terms;
  double alpha = 1.0;
  SolutionMode mode = SolutionMode::ComplexExact;
  EigenClassification classification;
  /// c1, c2 for real cases; M, N for the complex pair.
  std::array<double, 2> constants{};
  /// Basis vectors: the two eigenvectors, or (v, u) for a defective root, or
  /// (v, 0) for a complex pair with v = (b, lambda - a).
  std::array<ComplexVec2, 2> vectors{};
};

struct StatePoint {
  double x = 0.0;
  double y = 0.0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return t.size(); }
};

struct ResidualReport {
  double t_max = 0.0;
  double h = 0.0;
  std::size_t nodes = 0;
  SolutionMode mode = SolutionMode::ComplexExact;
  double residual_x = 0.0;
  double residual_y = 0.0;
  /// Same residual on the grid with step h / 2.
  double refined_residual = 0.0;
  /// The residual does not decrease under refinement: the closed form is not
  /// an exact solution under the discretized operator.
  bool floor_detected = false;
  /// Refinement moved the oracle output by more than 10 * tol * max(1, sup |X|).
  bool too_coarse = false;

  double residual() const { return residual_x > residual_y ? residual_x : residual_y; }
};

/// Relative size of the discriminant below which the roots are treated as equal.
inline constexpr double kTieTolerance = 1e-10;

EigenClassification classify(const SystemSpec& spec);

AnalyticSolution solve_system(const SystemSpec& spec,
                              SolutionMode mode = SolutionMode::ComplexExact);

StatePoint eval_solution(const AnalyticSolution& sol, double t);

/// n_steps samples on [0, t_max], both ends included.
Trajectory sample_trajectory(const AnalyticSolution& sol, double t_max, std::size_t n_steps);

ResidualReport verify_residual(const SystemSpec& spec, const AnalyticSolution& sol,
                               double t_max, double h, double tol = 1e-2);

std::string to_string(SolutionMode mode);
std::string describe(const EigenClassification& cls);
std::string describe(const AnalyticSolution& sol);

}  // namespace fracsys
