#include "fracsys/oscillator.hpp"

#include <cmath>

#include "fracsys/errors.hpp"
#include "fracsys/fractional_operators.hpp"

namespace fracsys {

void OscillatorSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  for (double v : {a, b, x0, dx0}) {
    if (!std::isfinite(v)) throw DomainError("oscillator parameters must be finite");
  }
}

SystemSpec reduce_to_system(const OscillatorSpec& spec) {
  spec.validate();
  SystemSpec s;
  s.a = 0.0;
  s.b = 1.0;
  s.c = -spec.b;
  s.d = -2.0 * spec.a;
  s.alpha = spec.alpha;
  s.x0 = spec.x0;
  s.y0 = spec.dx0;
  return s;
}

AnalyticSolution solve_oscillator(const OscillatorSpec& spec, SolutionMode mode) {
  return solve_system(reduce_to_system(spec), mode);
}

double oscillator_residual(const OscillatorSpec& spec, const AnalyticSolution& sol,
                           double t_max, double h) {
  spec.validate();
  const auto x = sample([&](double t) { return eval_solution(sol, t).x; }, {t_max, h});
  const auto d1 = jumarie_oracle(x, spec.alpha);
  const auto d2 = jumarie_oracle(d1, spec.alpha);
  double worst = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    const double r = d2.values[j] + 2.0 * spec.a * d1.values[j] + spec.b * x.values[j];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace fracsys
