#include <gtest/gtest.h>

#include <cmath>

#include "fracsys/fractional_operators.hpp"
#include "fracsys/oscillator.hpp"

using namespace fracsys;

namespace {

std::vector<double> peak_amplitudes(const Trajectory& tr) {
  std::vector<double> peaks;
  for (std::size_t j = 1; j + 1 < tr.size(); ++j) {
    const double m = std::abs(tr.x[j]);
    if (!(m > std::abs(tr.x[j - 1]) && m >= std::abs(tr.x[j + 1]))) continue;
    // vertex of the parabola through the three samples
    const double l = std::abs(tr.x[j - 1]), r = std::abs(tr.x[j + 1]);
    const double curv = l - 2 * m + r;
    peaks.push_back(curv < 0 ? m - (r - l) * (r - l) / (8 * curv) : m);
  }
  return peaks;
}

int sign_changes(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t j = 1; j < v.size(); ++j) n += (v[j - 1] < 0) != (v[j] < 0);
  return n;
}

}  // namespace

TEST(Reduce, MatrixForm) {
  const auto s = reduce_to_system({0.1, 2.0, 0.6, 2.0, 1.0});
  EXPECT_EQ(s.a, 0.0);
  EXPECT_EQ(s.b, 1.0);
  EXPECT_EQ(s.c, -2.0);
  EXPECT_NEAR(s.d, -0.2, 1e-15);
  EXPECT_EQ(s.alpha, 0.6);
  EXPECT_EQ(s.x0, 2.0);
  EXPECT_EQ(s.y0, 1.0);
  const auto z = reduce_to_system({0.0, 0.0, 0.5, 1.0, 0.0});
  EXPECT_EQ(z.a, 0.0);
  EXPECT_EQ(z.b, 1.0);
  EXPECT_EQ(z.c, 0.0);
  EXPECT_EQ(z.d, 0.0);
}

TEST(Reduce, OverdampedRoots) {
  const auto r = std::get<DistinctReal>(classify(reduce_to_system({2.0, 1.0, 0.5, 1.0, 0.0})));
  EXPECT_NEAR(r.lambda1, -2.0 - std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(r.lambda2, -2.0 + std::sqrt(3.0), 1e-14);
}

TEST(Solve, UndampedClassical) {
  const auto sol = solve_oscillator({0.0, 2.0, 1.0, 2.0, 1.0});
  const double w = std::sqrt(2.0);
  for (double t = 0.0; t <= 10.0; t += 0.25) {
    EXPECT_NEAR(eval_solution(sol, t).x, 2 * std::cos(w * t) + std::sin(w * t) / w, 1e-10) << t;
  }
}

TEST(Solve, UnderdampedConstants) {
  const OscillatorSpec spec{0.1, 2.0, 0.7, 2.0, 1.0};
  const auto sol = solve_oscillator(spec, SolutionMode::PaperFactored);
  const auto& c = std::get<ComplexPair>(sol.classification);
  EXPECT_NEAR(c.p, -0.1, 1e-15);
  EXPECT_NEAR(c.q, std::sqrt(1.99), 1e-15);
  EXPECT_NEAR(c.q, 1.41067, 1e-5);
  const double c1 = spec.x0, c2 = (spec.dx0 - c.p * spec.x0) / c.q;
  EXPECT_NEAR(sol.constants[0], c1, 1e-14);
  EXPECT_NEAR(sol.constants[1], c2, 1e-14);
  // x = E(p t^a) [C1 cos + C2 sin]
  EXPECT_NEAR(sol.terms[0].vec[0].real(), c1, 1e-14);
  EXPECT_NEAR(sol.terms[1].vec[0].real(), c2, 1e-14);
}

TEST(Solve, CriticalDampingIsRepeated) {
  for (double a : {0.3, 1.0}) {
    const auto r = std::get<Repeated>(solve_oscillator({1.0, 1.0, a, 2.0, 1.0}).classification);
    EXPECT_EQ(r.lambda, -1.0);
    EXPECT_TRUE(r.defective);
  }
}

TEST(Residual, ClassicalDampedOscillator) {
  const OscillatorSpec spec{0.1, 2.0, 1.0, 2.0, 1.0};
  EXPECT_LE(oscillator_residual(spec, solve_oscillator(spec), 10.0, 1e-3), 1e-4);
}

TEST(Residual, ConstantSolution) {
  const OscillatorSpec spec{0.0, 0.0, 0.6, 3.5, 0.0};
  const auto sol = solve_oscillator(spec);
  EXPECT_EQ(eval_solution(sol, 1.7).x, 3.5);
  EXPECT_EQ(oscillator_residual(spec, sol, 1.0, 1e-2), 0.0);
}

TEST(Residual, FractionalOscillatorConverges) {
  const OscillatorSpec spec{0.1, 2.0, 0.8, 2.0, 1.0};
  const auto sol = solve_oscillator(spec);
  const double coarse = oscillator_residual(spec, sol, 2.0, 2e-3);
  const double fine = oscillator_residual(spec, sol, 2.0, 1e-3);
  EXPECT_LE(fine, 1e-2);
  EXPECT_GE(coarse / fine, std::pow(2.0, 2.0 - 0.8) * 0.8);
}

TEST(Properties, AmplitudeDecays) {
  for (double damp : {0.05, 0.1, 0.4}) {
    const auto tr = sample_trajectory(solve_oscillator({damp, 2.0, 1.0, 2.0, 1.0}), 20.0, 4001);
    const auto peaks = peak_amplitudes(tr);
    ASSERT_GE(peaks.size(), 5u);
    for (std::size_t k = 1; k < peaks.size(); ++k) ASSERT_LT(peaks[k], peaks[k - 1]) << damp;
  }
}

TEST(Properties, UndampedEnergyConserved) {
  const double b = 2.0;
  const auto tr = sample_trajectory(solve_oscillator({0.0, b, 1.0, 2.0, 1.0}), 20.0, 2001);
  const double e0 = tr.x[0] * tr.x[0] + tr.y[0] * tr.y[0] / b;
  for (std::size_t j = 0; j < tr.size(); ++j) {
    ASSERT_NEAR(tr.x[j] * tr.x[j] + tr.y[j] * tr.y[j] / b, e0, 1e-6) << tr.t[j];
  }
  const auto peaks = peak_amplitudes(tr);
  for (double p : peaks) EXPECT_NEAR(p, peaks.front(), 1e-6);
}

TEST(Properties, SecondComponentIsTheDerivative) {
  const OscillatorSpec spec{0.1, 2.0, 0.7, 2.0, 1.0};
  const auto sol = solve_oscillator(spec);
  const auto x = sample([&](double t) { return eval_solution(sol, t).x; }, {2.0, 1e-3});
  const auto y = sample([&](double t) { return eval_solution(sol, t).y; }, {2.0, 1e-3});
  EXPECT_LE(max_interior_deviation(jumarie_oracle(x, 0.7).values, y.values), 5e-3);
}

TEST(Properties, LowOrderLosesOscillation) {
  const auto classical = sample_trajectory(solve_oscillator({0.1, 2.0, 1.0, 2.0, 1.0}), 20.0, 201);
  EXPECT_GE(sign_changes(classical.x), 8);
  const auto low = sample_trajectory(solve_oscillator({0.1, 2.0, 0.2, 2.0, 1.0}), 20.0, 201);
  EXPECT_EQ(sign_changes(low.x), 0);
  for (std::size_t j = 1; j < low.size(); ++j) ASSERT_LT(low.x[j], low.x[j - 1]);
}
