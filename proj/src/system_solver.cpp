#include "fracsys/system_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "fracsys/errors.hpp"
#include "fracsys/fractional_operators.hpp"

namespace fracsys {
namespace {

double scale_of(const SystemSpec& s) {
  return std::abs(s.a) + std::abs(s.b) + std::abs(s.c) + std::abs(s.d);
}

// Kernel vector of the rank-one matrix [[r00, r01], [r10, r11]], taken from
// the row with the larger norm.
std::array<double, 2> kernel_vector(double r00, double r01, double r10, double r11) {
  const double n0 = std::hypot(r00, r01);
  const double n1 = std::hypot(r10, r11);
  if (n0 >= n1) return {-r01, r00};
  return {-r11, r10};
}

// Unit max-norm, first nonzero component positive.
std::array<double, 2> normalize(std::array<double, 2> v) {
  const double m = std::max(std::abs(v[0]), std::abs(v[1]));
  if (m == 0.0) throw SingularSystemError("zero eigenvector");
  v[0] /= m;
  v[1] /= m;
  const double lead = v[0] != 0.0 ? v[0] : v[1];
  if (lead < 0.0) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
  return v;
}

// Solves [[p0, q0], [p1, q1]] (c1, c2) = (r0, r1).
std::array<double, 2> solve_2x2(const std::array<double, 2>& p, const std::array<double, 2>& q,
                                double r0, double r1) {
  const double det = p[0] * q[1] - q[0] * p[1];
  const double size = (std::abs(p[0]) + std::abs(p[1])) * (std::abs(q[0]) + std::abs(q[1]));
  if (!(std::abs(det) > 1e-14 * size)) {
    std::ostringstream os;
    os << std::setprecision(17) << "basis at t = 0 is singular: columns (" << p[0] << ", "
       << p[1] << ") and (" << q[0] << ", " << q[1] << "), determinant " << det;
    throw SingularSystemError(os.str());
  }
  return {(r0 * q[1] - q[0] * r1) / det, (p[0] * r1 - r0 * p[1]) / det};
}

ComplexVec2 to_complex(const std::array<double, 2>& v) { return {v[0], v[1]}; }

SolutionTerm real_term(const std::array<double, 2>& v, double coef, double rate, int poly_n) {
  SolutionTerm term;
  term.vec = {coef * v[0], coef * v[1]};
  term.rate = rate;
  term.poly_n = poly_n;
  return term;
}

void solve_distinct(const SystemSpec& s, const DistinctReal& r, AnalyticSolution& sol) {
  const auto v1 = normalize(kernel_vector(s.a - r.lambda1, s.b, s.c, s.d - r.lambda1));
  const auto v2 = normalize(kernel_vector(s.a - r.lambda2, s.b, s.c, s.d - r.lambda2));
  const auto c = solve_2x2(v1, v2, s.x0, s.y0);
  sol.constants = c;
  sol.vectors = {to_complex(v1), to_complex(v2)};
  sol.terms = {real_term(v1, c[0], r.lambda1, 0), real_term(v2, c[1], r.lambda2, 0)};
}

void solve_repeated(const SystemSpec& s, const Repeated& r, AnalyticSolution& sol) {
  const double lam = r.lambda;
  if (!r.defective) {
    sol.constants = {s.x0, s.y0};
    sol.vectors = {ComplexVec2{1.0, 0.0}, ComplexVec2{0.0, 1.0}};
    sol.terms = {real_term({1.0, 0.0}, s.x0, lam, 0), real_term({0.0, 1.0}, s.y0, lam, 0)};
    return;
  }
  const double n[2][2] = {{s.a - lam, s.b}, {s.c, s.d - lam}};
  const auto v = normalize(kernel_vector(n[0][0], n[0][1], n[1][0], n[1][1]));

  // (A - lambda I) u = Gamma(1 + alpha) v with u zero where |v| is largest
  // (ties: the second coordinate).
  const std::size_t fixed = std::abs(v[0]) > std::abs(v[1]) ? 0 : 1;
  const std::size_t free = 1 - fixed;
  const std::size_t row = std::abs(n[0][free]) >= std::abs(n[1][free]) ? 0 : 1;
  if (n[row][free] == 0.0) throw SingularSystemError("generalized eigenvector does not exist");
  std::array<double, 2> u{};
  u[free] = fracsys::gamma(1.0 + s.alpha) * v[row] / n[row][free];

  const auto c = solve_2x2(v, u, s.x0, s.y0);
  sol.constants = c;
  sol.vectors = {to_complex(v), to_complex(u)};
  // c1 v E + c2 (v t^alpha + u) E
  SolutionTerm head;
  head.vec = {c[0] * v[0] + c[1] * u[0], c[0] * v[1] + c[1] * u[1]};
  head.rate = lam;
  sol.terms = {head, real_term(v, c[1], lam, 1)};
}

void solve_complex(const SystemSpec& s, const ComplexPair& r, SolutionMode mode,
                   AnalyticSolution& sol) {
  const ComplexValue lam(r.p, r.q);
  const ComplexVec2 v{s.b, lam - s.a};
  // X = M Re[v E] + N Im[v E] = Re[(M - iN) v E]
  const auto mn = solve_2x2({v[0].real(), v[1].real()}, {v[0].imag(), v[1].imag()}, s.x0, s.y0);
  sol.constants = mn;
  sol.vectors = {v, ComplexVec2{}};
  const ComplexValue k(mn[0], -mn[1]);
  const ComplexVec2 w{k * v[0], k * v[1]};

  if (mode == SolutionMode::ComplexExact) {
    SolutionTerm term;
    term.vec = w;
    term.rate = lam;
    sol.terms = {term};
    return;
  }
  // E(p t^a) [Re(w) cos_a(q t^a) - Im(w) sin_a(q t^a)]
  SolutionTerm cos_term;
  cos_term.vec = {w[0].real(), w[1].real()};
  cos_term.rate = r.p;
  cos_term.trig = TrigFactor::Cos;
  cos_term.q = r.q;
  SolutionTerm sin_term;
  sin_term.vec = {-w[0].imag(), -w[1].imag()};
  sin_term.rate = r.p;
  sin_term.trig = TrigFactor::Sin;
  sin_term.q = r.q;
  sol.terms = {cos_term, sin_term};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string fmt(ComplexValue z) {
  if (z.imag() == 0.0) return fmt(z.real());
  std::ostringstream os;
  os << std::setprecision(12) << z.real() << (z.imag() < 0 ? " - " : " + ")
     << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

void SystemSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  for (double v : {a, b, c, d, x0, y0}) {
    if (!std::isfinite(v)) throw DomainError("system entries and initial values must be finite");
  }
}

EigenClassification classify(const SystemSpec& spec) {
  spec.validate();
  const double tr = spec.a + spec.d;
  const double disc = (spec.a - spec.d) * (spec.a - spec.d) + 4.0 * spec.b * spec.c;
  const double scale = scale_of(spec) + 1.0;
  const double tie = kTieTolerance * scale * scale;

  if (std::abs(disc) <= tie) {
    const bool scalar = std::abs(spec.b) <= tie && std::abs(spec.c) <= tie &&
                        std::abs(spec.a - spec.d) <= std::sqrt(tie);
    return Repeated{0.5 * tr, !scalar};
  }
  if (disc > 0.0) {
    // Avoid cancellation in the smaller-magnitude root.
    const double sq = std::sqrt(disc);
    const double big = 0.5 * (tr + std::copysign(sq, tr));
    const double det = spec.a * spec.d - spec.b * spec.c;
    const double other = big != 0.0 ? det / big : 0.5 * (tr - std::copysign(sq, tr));
    return DistinctReal{std::min(big, other), std::max(big, other)};
  }
  return ComplexPair{0.5 * tr, 0.5 * std::sqrt(-disc)};
}

AnalyticSolution solve_system(const SystemSpec& spec, SolutionMode mode) {
  AnalyticSolution sol;
  sol.alpha = spec.alpha;
  sol.mode = mode;
  sol.classification = classify(spec);
  std::visit(
      [&](const auto& cls) {
        using T = std::decay_t<decltype(cls)>;
        if constexpr (std::is_same_v<T, DistinctReal>) {
          solve_distinct(spec, cls, sol);
        } else if constexpr (std::is_same_v<T, Repeated>) {
          solve_repeated(spec, cls, sol);
        } else {
          solve_complex(spec, cls, mode, sol);
        }
      },
      sol.classification);
  return sol;
}

StatePoint eval_solution(const AnalyticSolution& sol, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("solution is defined for t >= 0");
  const double ta = std::pow(t, sol.alpha);
  StatePoint out;
  // Terms of one solution share at most two rates; reuse the previous value.
  ComplexValue last_rate(NAN, NAN);
  ComplexValue last_e;
  for (const auto& term : sol.terms) {
    if (term.rate != last_rate) {
      last_e = term.rate.imag() == 0.0 ? ComplexValue(ml_one(sol.alpha, term.rate.real() * ta))
                                       : ml_one(sol.alpha, term.rate * ta);
      last_rate = term.rate;
    }
    ComplexValue e = last_e;
    if (term.poly_n == 1) e *= ta;
    double trig = 1.0;
    if (term.trig == TrigFactor::Cos) trig = cos_alpha_of(sol.alpha, term.q * ta);
    if (term.trig == TrigFactor::Sin) trig = sin_alpha_of(sol.alpha, term.q * ta);
    out.x += (term.vec[0] * e).real() * trig;
    out.y += (term.vec[1] * e).real() * trig;
  }
  return out;
}

Trajectory sample_trajectory(const AnalyticSolution& sol, double t_max, std::size_t n_steps) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("t_max must be > 0");
  if (n_steps < 2) throw DomainError("a trajectory needs at least 2 samples");
  Trajectory tr;
  tr.t.resize(n_steps);
  tr.x.resize(n_steps);
  tr.y.resize(n_steps);
  const double h = t_max / static_cast<double>(n_steps - 1);
  for (std::size_t j = 0; j < n_steps; ++j) {
    const double t = j + 1 == n_steps ? t_max : static_cast<double>(j) * h;
    const auto p = eval_solution(sol, t);
    tr.t[j] = t;
    tr.x[j] = p.x;
    tr.y[j] = p.y;
  }
  return tr;
}

ResidualReport verify_residual(const SystemSpec& spec, const AnalyticSolution& sol, double t_max,
                               double h, double tol) {
  spec.validate();
  const UniformGrid coarse_grid{t_max, h};
  coarse_grid.validate();
  const UniformGrid fine_grid{t_max, h / 2.0};
  const std::size_t n_fine = fine_grid.nodes();

  SampledFunction xf{0.0, h / 2.0, std::vector<double>(n_fine)};
  SampledFunction yf{0.0, h / 2.0, std::vector<double>(n_fine)};
  double size = 1.0;
  for (std::size_t j = 0; j < n_fine; ++j) {
    const auto p = eval_solution(sol, xf.abscissa(j));
    xf.values[j] = p.x;
    yf.values[j] = p.y;
    size = std::max({size, std::abs(p.x), std::abs(p.y)});
  }
  SampledFunction xc{0.0, h, {}};
  SampledFunction yc{0.0, h, {}};
  for (std::size_t j = 0; j < n_fine; j += 2) {
    xc.values.push_back(xf.values[j]);
    yc.values.push_back(yf.values[j]);
  }

  struct Level {
    double rx = 0.0, ry = 0.0;
    SampledFunction dx, dy;
  };
  auto residual = [&](const SampledFunction& x, const SampledFunction& y) {
    Level lv;
    lv.dx = jumarie_oracle(x, spec.alpha);
    lv.dy = jumarie_oracle(y, spec.alpha);
    std::vector<double> fx(x.size()), fy(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      fx[j] = spec.a * x.values[j] + spec.b * y.values[j];
      fy[j] = spec.c * x.values[j] + spec.d * y.values[j];
    }
    lv.rx = max_interior_deviation(lv.dx.values, fx);
    lv.ry = max_interior_deviation(lv.dy.values, fy);
    return lv;
  };
  const Level c = residual(xc, yc);
  const Level f = residual(xf, yf);

  ResidualReport rep;
  rep.t_max = t_max;
  rep.h = h;
  rep.nodes = xc.size();
  rep.mode = sol.mode;
  rep.residual_x = c.rx;
  rep.residual_y = c.ry;
  rep.refined_residual = std::max(f.rx, f.ry);
  const double coarse = rep.residual();
  rep.floor_detected = rep.refined_residual > 0.8 * coarse && coarse > 1e-9 * size;
  double change = 0.0;
  for (std::size_t j = 1; j < xc.size(); ++j) {
    change = std::max({change, std::abs(c.dx.values[j] - f.dx.values[2 * j]),
                       std::abs(c.dy.values[j] - f.dy.values[2 * j])});
  }
  rep.too_coarse = change > 10.0 * tol * std::max(1.0, size);
  return rep;
}

std::string to_string(SolutionMode mode) {
  return mode == SolutionMode::ComplexExact ? "complex-exact" : "paper-factored";
}

std::string describe(const EigenClassification& cls) {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, DistinctReal>) {
          return "distinct real: lambda1 = " + fmt(c.lambda1) + ", lambda2 = " + fmt(c.lambda2);
        } else if constexpr (std::is_same_v<T, Repeated>) {
          return "repeated: lambda = " + fmt(c.lambda) +
                 (c.defective ? " (defective)" : " (diagonalizable)");
        } else {
          return "complex pair: p = " + fmt(c.p) + ", q = " + fmt(c.q);
        }
      },
      cls);
}

std::string describe(const AnalyticSolution& sol) {
  std::ostringstream os;
  os << "classification: " << describe(sol.classification) << "\n";
  os << "alpha: " << fmt(sol.alpha) << "\n";
  os << "mode: " << to_string(sol.mode) << "\n";
  const bool cplx = std::holds_alternative<ComplexPair>(sol.classification);
  os << (cplx ? "M = " : "c1 = ") << fmt(sol.constants[0]) << ", "
     << (cplx ? "N = " : "c2 = ") << fmt(sol.constants[1]) << "\n";
  for (const auto& term : sol.terms) {
    os << "term: (" << fmt(term.vec[0]) << ", " << fmt(term.vec[1]) << ")";
    if (term.poly_n == 1) os << " t^alpha";
    os << " E_alpha((" << fmt(term.rate) << ") t^alpha)";
    if (term.trig == TrigFactor::Cos) os << " cos_alpha(" << fmt(term.q) << " t^alpha)";
    if (term.trig == TrigFactor::Sin) os << " sin_alpha(" << fmt(term.q) << " t^alpha)";
    os << "\n";
  }
  return os.str();
}

}  // namespace fracsys
