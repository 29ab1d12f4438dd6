#include "fracsys/fractional_operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracsys/errors.hpp"
#include "fracsys/special_functions.hpp"

namespace fracsys {
namespace {

// At most this many starting-weight corrections; beyond it the
// generalized Vandermonde system becomes too ill-conditioned to help.
constexpr std::size_t kMaxCorrections = 8;
constexpr double kSigmaBound = 3.0;

void check_order(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "fractional order must lie in (0, 1], got " << alpha;
    throw DomainError(os.str());
  }
}

// Classical derivative: fourth-order stencils, second-order when the grid
// is too short for them. Written on differences so constants give exactly 0.
std::vector<double> classical_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  // f[i] - f[j]
  auto df = [&](std::size_t i, std::size_t j) { return f[i] - f[j]; };
  if (n < 5) {
    d[0] = (4.0 * df(1, 0) - df(2, 0)) / (2.0 * h);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = df(j + 1, j - 1) / (2.0 * h);
    d[n - 1] = (-4.0 * df(n - 2, n - 1) + df(n - 3, n - 1)) / (2.0 * h);
    return d;
  }
  const double s = 12.0 * h;
  d[0] = (48.0 * df(1, 0) - 36.0 * df(2, 0) + 16.0 * df(3, 0) - 3.0 * df(4, 0)) / s;
  d[1] = (-3.0 * df(0, 1) + 18.0 * df(2, 1) - 6.0 * df(3, 1) + df(4, 1)) / s;
  for (std::size_t j = 2; j + 2 < n; ++j) {
    d[j] = (8.0 * df(j + 1, j - 1) - df(j + 2, j - 2)) / s;
  }
  const std::size_t m = n - 2;
  d[m] = (3.0 * df(m + 1, m) - 18.0 * df(m - 1, m) + 6.0 * df(m - 2, m) - df(m - 3, m)) / s;
  const std::size_t l = n - 1;
  d[l] = (-48.0 * df(l - 1, l) + 36.0 * df(l - 2, l) - 16.0 * df(l - 3, l) + 3.0 * df(l - 4, l)) / s;
  return d;
}

// Exponents of the correction basis t^sigma: the powers k*alpha below 2,
// plus 1 and 2 (the first interval is only linearly interpolated).
std::vector<double> correction_exponents(double alpha, std::size_t available) {
  std::vector<double> sigmas{1.0, 2.0};
  for (int k = 1; k * alpha < kSigmaBound - 1e-12; ++k) {
    const double s = k * alpha;
    if (std::abs(s - 1.0) > 1e-12 && std::abs(s - 2.0) > 1e-12) sigmas.push_back(s);
  }
  std::sort(sigmas.begin(), sigmas.end());
  sigmas.resize(std::min({sigmas.size(), kMaxCorrections, available}));
  return sigmas;
}

// Dense LU with partial pivoting for the small correction system.
class SmallLu {
 public:
  SmallLu(std::vector<long double> a, std::size_t n) : a_(std::move(a)), n_(n), piv_(n) {
    for (std::size_t c = 0; c < n_; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < n_; ++r) {
        if (std::abs(at(r, c)) > std::abs(at(p, c))) p = r;
      }
      piv_[c] = p;
      if (p != c) {
        for (std::size_t k = 0; k < n_; ++k) std::swap(at(p, k), at(c, k));
      }
      for (std::size_t r = c + 1; r < n_; ++r) {
        at(r, c) /= at(c, c);
        for (std::size_t k = c + 1; k < n_; ++k) at(r, k) -= at(r, c) * at(c, k);
      }
    }
  }

  void solve(long double* b) const {
    for (std::size_t c = 0; c < n_; ++c) {
      if (piv_[c] != c) std::swap(b[c], b[piv_[c]]);
    }
    for (std::size_t r = 1; r < n_; ++r) {
      for (std::size_t k = 0; k < r; ++k) b[r] -= at(r, k) * b[k];
    }
    for (std::size_t r = n_; r-- > 0;) {
      for (std::size_t k = r + 1; k < n_; ++k) b[r] -= at(r, k) * b[k];
      b[r] /= at(r, r);
    }
  }

 private:
  long double& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  long double at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

  std::vector<long double> a_;
  std::size_t n_;
  std::vector<std::size_t> piv_;
};

// Unit-step product-integration weights for the Caputo integral with
// f' taken from the quadratic through nodes j-2, j-1, j on every interval
// [j-1, j] with j >= 2, and from the secant on [0, 1]:
//   D f(n) ~ sum_{l=0}^{n-2} conv[l] (f_{n-l} - f_{n-l-1}) + first[n] (f_1 - f_0),
// before the factor h^{-alpha} / Gamma(2 - alpha).
template <typename R>
struct QuadraticWeights {
  std::vector<R> conv;
  std::vector<R> first;

  QuadraticWeights(double alpha, std::size_t count) : conv(count, 0), first(count, 0) {
    const R one_m = R(1) - R(alpha);
    const R two_m = R(2) - R(alpha);
    std::vector<R> secant(count), curvature(count);
    for (std::size_t l = 0; l < count; ++l) {
      const R x = static_cast<R>(l);
      if (l == 0) {
        secant[l] = 1;
        curvature[l] = R(0.5) - one_m / two_m;
      } else {
        // (l+1)^p - l^p without cancellation.
        secant[l] = std::pow(x, one_m) * std::expm1(one_m * std::log1p(1 / x));
        const R rise2 = std::pow(x, two_m) * std::expm1(two_m * std::log1p(1 / x));
        curvature[l] = (x + R(0.5)) * secant[l] - one_m / two_m * rise2;
      }
    }
    for (std::size_t l = 0; l < count; ++l) {
      conv[l] = secant[l] + curvature[l] - (l > 0 ? curvature[l - 1] : R(0));
    }
    first[1] = secant[0];
    for (std::size_t node = 2; node < count; ++node) {
      first[node] = secant[node - 1] - curvature[node - 2];
    }
  }
};

double extrapolate_head(const std::vector<double>& d, double alpha);

std::vector<double> fractional_derivative(const std::vector<double>& f, double h, double alpha) {
  const std::size_t n = f.size();
  const double scale = std::pow(h, -alpha) / gamma(2.0 - alpha);
  const QuadraticWeights<long double> w_ld(alpha, n);
  const std::vector<double> conv(w_ld.conv.begin(), w_ld.conv.end());

  std::vector<double> diff(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) diff[j] = f[j + 1] - f[j];

  std::vector<double> d(n, 0.0);
  for (std::size_t node = 1; node < n; ++node) {
    double acc = static_cast<double>(w_ld.first[node]) * diff[0];
    for (std::size_t l = 0; l + 1 < node; ++l) acc += conv[l] * diff[node - 1 - l];
    d[node] = scale * acc;
  }

  // Starting weights: for each node, weights on f_1..f_m - f_0 that make the
  // scheme exact for t^sigma, sigma in the correction basis. The unit-step
  // residuals rho are independent of h.
  const auto sigmas = correction_exponents(alpha, n - 1);
  const std::size_t m = sigmas.size();
  if (m == 0) return d;

  std::vector<long double> vander(m * m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      vander[k * m + j] = std::pow(static_cast<long double>(j + 1), (long double)sigmas[k]);
    }
  }
  const SmallLu lu(std::move(vander), m);

  const long double inv_g2 = 1.0L / static_cast<long double>(gamma(2.0 - alpha));
  std::vector<long double> dg((n - 1) * m);  // increments of j^sigma, interleaved
  std::vector<long double> exact_coef(m);
  for (std::size_t k = 0; k < m; ++k) {
    const long double s = sigmas[k];
    exact_coef[k] = static_cast<long double>(gamma(sigmas[k] + 1.0)) /
                    static_cast<long double>(gamma(sigmas[k] + 1.0 - alpha));
    for (std::size_t j = 0; j + 1 < n; ++j) {
      dg[j * m + k] = std::pow((long double)(j + 1), s) - std::pow((long double)j, s);
    }
  }

  std::vector<long double> acc(m);
  std::vector<long double> rho(m);
  const double h_alpha = std::pow(h, -alpha);
  for (std::size_t node = 1; node < n; ++node) {
    for (std::size_t k = 0; k < m; ++k) acc[k] = w_ld.first[node] * dg[k];
    for (std::size_t l = 0; l + 1 < node; ++l) {
      const long double c = w_ld.conv[l];
      const long double* g = &dg[(node - 1 - l) * m];
      for (std::size_t k = 0; k < m; ++k) acc[k] += c * g[k];
    }
    for (std::size_t k = 0; k < m; ++k) {
      const long double s = sigmas[k];
      rho[k] = exact_coef[k] * std::pow((long double)node, s - (long double)alpha) -
               inv_g2 * acc[k];
    }
    lu.solve(rho.data());
    long double corr = 0.0L;
    for (std::size_t j = 0; j < m; ++j) corr += rho[j] * (f[j + 1] - f[0]);
    d[node] += h_alpha * static_cast<double>(corr);
  }
  d[0] = extrapolate_head(d, alpha);
  return d;
}

// Node 0 is not reachable by the singular kernel; quadratic extrapolation
// in s = t^alpha from nodes 1..3.
double extrapolate_head(const std::vector<double>& d, double alpha) {
  const std::size_t p = std::min<std::size_t>(3, d.size() - 1);
  double head = 0.0;
  for (std::size_t j = 1; j <= p; ++j) {
    const double sj = std::pow(static_cast<double>(j), alpha);
    double w = 1.0;
    for (std::size_t i = 1; i <= p; ++i) {
      if (i == j) continue;
      const double si = std::pow(static_cast<double>(i), alpha);
      w *= -si / (sj - si);
    }
    head += w * d[j];
  }
  return head;
}

}  // namespace

void SampledFunction::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("sampled function needs step h > 0");
  if (values.size() < 3) throw DomainError("sampled function needs at least 3 samples");
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("sampled function contains non-finite values");
  }
}

std::size_t UniformGrid::nodes() const {
  return static_cast<std::size_t>(std::llround(t_max / h)) + 1;
}

void UniformGrid::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("grid needs t_max > 0");
  if (!(h > 0.0) || !(h <= t_max / 2.0)) throw DomainError("grid needs 0 < h <= t_max / 2");
}

SampledFunction sample(const std::function<double(double)>& f, const UniformGrid& grid) {
  grid.validate();
  SampledFunction out;
  out.t0 = 0.0;
  out.h = grid.h;
  const std::size_t n = grid.nodes();
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = f(out.abscissa(j));
  return out;
}

double power_rule_coefficient(double alpha, int n) {
  check_order(alpha);
  if (n < 1) throw DomainError("power rule needs n >= 1");
  return gamma(n * alpha + 1.0) / gamma((n - 1) * alpha + 1.0);
}

PowerTerm apply_power_rule(double alpha, const PowerTerm& term) {
  if (term.exponent_multiple < 0) throw DomainError("PowerTerm exponent must be >= 0");
  if (term.exponent_multiple == 0) return {0.0, 0};
  return {term.coefficient * power_rule_coefficient(alpha, term.exponent_multiple),
          term.exponent_multiple - 1};
}

SampledFunction jumarie_oracle(const SampledFunction& f, double alpha) {
  check_order(alpha);
  f.validate();
  SampledFunction out;
  out.t0 = f.t0;
  out.h = f.h;
  if (alpha == 1.0) {
    out.values = classical_derivative(f.values, f.h);
  } else {
    out.values = fractional_derivative(f.values, f.h, alpha);
    out.head_extrapolated = true;
  }
  return out;
}

SampledFunction jumarie_oracle_composed(const SampledFunction& f, double alpha, int times) {
  if (times < 1) throw DomainError("composition count must be >= 1");
  SampledFunction out = jumarie_oracle(f, alpha);
  for (int i = 1; i < times; ++i) out = jumarie_oracle(out, alpha);
  return out;
}

double max_interior_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t j = 1; j < n; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

ConvergenceCheck oracle_convergence(const std::function<double(double)>& f, double alpha,
                                    const UniformGrid& grid, double tol) {
  const auto coarse = jumarie_oracle(sample(f, grid), alpha);
  const auto fine = jumarie_oracle(sample(f, {grid.t_max, grid.h / 2.0}), alpha);
  ConvergenceCheck out;
  for (std::size_t j = 1; j < coarse.size() && 2 * j < fine.size(); ++j) {
    out.max_change = std::max(out.max_change, std::abs(coarse.values[j] - fine.values[2 * j]));
  }
  out.too_coarse = out.max_change > 10.0 * tol;
  return out;
}

double ml_eigen_check(double alpha, double a, const UniformGrid& grid) {
  check_order(alpha);
  const auto f = sample([&](double t) { return ml_one(alpha, a * std::pow(t, alpha)); }, grid);
  const auto d = jumarie_oracle(f, alpha);
  std::vector<double> expected(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) expected[j] = a * f.values[j];
  return max_interior_deviation(d.values, expected);
}

TrigDeviation trig_derivative_check(double alpha, const UniformGrid& grid) {
  check_order(alpha);
  const auto s = sample([&](double t) { return sin_frac(alpha, t); }, grid);
  const auto c = sample([&](double t) { return cos_frac(alpha, t); }, grid);
  const auto ds = jumarie_oracle(s, alpha);
  const auto dc = jumarie_oracle(c, alpha);
  std::vector<double> neg_s(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) neg_s[j] = -s.values[j];
  return {max_interior_deviation(ds.values, c.values), max_interior_deviation(dc.values, neg_s)};
}

}  // namespace fracsys
