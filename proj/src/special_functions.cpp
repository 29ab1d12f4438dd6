#include "fracsys/special_functions.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <initializer_list>
#include <sstream>
#include <deque>
#include <memory>
#include <vector>

#include <mpfr.h>

extern "C" {
#include <quadmath.h>
}

#include "fracsys/errors.hpp"

namespace fracsys {
namespace {

using quad = __float128;

// Precision-specific elementary functions.
template <typename R>
struct Prec;

template <>
struct Prec<long double> {
  static constexpr long double eps = LDBL_EPSILON;
  // Stirling's series is applied once the argument is shifted past this.
  static constexpr long double stirling_min = 20.0L;
  static long double log(long double x) { return std::log(x); }
  static long double exp(long double x) { return std::exp(x); }
  static long double cos(long double x) { return std::cos(x); }
  static long double sin(long double x) { return std::sin(x); }
  static long double sqrt(long double x) { return std::sqrt(x); }
  static long double atan2(long double y, long double x) { return std::atan2(y, x); }
  static long double half_log_two_pi() {
    return 0.918938533204672741780329736405617639861L;
  }
};

template <>
struct Prec<quad> {
  static constexpr quad eps = FLT128_EPSILON;
  static constexpr quad stirling_min = 40;
  static quad log(quad x) { return logq(x); }
  static quad exp(quad x) { return expq(x); }
  static quad cos(quad x) { return cosq(x); }
  static quad sin(quad x) { return sinq(x); }
  static quad sqrt(quad x) { return sqrtq(x); }
  static quad atan2(quad y, quad x) { return atan2q(y, x); }
  static quad half_log_two_pi() { return 0.5Q * logq(2 * M_PIq); }
};

template <typename R>
R abs_of(R x) {
  return x < 0 ? -x : x;
}

// B_{2n} / (2n (2n-1)) as exact fractions, n = 1..12.
constexpr double kStirlingNum[] = {1.0,          -1.0,     1.0,         -1.0,
                                   1.0,          -691.0,   1.0,         -3617.0,
                                   43867.0,      -174611.0, 77683.0,    -236364091.0};
constexpr double kStirlingDen[] = {12.0,        360.0,    1260.0,   1680.0,
                                   1188.0,      360360.0, 156.0,    122400.0,
                                   244188.0,    125400.0, 5796.0,   1506960.0};

// ln Gamma(x) for x > 0: upward shift then Stirling's series.
template <typename R>
R log_gamma_t(R x) {
  using P = Prec<R>;
  R prod = 1;
  while (x < P::stirling_min) {
    prod *= x;
    x += 1;
  }
  const R inv = 1 / x;
  const R inv2 = inv * inv;
  R series = 0;
  R pow = inv;
  for (int n = 0; n < 12; ++n) {
    series += (R(kStirlingNum[n]) / R(kStirlingDen[n])) * pow;
    pow *= inv2;
  }
  return (x - R(0.5)) * P::log(x) - x + P::half_log_two_pi() + series - P::log(prod);
}

constexpr double kAbsoluteFloor = 1e-26;

// A series of the form
//   sum_k s_k w^{n_k} / Gamma(beta + alpha n_k),   n_k = n0 + stride k,
// where s_k = (-1)^k when `alternate` is set. The argument w is either a
// complex number or u = x^alpha given through x.
struct SeriesRequest {
  double alpha = 1.0;
  double beta = 1.0;
  double re = 0.0;
  double im = 0.0;
  bool complex_arg = false;
  bool power_of_x = false;  // w = x^alpha with x stored in `re`
  int n0 = 0;
  int stride = 1;
  bool alternate = false;
};

template <typename R>
struct SeriesSum {
  R re = 0;
  R im = 0;
  R rounding = 0;
  R dropped = 0;
  int terms = 0;
};

class NeumaierSum {
 public:
  template <typename R>
  static void add(R& sum, R& comp, R value) {
    const R t = sum + value;
    if (abs_of(sum) >= abs_of(value)) {
      comp += (sum - t) + value;
    } else {
      comp += (value - t) + sum;
    }
    sum = t;
  }
};

[[noreturn]] void fail_nonconvergence(const SeriesRequest& req, const char* why) {
  std::ostringstream os;
  os << "Mittag-Leffler type series did not converge (" << why << ") for alpha=" << req.alpha
     << ", beta=" << req.beta << ", argument=(" << req.re << ", " << req.im << ")";
  throw NonConvergenceError(os.str());
}

// Smallest term index k past the magnitude hump n >= ceil(|w|^{1/alpha}).
long hump_index(const SeriesRequest& req, double abs_w_root) {
  const double n_hump = std::ceil(abs_w_root);
  if (!(n_hump < 1e9)) return std::numeric_limits<long>::max();
  const double k = std::ceil((n_hump - req.n0) / req.stride);
  return k < 0 ? 0 : static_cast<long>(k);
}

template <typename R>
SeriesSum<R> sum_series(const SeriesRequest& req, const SeriesControl& ctl) {
  using P = Prec<R>;
  bool zero_arg = false;
  R log_r = 0;
  R theta = 0;
  bool negative_real = false;
  double root;  // |w|^{1/alpha}
  if (req.power_of_x) {
    zero_arg = req.re == 0.0;
    if (!zero_arg) log_r = R(req.alpha) * P::log(R(req.re));
    root = req.re;
  } else if (req.complex_arg) {
    const R re = req.re, im = req.im;
    const R r = P::sqrt(re * re + im * im);
    zero_arg = r == 0;
    if (!zero_arg) {
      log_r = P::log(r);
      theta = P::atan2(im, re);
    }
    root = std::pow(std::hypot(req.re, req.im), 1.0 / req.alpha);
  } else {
    zero_arg = req.re == 0.0;
    negative_real = req.re < 0.0;
    if (!zero_arg) log_r = P::log(abs_of(R(req.re)));
    root = std::pow(std::abs(req.re), 1.0 / req.alpha);
  }

  const long k_hump = hump_index(req, root);
  if (k_hump > ctl.k_max) fail_nonconvergence(req, "magnitude hump lies beyond k_max");

  const R alpha = req.alpha;
  const R beta = req.beta;
  const R rel_tol = ctl.rel_tol;
  const R dbl_max = DBL_MAX;

  auto log_magnitude = [&](long n, R& lg) -> R {
    lg = log_gamma_t<R>(beta + alpha * R(n));
    return R(n) * log_r - lg;
  };

  SeriesSum<R> out;
  if (zero_arg) {
    if (req.n0 == 0) {
      out.re = P::exp(-log_gamma_t<R>(beta));
    }
    out.terms = 1;
    return out;
  }

  const bool sign_definite = !req.complex_arg && !req.alternate && !negative_real;
  R re = 0, re_c = 0, im = 0, im_c = 0;
  R err_acc = 0;
  int small_run = 0;
  for (long k = 0; k <= ctl.k_max; ++k) {
    const long n = req.n0 + req.stride * k;
    R lg;
    const R log_mag = log_magnitude(n, lg);
    const R mag = P::exp(log_mag);
    if (mag > dbl_max) {
      // With mixed signs a term this large can only end in cancellation.
      if (sign_definite) throw OverflowError("Mittag-Leffler series term exceeds double range");
      fail_nonconvergence(req, "terms exceed double range");
    }
    R term_re, term_im = 0;
    const bool flip = req.alternate && (k % 2 == 1);
    if (req.complex_arg) {
      const R phase = R(n) * theta;
      term_re = mag * P::cos(phase);
      term_im = mag * P::sin(phase);
      if (flip) {
        term_re = -term_re;
        term_im = -term_im;
      }
    } else {
      const bool neg = (negative_real && (n % 2 == 1)) != flip;
      term_re = neg ? -mag : mag;
    }
    NeumaierSum::add(re, re_c, term_re);
    if (req.complex_arg) NeumaierSum::add(im, im_c, term_im);

    R weight = 3 + abs_of(R(n) * log_r) + abs_of(lg);
    if (req.complex_arg) weight += R(n) * abs_of(theta);
    err_acc += mag * weight;

    const R sr = re + re_c;
    const R si = im + im_c;
    const R partial = P::sqrt(sr * sr + si * si);
    if (partial > dbl_max) {
      throw OverflowError("Mittag-Leffler partial sum exceeds double range");
    }
    small_run = (mag <= rel_tol * partial) ? small_run + 1 : 0;
    if (k >= k_hump && small_run >= 3) {
      out.re = sr;
      out.im = si;
      out.rounding = P::eps * err_acc;
      R lg_next;
      out.dropped = P::exp(log_magnitude(n + req.stride, lg_next));
      out.terms = static_cast<int>(k + 1);
      return out;
    }
  }
  fail_nonconvergence(req, "k_max reached before the stopping rule fired");
}

template <typename R>
bool certified(const SeriesSum<R>& s, const SeriesControl& ctl) {
  const R mag = Prec<R>::sqrt(s.re * s.re + s.im * s.im);
  return s.rounding <= R(ctl.rel_tol) * mag || s.rounding <= R(kAbsoluteFloor);
}

struct Evaluated {
  double re = 0.0;
  double im = 0.0;
  double dropped = 0.0;
  double rounding = 0.0;
  int terms = 0;
  int bits = 64;
};

template <typename R>
Evaluated to_evaluated(const SeriesSum<R>& s, int bits) {
  return {static_cast<double>(s.re), static_cast<double>(s.im), static_cast<double>(s.dropped),
          static_cast<double>(s.rounding), s.terms, bits};
}

// Last resort for sums whose terms cancel by more than quad precision can
// absorb: the same series at a working precision sized from the observed
// cancellation, capped so that hopeless arguments still fail.
constexpr long kMaxBits = 1024;

// Initializes the given variables and clears them on scope exit.
class MpScope {
 public:
  MpScope(mpfr_prec_t bits, std::initializer_list<mpfr_ptr> vars) : vars_(vars) {
    for (auto v : vars_) mpfr_init2(v, bits);
  }
  ~MpScope() {
    for (auto v : vars_) mpfr_clear(v);
  }
  MpScope(const MpScope&) = delete;
  MpScope& operator=(const MpScope&) = delete;

 private:
  std::vector<mpfr_ptr> vars_;
};

// 1 / Gamma(beta + alpha n), n = 0, 1, ..., at a fixed precision. Entries
// depend only on (alpha, beta, bits, n), so sharing them between calls on
// one thread does not change any result; trajectories re-use them heavily.
class ReciprocalGammaTable {
 public:
  ReciprocalGammaTable(double alpha, double beta, long bits)
      : alpha_(alpha), beta_(beta), bits_(bits) {}
  ReciprocalGammaTable(const ReciprocalGammaTable&) = delete;
  ReciprocalGammaTable& operator=(const ReciprocalGammaTable&) = delete;
  ~ReciprocalGammaTable() {
    for (auto& v : values_) mpfr_clear(v.x);
  }

  bool matches(double alpha, double beta, long bits) const {
    return alpha == alpha_ && beta == beta_ && bits == bits_;
  }

  mpfr_srcptr at(long n) {
    while (static_cast<long>(values_.size()) <= n) {
      const long m = static_cast<long>(values_.size());
      values_.emplace_back();
      mpfr_ptr x = values_.back().x;
      mpfr_init2(x, bits_);
      mpfr_set_d(x, alpha_, MPFR_RNDN);
      mpfr_mul_si(x, x, m, MPFR_RNDN);
      mpfr_add_d(x, x, beta_, MPFR_RNDN);
      mpfr_gamma(x, x, MPFR_RNDN);
      mpfr_ui_div(x, 1, x, MPFR_RNDN);
    }
    return values_[static_cast<std::size_t>(n)].x;
  }

 private:
  struct Entry {
    mpfr_t x;
  };
  double alpha_, beta_;
  long bits_;
  std::deque<Entry> values_;
};

ReciprocalGammaTable& reciprocal_gamma_table(double alpha, double beta, long bits) {
  constexpr std::size_t kTables = 4;
  thread_local std::deque<std::unique_ptr<ReciprocalGammaTable>> tables;
  for (auto& t : tables) {
    if (t->matches(alpha, beta, bits)) return *t;
  }
  if (tables.size() == kTables) tables.pop_front();
  tables.push_back(std::make_unique<ReciprocalGammaTable>(alpha, beta, bits));
  return *tables.back();
}

double mp_abs(mpfr_ptr re, mpfr_ptr im, mpfr_ptr tmp) {
  mpfr_hypot(tmp, re, im, MPFR_RNDN);
  return mpfr_get_d(tmp, MPFR_RNDN);
}

bool sum_series_mp(const SeriesRequest& req, const SeriesControl& ctl, long bits,
                   Evaluated& out) {
  const mpfr_rnd_t rn = MPFR_RNDN;
  mpfr_t wr, wi, sr, si, pr, pi, tr, ti, tmp, step_r, step_i;
  const MpScope scope(bits, {wr, wi, sr, si, pr, pi, tr, ti, tmp, step_r, step_i});
  auto& inv_gamma = reciprocal_gamma_table(req.alpha, req.beta, bits);
  mpfr_set_d(wr, req.re, rn);
  mpfr_set_d(wi, req.complex_arg ? req.im : 0.0, rn);
  if (req.power_of_x) {
    mpfr_set_d(tmp, req.alpha, rn);
    mpfr_pow(wr, wr, tmp, rn);
  }
  // step = w^stride
  mpfr_set(step_r, wr, rn);
  mpfr_set(step_i, wi, rn);
  for (int s = 1; s < req.stride; ++s) {
    mpfr_mul(tr, step_r, wr, rn);
    mpfr_mul(tmp, step_i, wi, rn);
    mpfr_sub(tr, tr, tmp, rn);
    mpfr_mul(ti, step_r, wi, rn);
    mpfr_mul(tmp, step_i, wr, rn);
    mpfr_add(step_i, ti, tmp, rn);
    mpfr_set(step_r, tr, rn);
  }
  // p = w^{n0}
  mpfr_set_ui(pr, 1, rn);
  mpfr_set_ui(pi, 0, rn);
  for (int s = 0; s < req.n0; ++s) {
    mpfr_set(pr, wr, rn);
    mpfr_set(pi, wi, rn);
  }
  mpfr_set_ui(sr, 0, rn);
  mpfr_set_ui(si, 0, rn);

  const double abs_w = std::abs(std::complex<double>(mpfr_get_d(wr, rn), mpfr_get_d(wi, rn)));
  const long k_hump = hump_index(req, std::pow(abs_w, 1.0 / req.alpha));
  const double eps = std::ldexp(1.0, static_cast<int>(1 - bits));
  double err_acc = 0.0;
  int small_run = 0;
  for (long k = 0; k <= ctl.k_max; ++k) {
    const long n = req.n0 + req.stride * k;
    mpfr_mul(tr, pr, inv_gamma.at(n), rn);
    mpfr_mul(ti, pi, inv_gamma.at(n), rn);
    if (req.alternate && k % 2 == 1) {
      mpfr_neg(tr, tr, rn);
      mpfr_neg(ti, ti, rn);
    }
    mpfr_add(sr, sr, tr, rn);
    mpfr_add(si, si, ti, rn);
    const double mag = mp_abs(tr, ti, tmp);
    const double partial = mp_abs(sr, si, tmp);
    if (!std::isfinite(mag) || !std::isfinite(partial)) return false;
    // Powers by repeated multiplication lose about one unit per factor.
    err_acc += mag * (4.0 + 2.0 * static_cast<double>(n)) + partial;
    small_run = (mag <= ctl.rel_tol * partial) ? small_run + 1 : 0;
    if (k >= k_hump && small_run >= 3) {
      out.re = mpfr_get_d(sr, rn);
      out.im = mpfr_get_d(si, rn);
      out.rounding = eps * err_acc;
      mpfr_mul(tr, pr, step_r, rn);
      mpfr_mul(tmp, pi, step_i, rn);
      mpfr_sub(tr, tr, tmp, rn);
      mpfr_mul(ti, pr, step_i, rn);
      mpfr_mul(tmp, pi, step_r, rn);
      mpfr_add(ti, ti, tmp, rn);
      mpfr_mul(tr, tr, inv_gamma.at(n + req.stride), rn);
      mpfr_mul(ti, ti, inv_gamma.at(n + req.stride), rn);
      out.dropped = mp_abs(tr, ti, tmp);
      out.terms = static_cast<int>(k + 1);
      out.bits = static_cast<int>(bits);
      const double value = std::hypot(out.re, out.im);
      return out.rounding <= ctl.rel_tol * value || out.rounding <= kAbsoluteFloor;
    }
    // p *= step
    mpfr_mul(tr, pr, step_r, rn);
    mpfr_mul(tmp, pi, step_i, rn);
    mpfr_sub(tr, tr, tmp, rn);
    mpfr_mul(ti, pr, step_i, rn);
    mpfr_mul(tmp, pi, step_r, rn);
    mpfr_add(pi, ti, tmp, rn);
    mpfr_set(pr, tr, rn);
  }
  fail_nonconvergence(req, "k_max reached before the stopping rule fired");
}

Evaluated evaluate(const SeriesRequest& req, const SeriesControl& ctl) {
  ctl.validate();
  const auto ld = sum_series<long double>(req, ctl);
  if (certified(ld, ctl)) return to_evaluated(ld, 64);

  // Bits lost to cancellation beyond the tolerance, judged from a pass whose
  // value is still meaningful.
  auto excess_bits = [&](const auto& s, int bits) {
    const double value = std::max(std::hypot(static_cast<double>(s.re), static_cast<double>(s.im)),
                                  kAbsoluteFloor);
    return bits + std::log2(static_cast<double>(s.rounding) / (ctl.rel_tol * value));
  };
  const bool ld_reliable = ld.rounding < 0.01L * std::hypot(ld.re, ld.im);
  double need = excess_bits(ld, 64);
  if (ld_reliable && need < 105.0) {
    const auto q = sum_series<quad>(req, ctl);
    if (certified(q, ctl)) return to_evaluated(q, 113);
    need = excess_bits(q, 113);
  }
  long bits = 64 * static_cast<long>(std::ceil((need + 32.0) / 64.0));
  Evaluated out;
  for (; bits <= kMaxBits; bits *= 2) {
    if (sum_series_mp(req, ctl, bits, out)) return out;
  }
  fail_nonconvergence(req, "cancellation exceeds tolerance");
}

void check_ml_params(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("Mittag-Leffler order alpha must be positive and finite");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("Mittag-Leffler parameter beta must be positive and finite");
  }
}

void check_trig_args(double alpha, double x) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("fractional sine/cosine require alpha in (0, 1]");
  }
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("fractional sine/cosine require a finite argument x >= 0");
  }
}

SeriesValue<double> to_real_value(const Evaluated& e) {
  return {e.re, e.dropped, e.rounding, e.terms, e.bits};
}

SeriesValue<double> trig_series(double alpha, double arg, bool power_of_x, bool sine,
                                const SeriesControl& ctl) {
  SeriesRequest req;
  req.alpha = alpha;
  req.beta = 1.0;
  req.re = arg;
  req.power_of_x = power_of_x;
  req.n0 = sine ? 1 : 0;
  req.stride = 2;
  req.alternate = true;
  return to_real_value(evaluate(req, ctl));
}

}  // namespace

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw DomainError("SeriesControl.rel_tol must lie in (0, 1)");
  }
  if (k_max < 1) throw DomainError("SeriesControl.k_max must be at least 1");
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma requires a finite argument x > 0");
  }
  return static_cast<double>(log_gamma_t<long double>(x));
}

double gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("gamma requires a finite argument x > 0");
  }
  const long double value = std::exp(log_gamma_t<long double>(x));
  if (!(value <= DBL_MAX)) {
    std::ostringstream os;
    os << "gamma(" << x << ") overflows double";
    throw OverflowError(os.str());
  }
  return static_cast<double>(value);
}

SeriesValue<ComplexValue> ml_two_detailed(double alpha, double beta, ComplexValue z,
                                          const SeriesControl& ctl) {
  check_ml_params(alpha, beta);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("Mittag-Leffler argument must be finite");
  }
  SeriesRequest req;
  req.alpha = alpha;
  req.beta = beta;
  req.re = z.real();
  req.im = z.imag();
  req.complex_arg = z.imag() != 0.0;
  const auto e = evaluate(req, ctl);
  return {ComplexValue(e.re, e.im), e.dropped, e.rounding, e.terms, e.bits};
}

SeriesValue<double> ml_two_detailed(double alpha, double beta, double z,
                                    const SeriesControl& ctl) {
  check_ml_params(alpha, beta);
  if (!std::isfinite(z)) throw DomainError("Mittag-Leffler argument must be finite");
  SeriesRequest req;
  req.alpha = alpha;
  req.beta = beta;
  req.re = z;
  return to_real_value(evaluate(req, ctl));
}

ComplexValue ml_two(double alpha, double beta, ComplexValue z, const SeriesControl& ctl) {
  return ml_two_detailed(alpha, beta, z, ctl).value;
}

ComplexValue ml_one(double alpha, ComplexValue z, const SeriesControl& ctl) {
  return ml_two(alpha, 1.0, z, ctl);
}

double ml_two(double alpha, double beta, double z, const SeriesControl& ctl) {
  return ml_two_detailed(alpha, beta, z, ctl).value;
}

double ml_one(double alpha, double z, const SeriesControl& ctl) {
  return ml_two(alpha, 1.0, z, ctl);
}

SeriesValue<double> cos_frac_detailed(double alpha, double x, const SeriesControl& ctl) {
  check_trig_args(alpha, x);
  return trig_series(alpha, x, true, false, ctl);
}

SeriesValue<double> sin_frac_detailed(double alpha, double x, const SeriesControl& ctl) {
  check_trig_args(alpha, x);
  return trig_series(alpha, x, true, true, ctl);
}

double cos_frac(double alpha, double x, const SeriesControl& ctl) {
  return cos_frac_detailed(alpha, x, ctl).value;
}

double sin_frac(double alpha, double x, const SeriesControl& ctl) {
  return sin_frac_detailed(alpha, x, ctl).value;
}

double cos_alpha_of(double alpha, double u, const SeriesControl& ctl) {
  check_trig_args(alpha, u);
  return trig_series(alpha, u, false, false, ctl).value;
}

double sin_alpha_of(double alpha, double u, const SeriesControl& ctl) {
  check_trig_args(alpha, u);
  return trig_series(alpha, u, false, true, ctl).value;
}

}  // namespace fracsys
