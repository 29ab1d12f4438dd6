#pragma once

// Gamma, Mittag-Leffler and fractional sine/cosine evaluation.
//
// All series are summed in long double first; when the running rounding
// estimate shows that cancellation has eaten into the tolerance the sum is
// repeated in quad precision, and then with MPFR at a precision sized from
// the observed cancellation (at most 1024 bits). A value is returned only
// when both the truncation rule and the rounding estimate are within
// SeriesControl::rel_tol, otherwise NonConvergenceError is thrown.

#include <complex>

namespace fracsys {

using ComplexValue = std::complex<double>;

struct MLParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct SeriesControl {
  double rel_tol = 1e-13;
  int k_max = 10000;

  void validate() const;
};

/// Series value together with its certification data.
template <typename T>
struct SeriesValue {
  T value{};
  /// Magnitude of the first omitted term.
  double dropped_term = 0.0;
  /// Estimated accumulated rounding error (absolute).
  double rounding_error = 0.0;
  int terms = 0;
  /// Significand bits of the pass that produced the value.
  int precision_bits = 64;
};

double gamma(double x);
double log_gamma(double x);

ComplexValue ml_one(double alpha, ComplexValue z, const SeriesControl& ctl = {});
ComplexValue ml_two(double alpha, double beta, ComplexValue z, const SeriesControl& ctl = {});

// Real-argument overloads; these skip the complex phase bookkeeping.
double ml_one(double alpha, double z, const SeriesControl& ctl = {});
double ml_two(double alpha, double beta, double z, const SeriesControl& ctl = {});

SeriesValue<ComplexValue> ml_two_detailed(double alpha, double beta, ComplexValue z,
                                          const SeriesControl& ctl = {});
SeriesValue<double> ml_two_detailed(double alpha, double beta, double z,
                                    const SeriesControl& ctl = {});

/// cos_alpha(x^alpha) = sum_k (-1)^k x^{2k alpha} / Gamma(1 + 2k alpha), x >= 0.
double cos_frac(double alpha, double x, const SeriesControl& ctl = {});
/// sin_alpha(x^alpha) = sum_k (-1)^k x^{(2k+1) alpha} / Gamma(1 + (2k+1) alpha), x >= 0.
double sin_frac(double alpha, double x, const SeriesControl& ctl = {});

SeriesValue<double> cos_frac_detailed(double alpha, double x, const SeriesControl& ctl = {});
SeriesValue<double> sin_frac_detailed(double alpha, double x, const SeriesControl& ctl = {});

// The same functions parameterised by the power argument u = x^alpha,
// i.e. cos_alpha(u) and sin_alpha(u). Used for cos_alpha(q t^alpha).
double cos_alpha_of(double alpha, double u, const SeriesControl& ctl = {});
double sin_alpha_of(double alpha, double u, const SeriesControl& ctl = {});

}  // namespace fracsys
