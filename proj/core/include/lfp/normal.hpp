#pragma once

namespace lfp {

/// Standard-normal CDF Phi(z). Absolute error below 1e-14 for |z| <= 8,
/// monotone nondecreasing, and Phi(z) + Phi(-z) = 1 to within one rounding.
double normal_cdf(double z);

/// Standard-normal density phi(z).
double normal_pdf(double z);

namespace detail {

// Rational (Cody-style) error function pair backing normal_cdf. Exposed for
// the channel implementations; use normal_cdf elsewhere.
double erf(double x);
double erfc(double x);

}  // namespace detail

}  // namespace lfp
