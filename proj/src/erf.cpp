#include "gmc/erf.hpp"

#include <cmath>
#include <numbers>

namespace gmc {
namespace {

constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Maclaurin series, sum_k (-1)^k x^(2k+1) / (k! (2k+1)). Terms at |x| <= 1.5
// never exceed ~2.6, so cancellation costs only a few ulp.
double erf_series(double x) {
  const double x2 = x * x;
  double power = x;  // (-1)^k x^(2k+1) / k!
  double sum = x;
  for (int k = 1; k < 64; ++k) {
    power *= -x2 / k;
    const double term = power / (2 * k + 1);
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

// erfc(x) * sqrt(pi) * exp(x^2) = 1/(x + (1/2)/(x + (2/2)/(x + (3/2)/(...))))
// for x > 0, evaluated with the modified Lentz algorithm.
double erfc_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int k = 1; k < 300; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (d == 0.0) d = tiny;
    c = x + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x * x) * std::numbers::inv_sqrtpi / f;
}

}  // namespace

double erf_value(double x) {
  const double ax = std::fabs(x);
  double r;
  if (ax <= 1.5) {
    r = erf_series(ax);
  } else if (ax < 6.0) {
    r = 1.0 - erfc_continued_fraction(ax);
  } else {
    r = 1.0;  // erfc(6) < 2.2e-17
  }
  return std::signbit(x) ? -r : r;
}

double erf_derivative(double x) { return kTwoOverSqrtPi * std::exp(-x * x); }

double normal_cdf(double b) { return 0.5 + 0.5 * erf_value(b * kInvSqrt2); }

double normal_pdf(double b) { return kInvSqrt2Pi * std::exp(-0.5 * b * b); }

}  // namespace gmc
