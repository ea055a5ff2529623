#pragma once

namespace gmc {

/// Error function, implemented in-repo (Maclaurin series for |x| <= 1.5,
/// Lentz-evaluated continued fraction for the complement up to |x| < 6,
/// saturation beyond). Absolute error <= 1e-12 over the real line; exactly
/// odd by construction.
double erf_value(double x);

/// d/dx erf(x) = (2/sqrt(pi)) * exp(-x^2).
double erf_derivative(double x);

/// Standard normal CDF, Phi(b) = (1 + erf(b/sqrt(2))) / 2.
/// Written as 0.5 + t so that Phi(b) and Phi(-b) = 0.5 - t pair to exactly 1.
double normal_cdf(double b);

/// Standard normal density exp(-b^2/2) / sqrt(2*pi).
double normal_pdf(double b);

}  // namespace gmc
