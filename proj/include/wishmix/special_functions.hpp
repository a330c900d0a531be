#pragma once

namespace wishmix {

// Gamma-family special functions for positive real arguments.
// All are accurate to ~1e-13 relative, pure, and thread-safe.

double log_gamma(double x);
double digamma(double x);
double trigamma(double x);

// log of the multivariate gamma function Gamma_p(a), a > (p-1)/2.
double log_multigamma(int p, double a);

// First and second derivatives of log Gamma_p.
double multidigamma(int p, double x);
double multitrigamma(int p, double x);

}  // namespace wishmix
