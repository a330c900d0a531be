#pragma once

// Test-only oracles, deliberately independent of the library code paths:
// scalar densities are hand-coded against std::lgamma and integrals use
// adaptive Simpson quadrature.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double adaptive_simpson_impl(const std::function<double(double)>& f,
                                    double a, double b, double fa, double fm,
                                    double fb, double whole, double tol,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, 0.5 * tol,
                               depth - 1) +
         adaptive_simpson_impl(f, m, b, fm, frm, fb, right, 0.5 * tol,
                               depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int depth = 48) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, tol, depth);
}

// log density of the scalar Wishart W_1(sigma, nu) at w.
inline double log_wishart_1d(double w, double sigma, double nu) {
  return -0.5 * nu * std::log(2.0) - 0.5 * nu * std::log(sigma) -
         std::lgamma(0.5 * nu) + 0.5 * (nu - 2.0) * std::log(w) -
         0.5 * w / sigma;
}

// log density of the scalar inverse-Wishart IW_1(psi, kappa) at sigma.
inline double log_inverse_wishart_1d(double sigma, double psi, double kappa) {
  return 0.5 * kappa * std::log(psi) - 0.5 * kappa * std::log(2.0) -
         std::lgamma(0.5 * kappa) - 0.5 * (kappa + 2.0) * std::log(sigma) -
         0.5 * psi / sigma;
}

// log of integral exp(log_integrand(u)) du over [center-span, center+span],
// stabilized around the value at the center.
inline double log_integral(const std::function<double(double)>& log_integrand,
                           double center, double span = 40.0,
                           double tol = 1e-13) {
  const double scale = log_integrand(center);
  const auto f = [&](double u) {
    const double v = log_integrand(u) - scale;
    return v < -745.0 ? 0.0 : std::exp(v);
  };
  const double integral = adaptive_simpson(f, center - span, center + span, tol);
  if (!(integral > 0.0))
    throw std::runtime_error("quadrature oracle integrated to zero");
  return scale + std::log(integral);
}

// log m(w | nu) for p = 1 by quadrature over sigma = exp(u).
inline double log_quad_prior_predictive_1d(double w, double nu, double psi0,
                                           double kappa0) {
  const auto log_integrand = [&](double u) {
    const double sigma = std::exp(u);
    return log_wishart_1d(w, sigma, nu) +
           log_inverse_wishart_1d(sigma, psi0, kappa0) + u;  // Jacobian
  };
  const double mode = std::log((psi0 + w) / (kappa0 + nu + 2.0));
  return log_integral(log_integrand, mode);
}

// log m({w1, w2} | nu) for p = 1 by quadrature.
inline double log_quad_pair_marginal_1d(double w1, double w2, double nu,
                                        double psi0, double kappa0) {
  const auto log_integrand = [&](double u) {
    const double sigma = std::exp(u);
    return log_wishart_1d(w1, sigma, nu) + log_wishart_1d(w2, sigma, nu) +
           log_inverse_wishart_1d(sigma, psi0, kappa0) + u;
  };
  const double mode = std::log((psi0 + w1 + w2) / (kappa0 + 2.0 * nu + 2.0));
  return log_integral(log_integrand, mode);
}

// log m({w_i} | nu) for p = 1, any member count, by quadrature.
inline double log_quad_group_marginal_1d(const std::vector<double>& ws,
                                         double nu, double psi0,
                                         double kappa0) {
  const auto log_integrand = [&](double u) {
    const double sigma = std::exp(u);
    double acc = log_inverse_wishart_1d(sigma, psi0, kappa0) + u;
    for (double w : ws) acc += log_wishart_1d(w, sigma, nu);
    return acc;
  };
  double total = psi0;
  for (double w : ws) total += w;
  const double mode =
      std::log(total / (kappa0 + nu * static_cast<double>(ws.size()) + 2.0));
  return log_integral(log_integrand, mode);
}

}  // namespace oracles
