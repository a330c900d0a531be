#include "wishmix/special_functions.hpp"

#include <cmath>

#include "wishmix/errors.hpp"

namespace wishmix {

namespace {

constexpr double kLogPi = 1.1447298858494001741434273513531;
constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640562;

// Lanczos g=7, n=9.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

void check_positive(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string(what) + " requires x > 0");
}

}  // namespace

double log_gamma(double x) {
  check_positive(x, "log_gamma");
  if (x < 0.5) {
    // reflection keeps the Lanczos sum in its accurate range
    return kLogPi - std::log(std::sin(M_PI * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (z + i);
  const double t = z + 7.5;
  return kHalfLogTwoPi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double digamma(double x) {
  check_positive(x, "digamma");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // asymptotic series through x^-12
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 -
                                            inv2 * (1.0 / 132.0 -
                                                    inv2 * 691.0 / 32760.0)))));
  return result;
}

double trigamma(double x) {
  check_positive(x, "trigamma");
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += inv * (1.0 +
                   inv * (0.5 +
                          inv * (1.0 / 6.0 -
                                 inv2 * (1.0 / 30.0 -
                                         inv2 * (1.0 / 42.0 -
                                                 inv2 * (1.0 / 30.0 -
                                                         inv2 * 5.0 / 66.0))))));
  return result;
}

double log_multigamma(int p, double a) {
  if (p < 1) throw DomainError("log_multigamma requires p >= 1");
  if (!(a > 0.5 * (p - 1)))
    throw DomainError("log_multigamma requires a > (p-1)/2");
  double sum = 0.25 * p * (p - 1) * kLogPi;
  for (int i = 0; i < p; ++i) sum += log_gamma(a - 0.5 * i);
  return sum;
}

double multidigamma(int p, double x) {
  if (p < 1) throw DomainError("multidigamma requires p >= 1");
  if (!(x > 0.5 * (p - 1)))
    throw DomainError("multidigamma requires x > (p-1)/2");
  double sum = 0.0;
  for (int i = 0; i < p; ++i) sum += digamma(x - 0.5 * i);
  return sum;
}

double multitrigamma(int p, double x) {
  if (p < 1) throw DomainError("multitrigamma requires p >= 1");
  if (!(x > 0.5 * (p - 1)))
    throw DomainError("multitrigamma requires x > (p-1)/2");
  double sum = 0.0;
  for (int i = 0; i < p; ++i) sum += trigamma(x - 0.5 * i);
  return sum;
}

}  // namespace wishmix
