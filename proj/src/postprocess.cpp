#include "wishmix/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wishmix/errors.hpp"
#include "wishmix/special_functions.hpp"

namespace wishmix {

namespace {

Eigen::MatrixXd membership_matrix(const std::vector<int>& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = z[i] == z[j] ? 1.0 : 0.0;
  return a;
}

double log_binom(long long n, long long k) {
  return log_gamma(static_cast<double>(n) + 1.0) -
         log_gamma(static_cast<double>(k) + 1.0) -
         log_gamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

PartitionEstimate dahl_partition(const McmcTrace& trace) {
  if (trace.labels.empty()) throw EmptyTrace();
  const int n = static_cast<int>(trace.labels.front().size());
  const double draws = static_cast<double>(trace.labels.size());

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
  for (const auto& z : trace.labels) mean += membership_matrix(z);
  mean /= draws;

  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < trace.labels.size(); ++l) {
    const double d = (membership_matrix(trace.labels[l]) - mean).squaredNorm();
    if (d < best_dist) {  // ties keep the earliest draw
      best_dist = d;
      best = l;
    }
  }

  PartitionEstimate est;
  est.labels = canonicalize_labels(trace.labels[best]);
  est.draw_index = best;
  est.comembership = std::move(mean);
  est.k_histogram = k_plus_posterior(trace);
  return est;
}

std::map<int, double> k_plus_posterior(const McmcTrace& trace) {
  if (trace.k_plus.empty()) throw EmptyTrace();
  std::map<int, double> hist;
  for (int k : trace.k_plus) hist[k] += 1.0;
  for (auto& [k, mass] : hist) mass /= static_cast<double>(trace.k_plus.size());
  return hist;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
  const std::size_t n = a.size();
  if (n < 2) throw TooShort(n, 2);

  std::map<int, long long> count_a, count_b;
  std::map<std::pair<int, int>, long long> joint;
  for (std::size_t i = 0; i < n; ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    ++joint[{a[i], b[i]}];
  }
  auto choose2 = [](long long m) {
    return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  };
  double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, m] : joint) sum_joint += choose2(m);
  for (const auto& [key, m] : count_a) sum_a += choose2(m);
  for (const auto& [key, m] : count_b) sum_b += choose2(m);
  const double pairs = choose2(static_cast<long long>(n));
  const double expected = sum_a * sum_b / pairs;
  const double maximum = 0.5 * (sum_a + sum_b);
  if (maximum == expected) return 1.0;  // both partitions degenerate
  return (sum_joint - expected) / (maximum - expected);
}

double k_recovery_accuracy(std::span<const int> estimates, int k0) {
  if (estimates.empty()) throw TooShort(0, 1);
  long long hits = 0;
  for (int k : estimates)
    if (k == k0) ++hits;
  return static_cast<double>(hits) / static_cast<double>(estimates.size());
}

double ess(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 10) throw TooShort(n, 10);
  const double nd = static_cast<double>(n);
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= nd;
  double var = 0.0;
  for (double x : series) var += (x - mean) * (x - mean);
  var /= nd;
  if (var == 0.0) return nd;  // constant series

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t)
      s += (series[t] - mean) * (series[t + lag] - mean);
    return s / nd;
  };

  // Sum autocorrelations in pairs while the pair sums stay positive.
  double iact = 1.0;
  for (std::size_t m = 1; 2 * m < n; ++m) {
    const double pair_sum =
        (autocov(2 * m - 1) + autocov(2 * m)) / var;
    if (pair_sum <= 0.0) break;
    iact += 2.0 * pair_sum;
  }
  return std::clamp(nd / iact, 1.0, nd);
}

std::pair<double, double> credible_interval(std::span<const double> series,
                                            double level) {
  if (series.empty()) throw TooShort(0, 1);
  if (level < 0.0 || level >= 1.0)
    throw DomainError("credible level must lie in [0, 1)");
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&sorted](double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - std::floor(h)) * (sorted[lo + 1] - sorted[lo]);
  };
  const double tail = 0.5 * (1.0 - level);
  return {quantile(tail), quantile(1.0 - tail)};
}

double fisher_exact_2x2(const ContingencyTable2x2& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0)
    throw DataError("contingency cells must be nonnegative");
  const long long r1 = t.a + t.b, r2 = t.c + t.d;
  const long long c1 = t.a + t.c, c2 = t.b + t.d;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) throw DegenerateMargins();
  const long long n = r1 + r2;

  auto log_prob = [&](long long x) {
    return log_binom(r1, x) + log_binom(r2, c1 - x) - log_binom(n, c1);
  };
  const double lp_obs = log_prob(t.a);
  const long long lo = std::max<long long>(0, c1 - r2);
  const long long hi = std::min(r1, c1);
  // Tables tied with the observed probability count toward the tail; the
  // small slack absorbs floating-point noise in the tie comparison.
  const double cutoff = lp_obs + std::log1p(1e-7);
  double p = 0.0;
  for (long long x = lo; x <= hi; ++x) {
    const double lp = log_prob(x);
    if (lp <= cutoff) p += std::exp(lp);
  }
  return std::min(p, 1.0);
}

}  // namespace wishmix
