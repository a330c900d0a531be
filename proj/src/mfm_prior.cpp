#include "wishmix/mfm_prior.hpp"

#include <cmath>
#include <limits>

#include "wishmix/errors.hpp"
#include "wishmix/special_functions.hpp"

namespace wishmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long kMaxSummationK = 1000000;
constexpr int kQuietTerms = 30;

// log k_(t), falling factorial; -inf for k < t.
double log_falling(long k, int t) {
  if (k < t) return kNegInf;
  return log_gamma(static_cast<double>(k) + 1.0) -
         log_gamma(static_cast<double>(k - t) + 1.0);
}

// log (gamma*k)^(n), rising factorial.
double log_rising(double x, int n) {
  return log_gamma(x + n) - log_gamma(x);
}

}  // namespace

double log_shifted_poisson_pk(double lambda, int k) {
  if (k < 1) throw DomainError("p_K is supported on k >= 1");
  if (!(lambda > 0.0)) throw DomainError("shifted Poisson rate must be > 0");
  return -lambda + (k - 1) * std::log(lambda) - log_gamma(static_cast<double>(k));
}

double MfmPriorSpec::log_pk(int k) const {
  if (custom_log_pk) {
    if (k < 1) throw DomainError("p_K is supported on k >= 1");
    return custom_log_pk(k);
  }
  return log_shifted_poisson_pk(lambda, k);
}

double LogVnTable::log_vn(int t) const {
  if (t < 1 || t > n + 1)
    throw TableMissing("log V_n(t) requested for t=" + std::to_string(t) +
                       " outside 1.." + std::to_string(n + 1));
  return values[static_cast<std::size_t>(t - 1)];
}

LogVnTable compute_log_vn(int n, double gamma,
                          const std::function<double(int)>& log_pk,
                          double tol) {
  if (n < 1) throw DomainError("compute_log_vn requires n >= 1");
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
  LogVnTable table;
  table.n = n;
  table.values.resize(static_cast<std::size_t>(n + 1));
  const double log_tol = std::log(tol);
  for (int t = 1; t <= n + 1; ++t) {
    double total = kNegInf;
    int quiet = 0;
    long k = t;  // terms with k < t vanish
    for (;; ++k) {
      if (k > kMaxSummationK)
        throw NonConvergence("V_n(" + std::to_string(t) +
                             ") summation exceeded k = 10^6");
      const double term = log_falling(k, t) -
                          log_rising(gamma * static_cast<double>(k), n) +
                          log_pk(static_cast<int>(k));
      if (total == kNegInf) {
        total = term;
      } else {
        const double hi = std::max(total, term);
        total = hi + std::log(std::exp(total - hi) + std::exp(term - hi));
      }
      const double rel = term - total;  // log of this term's share
      table.tail_bound = std::exp(rel);
      if (rel < log_tol) {
        if (++quiet >= kQuietTerms) break;
      } else {
        quiet = 0;
      }
    }
    table.truncation_k = k;
    table.values[static_cast<std::size_t>(t - 1)] = total;
  }
  return table;
}

LogVnTable compute_log_vn(int n, const MfmPriorSpec& spec, double tol) {
  return compute_log_vn(
      n, spec.gamma, [&spec](int k) { return spec.log_pk(k); }, tol);
}

double MfmLabelPrior::log_existing(long long count) const {
  return std::log(static_cast<double>(count) + gamma_);
}

double MfmLabelPrior::log_fresh(int k_star) const {
  // With no existing clusters a fresh cluster is the only admissible move;
  // the weight cancels in normalization, so any finite value works.
  if (k_star == 0) return 0.0;
  return std::log(gamma_) + table_->log_vn(k_star + 1) - table_->log_vn(k_star);
}

double DpmLabelPrior::log_existing(long long count) const {
  return std::log(static_cast<double>(count));
}

double DpmLabelPrior::log_fresh(int /*k_star*/) const {
  return std::log(alpha_);
}

namespace {

std::vector<double> collect_weights(
    std::span<const std::pair<int, long long>> existing, int k_star,
    const LabelPrior& prior) {
  std::vector<double> w;
  w.reserve(existing.size() + 1);
  for (const auto& [id, count] : existing) {
    (void)id;
    w.push_back(prior.log_existing(count));
  }
  w.push_back(prior.log_fresh(k_star));
  return w;
}

}  // namespace

std::vector<double> mfm_label_weights(
    std::span<const std::pair<int, long long>> existing, int k_star,
    const MfmPriorSpec& spec, const LogVnTable& table) {
  if (k_star != static_cast<int>(existing.size()))
    throw DomainError("k_star must equal the number of existing clusters");
  MfmLabelPrior prior(spec, table);
  return collect_weights(existing, k_star, prior);
}

std::vector<double> dpm_label_weights(
    std::span<const std::pair<int, long long>> existing,
    const DpmPriorSpec& spec) {
  DpmLabelPrior prior(spec);
  return collect_weights(existing, static_cast<int>(existing.size()), prior);
}

}  // namespace wishmix
