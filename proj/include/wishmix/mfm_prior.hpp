#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace wishmix {

// Prior on the number of components plus the Dirichlet concentration. The
// default p_K is the shifted Poisson, K - 1 ~ Poisson(lambda).
struct MfmPriorSpec {
  double gamma = 1.0;
  double lambda = 1.0;
  std::function<double(int)> custom_log_pk;  // optional override

  double log_pk(int k) const;
};

double log_shifted_poisson_pk(double lambda, int k);

// Precomputed log V_n(t), t = 1..n+1, for one (gamma, p_K) pair.
struct LogVnTable {
  int n = 0;
  std::vector<double> values;  // values[t-1] = log V_n(t)
  long truncation_k = 0;       // largest k summed over
  double tail_bound = 0.0;     // last relative term contribution observed

  double log_vn(int t) const;
};

// Series summation in log space, truncated once the relative tail
// contribution stays below tol for 30 consecutive terms.
LogVnTable compute_log_vn(int n, double gamma,
                          const std::function<double(int)>& log_pk,
                          double tol = 1e-12);
LogVnTable compute_log_vn(int n, const MfmPriorSpec& spec, double tol = 1e-12);

struct DpmPriorSpec {
  double alpha = 1.0;
};

// Label-update prior weight rule; the sole point where the MFM and DPM
// samplers differ.
class LabelPrior {
 public:
  virtual ~LabelPrior() = default;
  // log prior weight for joining an existing cluster of the given
  // leave-one-out size.
  virtual double log_existing(long long count) const = 0;
  // log prior weight for opening a new cluster when k_star clusters exist.
  virtual double log_fresh(int k_star) const = 0;
};

class MfmLabelPrior final : public LabelPrior {
 public:
  MfmLabelPrior(const MfmPriorSpec& spec, const LogVnTable& table)
      : gamma_(spec.gamma), table_(&table) {}

  double log_existing(long long count) const override;
  double log_fresh(int k_star) const override;

 private:
  double gamma_;
  const LogVnTable* table_;
};

class DpmLabelPrior final : public LabelPrior {
 public:
  explicit DpmLabelPrior(const DpmPriorSpec& spec) : alpha_(spec.alpha) {}

  double log_existing(long long count) const override;
  double log_fresh(int k_star) const override;

 private:
  double alpha_;
};

// Unnormalized log weights for one label update: one entry per existing
// cluster (id, leave-one-out count) followed by the new-cluster entry.
std::vector<double> mfm_label_weights(
    std::span<const std::pair<int, long long>> existing, int k_star,
    const MfmPriorSpec& spec, const LogVnTable& table);

std::vector<double> dpm_label_weights(
    std::span<const std::pair<int, long long>> existing,
    const DpmPriorSpec& spec);

}  // namespace wishmix
