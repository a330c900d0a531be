#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "wishmix/mfm_prior.hpp"
#include "wishmix/rng.hpp"
#include "wishmix/spd.hpp"
#include "wishmix/wishart_model.hpp"

namespace wishmix {

enum class ModelKind { kMfm, kDpm };

struct InitSpec {
  enum class Kind { kSingletons, kKClusters, kGiven };
  Kind kind = Kind::kSingletons;
  int k = 1;                     // for kKClusters
  std::vector<int> labels;       // for kGiven

  static InitSpec singletons() { return {}; }
  static InitSpec k_clusters(int k);
  static InitSpec given(std::vector<int> labels);
};

enum class SweepOrder { kFixed, kRandom };

struct SamplerConfig {
  long iterations = 10000;
  long burn_in = 4000;
  long thin = 1;
  double proposal_sd = 1.0;
  std::uint64_t seed = 0;
  PriorHyper prior;
  ModelKind model = ModelKind::kMfm;
  MfmPriorSpec mfm;
  DpmPriorSpec dpm;
  InitSpec init;
  std::optional<double> nu_init;      // default: midpoint of [nu_lo, nu_hi]
  bool fix_nu = false;                // skip the nu move entirely
  SweepOrder sweep = SweepOrder::kFixed;
  std::vector<int> sweep_order;       // explicit visit order when nonempty

  explicit SamplerConfig(PriorHyper prior_hyper) : prior(std::move(prior_hyper)) {}
};

// Mutable chain state: labels, per-cluster sufficient statistics, shared nu,
// and cached per-observation log-determinants. Confined to one chain.
class ClusterState {
 public:
  ClusterState(const std::vector<SpdMatrix>* data, std::vector<int> labels,
               double nu, const PriorHyper& hyper);

  int n() const { return static_cast<int>(labels_.size()); }
  int k_plus() const { return static_cast<int>(clusters_.size()); }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<ClusterSuffStat>& clusters() const { return clusters_; }
  double nu() const { return nu_; }
  void set_nu(double nu) { nu_ = nu; }
  double log_det_obs(int i) const { return log_det_obs_[i]; }
  double sum_log_det_all() const { return sum_log_det_obs_; }
  const SpdMatrix& obs(int i) const { return (*data_)[i]; }

  // Detach observation i from its cluster; deletes the cluster if emptied.
  void remove_obs(int i, const PriorHyper& hyper);
  // Attach observation i; cluster == k_plus() opens a fresh cluster.
  void assign_obs(int i, int cluster, const PriorHyper& hyper);

  // Max relative discrepancy between incremental and from-scratch statistics.
  double audit_rel_error(const PriorHyper& hyper) const;

 private:
  const std::vector<SpdMatrix>* data_;
  std::vector<int> labels_;            // -1 while detached
  std::vector<ClusterSuffStat> clusters_;
  std::vector<double> log_det_obs_;
  double sum_log_det_obs_ = 0.0;
  double nu_;
};

struct McmcTrace {
  std::vector<std::vector<int>> labels;  // canonicalized draws
  std::vector<double> nu;
  std::vector<int> k_plus;
  long nu_accept_count = 0;
  long iterations = 0;
  long burn_in = 0;
  long thin = 1;
  std::uint64_t seed = 0;
  double seconds = 0.0;

  std::size_t size() const { return nu.size(); }
};

// Collapsed predictive interface consumed by the label and nu moves; the
// conjugate Wishart model is the production implementation.
class Likelihood {
 public:
  virtual ~Likelihood() = default;
  virtual double log_predictive_existing(const SpdMatrix& w,
                                         const ClusterSuffStat& stat,
                                         double nu) const = 0;
  virtual double log_predictive_new(const SpdMatrix& w, double nu) const = 0;
  virtual double nu_log_conditional(double nu, const ClusterState& state) const = 0;
};

class ConjugateWishartLikelihood final : public Likelihood {
 public:
  explicit ConjugateWishartLikelihood(const PriorHyper& hyper)
      : hyper_(&hyper) {}

  double log_predictive_existing(const SpdMatrix& w,
                                 const ClusterSuffStat& stat,
                                 double nu) const override;
  double log_predictive_new(const SpdMatrix& w, double nu) const override;
  double nu_log_conditional(double nu, const ClusterState& state) const override;

 private:
  const PriorHyper* hyper_;
};

// First-appearance renumbering, e.g. (7,7,2,7) -> (0,0,1,0).
std::vector<int> canonicalize_labels(const std::vector<int>& labels);

ClusterState init_state(const std::vector<SpdMatrix>& data,
                        const SamplerConfig& config, Rng& rng);

// One collapsed Gibbs update of label i. Consumes one uniform.
void update_label(ClusterState& state, int i, const LabelPrior& prior,
                  const Likelihood& like, const PriorHyper& hyper, Rng& rng);

// Random-walk Metropolis move for nu; returns true when accepted.
bool update_nu(ClusterState& state, double proposal_sd, const Likelihood& like,
               Rng& rng);

McmcTrace run(const std::vector<SpdMatrix>& data, const SamplerConfig& config);

// Same chain with injected strategies; `run` delegates here after selecting
// the weight rule from config.model.
McmcTrace run_with(const std::vector<SpdMatrix>& data,
                   const SamplerConfig& config, const LabelPrior& prior,
                   const Likelihood& like);

// One IW draw of Sigma_c per live cluster, keyed by cluster index.
std::map<int, SpdMatrix> draw_sigma_posteriors(const ClusterState& state,
                                               const PriorHyper& hyper,
                                               Rng& rng);

}  // namespace wishmix
