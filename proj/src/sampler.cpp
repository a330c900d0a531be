#include "wishmix/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "wishmix/errors.hpp"

namespace wishmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Inverse-CDF categorical draw from unnormalized log weights; one uniform.
int sample_categorical(const std::vector<double>& log_w, Rng& rng) {
  const double hi = *std::max_element(log_w.begin(), log_w.end());
  double total = 0.0;
  std::vector<double> p(log_w.size());
  for (std::size_t j = 0; j < log_w.size(); ++j) {
    p[j] = std::exp(log_w[j] - hi);
    total += p[j];
  }
  const double u = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    cum += p[j];
    if (u < cum) return static_cast<int>(j);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace

InitSpec InitSpec::k_clusters(int k) {
  InitSpec s;
  s.kind = Kind::kKClusters;
  s.k = k;
  return s;
}

InitSpec InitSpec::given(std::vector<int> labels) {
  InitSpec s;
  s.kind = Kind::kGiven;
  s.labels = std::move(labels);
  return s;
}

ClusterState::ClusterState(const std::vector<SpdMatrix>* data,
                           std::vector<int> labels, double nu,
                           const PriorHyper& hyper)
    : data_(data), labels_(std::move(labels)), nu_(nu) {
  const int n = static_cast<int>(data_->size());
  if (static_cast<int>(labels_.size()) != n)
    throw LengthMismatch(labels_.size(), static_cast<std::size_t>(n));
  labels_ = canonicalize_labels(labels_);
  const int k = labels_.empty()
                    ? 0
                    : 1 + *std::max_element(labels_.begin(), labels_.end());
  clusters_.assign(static_cast<std::size_t>(k), ClusterSuffStat::empty(hyper));
  log_det_obs_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const SpdMatrix& w = (*data_)[i];
    log_det_obs_[i] = w.log_det();
    sum_log_det_obs_ += log_det_obs_[i];
    clusters_[static_cast<std::size_t>(labels_[i])].scatter += w.entries();
    ++clusters_[static_cast<std::size_t>(labels_[i])].count;
  }
  for (auto& c : clusters_) c.refresh(hyper);
}

void ClusterState::remove_obs(int i, const PriorHyper& hyper) {
  const int c = labels_[i];
  assert(c >= 0);
  labels_[i] = -1;
  ClusterSuffStat& stat = clusters_[static_cast<std::size_t>(c)];
  stat.remove(obs(i), hyper);
  if (stat.count == 0) {
    clusters_.erase(clusters_.begin() + c);
    for (int& z : labels_)
      if (z > c) --z;
  }
}

void ClusterState::assign_obs(int i, int cluster, const PriorHyper& hyper) {
  assert(labels_[i] == -1);
  if (cluster == k_plus()) clusters_.push_back(ClusterSuffStat::empty(hyper));
  labels_[i] = cluster;
  clusters_[static_cast<std::size_t>(cluster)].add(obs(i), hyper);
}

double ClusterState::audit_rel_error(const PriorHyper& hyper) const {
  double worst = 0.0;
  std::vector<ClusterSuffStat> fresh(clusters_.size(),
                                     ClusterSuffStat::empty(hyper));
  for (int i = 0; i < n(); ++i) {
    fresh[static_cast<std::size_t>(labels_[i])].scatter += obs(i).entries();
    ++fresh[static_cast<std::size_t>(labels_[i])].count;
  }
  for (std::size_t c = 0; c < clusters_.size(); ++c) {
    if (fresh[c].count != clusters_[c].count) return 1.0;
    const double scale =
        std::max(1.0, fresh[c].scatter.cwiseAbs().maxCoeff());
    worst = std::max(
        worst, (fresh[c].scatter - clusters_[c].scatter).cwiseAbs().maxCoeff() /
                   scale);
    fresh[c].refresh(hyper);
    worst = std::max(worst,
                     std::abs(fresh[c].log_det_psi_plus_s -
                              clusters_[c].log_det_psi_plus_s) /
                         std::max(1.0, std::abs(fresh[c].log_det_psi_plus_s)));
  }
  return worst;
}

double ConjugateWishartLikelihood::log_predictive_existing(
    const SpdMatrix& w, const ClusterSuffStat& stat, double nu) const {
  return log_posterior_predictive(w, stat, nu, *hyper_);
}

double ConjugateWishartLikelihood::log_predictive_new(const SpdMatrix& w,
                                                      double nu) const {
  return log_prior_predictive(w, nu, *hyper_);
}

double ConjugateWishartLikelihood::nu_log_conditional(
    double nu, const ClusterState& state) const {
  return nu_log_full_conditional(nu, state.clusters(), state.sum_log_det_all(),
                                 *hyper_);
}

std::vector<int> canonicalize_labels(const std::vector<int>& labels) {
  std::vector<int> out(labels.size());
  std::map<int, int> seen;
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = seen.emplace(labels[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

ClusterState init_state(const std::vector<SpdMatrix>& data,
                        const SamplerConfig& config, Rng& rng) {
  const int n = static_cast<int>(data.size());
  if (n == 0) throw DataError("dataset is empty");
  const int p = config.prior.dim();
  for (int i = 0; i < n; ++i) {
    if (data[i].dim() != p) throw HeterogeneousDims(data[i].dim(), p);
  }
  std::vector<int> labels(static_cast<std::size_t>(n));
  switch (config.init.kind) {
    case InitSpec::Kind::kSingletons:
      std::iota(labels.begin(), labels.end(), 0);
      break;
    case InitSpec::Kind::kKClusters: {
      if (config.init.k < 1 || config.init.k > n)
        throw BadK(config.init.k, n);
      for (int i = 0; i < n; ++i)
        labels[static_cast<std::size_t>(i)] = static_cast<int>(
            rng.uniform() * static_cast<double>(config.init.k));
      break;
    }
    case InitSpec::Kind::kGiven:
      if (config.init.labels.size() != static_cast<std::size_t>(n))
        throw LengthMismatch(config.init.labels.size(),
                             static_cast<std::size_t>(n));
      labels = config.init.labels;
      break;
  }
  double nu0 = config.nu_init.value_or(
      0.5 * (config.prior.nu_lo + config.prior.nu_hi));
  if (nu0 < config.prior.nu_lo || nu0 > config.prior.nu_hi)
    throw DomainError("initial nu outside [nu_lo, nu_hi]");
  return ClusterState(&data, std::move(labels), nu0, config.prior);
}

void update_label(ClusterState& state, int i, const LabelPrior& prior,
                  const Likelihood& like, const PriorHyper& hyper, Rng& rng) {
  state.remove_obs(i, hyper);
  const int k_star = state.k_plus();
  const SpdMatrix& w = state.obs(i);
  std::vector<double> log_w;
  log_w.reserve(static_cast<std::size_t>(k_star) + 1);
  for (int c = 0; c < k_star; ++c) {
    const ClusterSuffStat& stat = state.clusters()[static_cast<std::size_t>(c)];
    log_w.push_back(prior.log_existing(stat.count) +
                    like.log_predictive_existing(w, stat, state.nu()));
  }
  log_w.push_back(prior.log_fresh(k_star) +
                  like.log_predictive_new(w, state.nu()));
  state.assign_obs(i, sample_categorical(log_w, rng), hyper);
}

bool update_nu(ClusterState& state, double proposal_sd, const Likelihood& like,
               Rng& rng) {
  const double current = state.nu();
  const double proposal = current + proposal_sd * rng.normal();
  const double log_num = like.nu_log_conditional(proposal, state);
  const double log_den = like.nu_log_conditional(current, state);
  const double u = rng.uniform_open();
  if (log_num > kNegInf && std::log(u) < log_num - log_den) {
    state.set_nu(proposal);
    return true;
  }
  return false;
}

McmcTrace run(const std::vector<SpdMatrix>& data, const SamplerConfig& config) {
  if (config.model == ModelKind::kMfm) {
    const LogVnTable table =
        compute_log_vn(static_cast<int>(data.size()), config.mfm);
    MfmLabelPrior prior(config.mfm, table);
    ConjugateWishartLikelihood like(config.prior);
    return run_with(data, config, prior, like);
  }
  DpmLabelPrior prior(config.dpm);
  ConjugateWishartLikelihood like(config.prior);
  return run_with(data, config, prior, like);
}

McmcTrace run_with(const std::vector<SpdMatrix>& data,
                   const SamplerConfig& config, const LabelPrior& prior,
                   const Likelihood& like) {
  if (config.burn_in >= config.iterations)
    throw ConfigError("burn_in must be smaller than iterations");
  if (config.thin < 1) throw ConfigError("thin must be >= 1");
  if (!(config.proposal_sd > 0.0))
    throw ConfigError("proposal_sd must be > 0");
  const auto start = std::chrono::steady_clock::now();
  Rng rng(config.seed);
  ClusterState state = init_state(data, config, rng);
  const int n = state.n();
  if (!config.sweep_order.empty() &&
      config.sweep_order.size() != static_cast<std::size_t>(n))
    throw LengthMismatch(config.sweep_order.size(),
                         static_cast<std::size_t>(n));

  McmcTrace trace;
  trace.iterations = config.iterations;
  trace.burn_in = config.burn_in;
  trace.thin = config.thin;
  trace.seed = config.seed;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (!config.sweep_order.empty()) order = config.sweep_order;

  for (long l = 1; l <= config.iterations; ++l) {
    if (config.sweep == SweepOrder::kRandom && config.sweep_order.empty()) {
      // Fisher-Yates with the chain generator
      for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform() * (i + 1));
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(j)]);
      }
    }
    for (int i : order) update_label(state, i, prior, like, config.prior, rng);
    if (!config.fix_nu) {
      if (update_nu(state, config.proposal_sd, like, rng))
        ++trace.nu_accept_count;
    }
#ifndef NDEBUG
    if (l % 100 == 0) assert(state.audit_rel_error(config.prior) < 1e-9);
#endif
    if (l > config.burn_in && (l - config.burn_in - 1) % config.thin == 0) {
      trace.labels.push_back(canonicalize_labels(state.labels()));
      trace.nu.push_back(state.nu());
      trace.k_plus.push_back(state.k_plus());
    }
  }
  trace.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return trace;
}

std::map<int, SpdMatrix> draw_sigma_posteriors(const ClusterState& state,
                                               const PriorHyper& hyper,
                                               Rng& rng) {
  std::map<int, SpdMatrix> draws;
  for (int c = 0; c < state.k_plus(); ++c) {
    const auto [psi, kappa] = posterior_iw_params(
        state.clusters()[static_cast<std::size_t>(c)], state.nu(), hyper);
    draws.emplace(c, sample_inverse_wishart(psi, kappa, rng));
  }
  return draws;
}

}  // namespace wishmix
