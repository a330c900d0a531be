#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wishmix/spd.hpp"

namespace wishmix {

// Hyperparameters of the conjugate model: Sigma_c ~ IW_p(psi0, kappa0) and
// nu ~ Uniform(nu_lo, nu_hi).
class PriorHyper {
 public:
  PriorHyper(SpdMatrix psi0, double kappa0, double nu_lo, double nu_hi);

  int dim() const { return psi0.dim(); }

  SpdMatrix psi0;
  double kappa0;
  double nu_lo;
  double nu_hi;
};

// Running per-cluster sufficient statistics: member count, scatter sum, and
// the cached log|psi0 + S| refreshed by a full Cholesky on every mutation.
struct ClusterSuffStat {
  long long count = 0;
  Eigen::MatrixXd scatter;
  double log_det_psi_plus_s = 0.0;

  static ClusterSuffStat empty(const PriorHyper& hyper);
  void add(const SpdMatrix& w, const PriorHyper& hyper);
  void remove(const SpdMatrix& w, const PriorHyper& hyper);
  void refresh(const PriorHyper& hyper);
};

// Precision-side parameter point theta = (vech(Lambda), nu).
struct ThetaPoint {
  HalfVector eta;
  double nu = 0.0;
};

double wishart_log_density(const SpdMatrix& w, const SpdMatrix& sigma,
                           double nu);

double inverse_wishart_log_density(const SpdMatrix& sigma, const SpdMatrix& psi,
                                   double kappa);

// log m(W | nu): Wishart likelihood with Sigma integrated out under the
// inverse-Wishart prior.
double log_prior_predictive(const SpdMatrix& w, double nu,
                            const PriorHyper& hyper);

// log p(W | cluster members, nu); `stat` carries the leave-one-out count and
// scatter. An empty stat reduces to the prior predictive.
double log_posterior_predictive(const SpdMatrix& w, const ClusterSuffStat& stat,
                                double nu, const PriorHyper& hyper);

// log m({W_i, i in c} | nu); needs the members' total log-determinant.
double log_collapsed_cluster_marginal(const ClusterSuffStat& stat,
                                      double sum_log_det_members, double nu,
                                      const PriorHyper& hyper);

// Posterior of the cluster scale: IW_p(psi0 + S_c, kappa0 + n_c nu).
std::pair<SpdMatrix, double> posterior_iw_params(const ClusterSuffStat& stat,
                                                 double nu,
                                                 const PriorHyper& hyper);

// Collapsed full conditional of nu given the clustering, up to an additive
// constant; -inf outside [nu_lo, nu_hi].
double nu_log_full_conditional(double nu,
                               std::span<const ClusterSuffStat> clusters,
                               double sum_log_det_all,
                               const PriorHyper& hyper);

// Duplication matrix D_p with vec(S) = D_p vech(S).
Eigen::MatrixXd duplication_matrix(int p);

// Log-density in the precision parameterization, l(eta, nu); the function the
// gradient and Hessian below differentiate.
double wishart_log_density_precision(const ThetaPoint& theta,
                                     const SpdMatrix& w);

// Gradient of l with respect to (eta, nu), length p(p+1)/2 + 1.
Eigen::VectorXd grad_log_density(const ThetaPoint& theta, const SpdMatrix& w);

struct HessianBlocks {
  Eigen::MatrixXd eta_eta;
  Eigen::VectorXd eta_nu;
  double nu_nu = 0.0;

  Eigen::MatrixXd dense() const;
};

HessianBlocks hessian_log_density_blocks(const ThetaPoint& theta,
                                         const SpdMatrix& w);

// Hessian of the density itself via f * (hess(l) + grad(l) grad(l)^T).
HessianBlocks hessian_density_blocks(const ThetaPoint& theta,
                                     const SpdMatrix& w);

}  // namespace wishmix
