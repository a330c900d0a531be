#include "wishmix/wishart_model.hpp"

#include <cmath>
#include <limits>

#include "wishmix/errors.hpp"
#include "wishmix/special_functions.hpp"

namespace wishmix {

namespace {

constexpr double kLog2 = 0.69314718055994530941723212145818;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_det_psi_plus(const Eigen::MatrixXd& scatter,
                        const PriorHyper& hyper) {
  Eigen::MatrixXd sum = hyper.psi0.entries() + scatter;
  Eigen::MatrixXd l = cholesky_lower(sum);
  return 2.0 * l.diagonal().array().log().sum();
}

}  // namespace

PriorHyper::PriorHyper(SpdMatrix psi0_in, double kappa0_in, double nu_lo_in,
                       double nu_hi_in)
    : psi0(std::move(psi0_in)),
      kappa0(kappa0_in),
      nu_lo(nu_lo_in),
      nu_hi(nu_hi_in) {
  const int p = psi0.dim();
  if (!(kappa0 > p - 1)) throw InvalidDof(kappa0, p - 1);
  if (!(nu_lo > p - 1)) throw InvalidDof(nu_lo, p - 1);
  if (!(nu_hi > nu_lo))
    throw DomainError("nu support must satisfy nu_lo < nu_hi");
}

ClusterSuffStat ClusterSuffStat::empty(const PriorHyper& hyper) {
  ClusterSuffStat s;
  s.count = 0;
  s.scatter = Eigen::MatrixXd::Zero(hyper.dim(), hyper.dim());
  s.log_det_psi_plus_s = hyper.psi0.log_det();
  return s;
}

void ClusterSuffStat::add(const SpdMatrix& w, const PriorHyper& hyper) {
  scatter += w.entries();
  ++count;
  refresh(hyper);
}

void ClusterSuffStat::remove(const SpdMatrix& w, const PriorHyper& hyper) {
  scatter -= w.entries();
  --count;
  if (count == 0) scatter.setZero();
  refresh(hyper);
}

void ClusterSuffStat::refresh(const PriorHyper& hyper) {
  log_det_psi_plus_s =
      count == 0 ? hyper.psi0.log_det() : log_det_psi_plus(scatter, hyper);
}

double wishart_log_density(const SpdMatrix& w, const SpdMatrix& sigma,
                           double nu) {
  const int p = sigma.dim();
  if (w.dim() != p) throw DimMismatch(w.dim(), p);
  if (!(nu > p - 1)) throw InvalidDof(nu, p - 1);
  return -0.5 * nu * p * kLog2 - 0.5 * nu * sigma.log_det() -
         log_multigamma(p, 0.5 * nu) + 0.5 * (nu - p - 1) * w.log_det() -
         0.5 * solve_spd(sigma, w.entries()).trace();
}

double inverse_wishart_log_density(const SpdMatrix& sigma, const SpdMatrix& psi,
                                   double kappa) {
  const int p = psi.dim();
  if (sigma.dim() != p) throw DimMismatch(sigma.dim(), p);
  if (!(kappa > p - 1)) throw InvalidDof(kappa, p - 1);
  return 0.5 * kappa * psi.log_det() - 0.5 * kappa * p * kLog2 -
         log_multigamma(p, 0.5 * kappa) -
         0.5 * (kappa + p + 1) * sigma.log_det() -
         0.5 * solve_spd(sigma, psi.entries()).trace();
}

double log_prior_predictive(const SpdMatrix& w, double nu,
                            const PriorHyper& hyper) {
  const int p = hyper.dim();
  if (w.dim() != p) throw DimMismatch(w.dim(), p);
  if (!(nu > p - 1)) throw InvalidDof(nu, p - 1);
  const double k0 = hyper.kappa0;
  const double log_det_sum = log_det_psi_plus(w.entries(), hyper);
  return log_multigamma(p, 0.5 * (nu + k0)) - log_multigamma(p, 0.5 * nu) -
         log_multigamma(p, 0.5 * k0) + 0.5 * (nu - p - 1) * w.log_det() +
         0.5 * k0 * hyper.psi0.log_det() - 0.5 * (nu + k0) * log_det_sum;
}

double log_posterior_predictive(const SpdMatrix& w, const ClusterSuffStat& stat,
                                double nu, const PriorHyper& hyper) {
  if (stat.count == 0) return log_prior_predictive(w, nu, hyper);
  const int p = hyper.dim();
  if (w.dim() != p) throw DimMismatch(w.dim(), p);
  if (!(nu > p - 1)) throw InvalidDof(nu, p - 1);
  const double k0 = hyper.kappa0;
  const double m = static_cast<double>(stat.count);
  const double log_det_new = log_det_psi_plus(stat.scatter + w.entries(), hyper);
  return log_multigamma(p, 0.5 * (k0 + (m + 1.0) * nu)) -
         log_multigamma(p, 0.5 * (k0 + m * nu)) -
         log_multigamma(p, 0.5 * nu) + 0.5 * (nu - p - 1) * w.log_det() +
         0.5 * (k0 + m * nu) * stat.log_det_psi_plus_s -
         0.5 * (k0 + (m + 1.0) * nu) * log_det_new;
}

double log_collapsed_cluster_marginal(const ClusterSuffStat& stat,
                                      double sum_log_det_members, double nu,
                                      const PriorHyper& hyper) {
  if (stat.count == 0) return 0.0;
  const int p = hyper.dim();
  if (!(nu > p - 1)) throw InvalidDof(nu, p - 1);
  const double k0 = hyper.kappa0;
  const double nc = static_cast<double>(stat.count);
  return log_multigamma(p, 0.5 * (k0 + nc * nu)) -
         log_multigamma(p, 0.5 * k0) - nc * log_multigamma(p, 0.5 * nu) +
         0.5 * k0 * hyper.psi0.log_det() +
         0.5 * (nu - p - 1) * sum_log_det_members -
         0.5 * (k0 + nc * nu) * stat.log_det_psi_plus_s;
}

std::pair<SpdMatrix, double> posterior_iw_params(const ClusterSuffStat& stat,
                                                 double nu,
                                                 const PriorHyper& hyper) {
  SpdMatrix psi(hyper.psi0.entries() + stat.scatter);
  return {std::move(psi), hyper.kappa0 + static_cast<double>(stat.count) * nu};
}

double nu_log_full_conditional(double nu,
                               std::span<const ClusterSuffStat> clusters,
                               double sum_log_det_all,
                               const PriorHyper& hyper) {
  if (nu < hyper.nu_lo || nu > hyper.nu_hi) return kNegInf;
  const int p = hyper.dim();
  const double k0 = hyper.kappa0;
  double n_total = 0.0;
  double value = 0.0;
  double weighted_log_det = 0.0;
  for (const ClusterSuffStat& c : clusters) {
    const double nc = static_cast<double>(c.count);
    n_total += nc;
    value += log_multigamma(p, 0.5 * (k0 + nc * nu));
    weighted_log_det += nc * c.log_det_psi_plus_s;
  }
  value -= n_total * log_multigamma(p, 0.5 * nu);
  value += 0.5 * nu * (sum_log_det_all - weighted_log_det);
  return value;
}

Eigen::MatrixXd duplication_matrix(int p) {
  const int d = p * (p + 1) / 2;
  Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(p * p, d);
  int idx = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) {
      dp(i + j * p, idx) = 1.0;
      dp(j + i * p, idx) = 1.0;
      ++idx;
    }
  return dp;
}

namespace {

struct PrecisionParts {
  SpdMatrix lambda;
  Eigen::MatrixXd lambda_inv;
  int p;
};

PrecisionParts unpack(const ThetaPoint& theta, const SpdMatrix& w) {
  SpdMatrix lambda(vech_inverse(theta.eta));
  const int p = lambda.dim();
  if (w.dim() != p) throw DimMismatch(w.dim(), p);
  if (!(theta.nu > p + 1))
    throw DomainError("calculus requires nu > p + 1 in the interior");
  Eigen::MatrixXd inv = solve_spd(lambda, Eigen::MatrixXd::Identity(p, p));
  return {std::move(lambda), std::move(inv), p};
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

double grad_nu(const PrecisionParts& parts, const SpdMatrix& w, double nu) {
  return 0.5 * parts.lambda.log_det() - 0.5 * parts.p * kLog2 -
         0.5 * multidigamma(parts.p, 0.5 * nu) + 0.5 * w.log_det();
}

}  // namespace

double wishart_log_density_precision(const ThetaPoint& theta,
                                     const SpdMatrix& w) {
  PrecisionParts parts = unpack(theta, w);
  const int p = parts.p;
  const double nu = theta.nu;
  return 0.5 * nu * parts.lambda.log_det() - 0.5 * nu * p * kLog2 -
         log_multigamma(p, 0.5 * nu) + 0.5 * (nu - p - 1) * w.log_det() -
         0.5 * (parts.lambda.entries().array() * w.entries().array()).sum();
}

Eigen::VectorXd grad_log_density(const ThetaPoint& theta, const SpdMatrix& w) {
  PrecisionParts parts = unpack(theta, w);
  const int d = parts.p * (parts.p + 1) / 2;
  Eigen::MatrixXd dp = duplication_matrix(parts.p);
  Eigen::VectorXd g =
      0.5 * vec(theta.nu * parts.lambda_inv - w.entries());
  Eigen::VectorXd out(d + 1);
  out.head(d) = dp.transpose() * g;
  out(d) = grad_nu(parts, w, theta.nu);
  return out;
}

Eigen::MatrixXd HessianBlocks::dense() const {
  const int d = static_cast<int>(eta_eta.rows());
  Eigen::MatrixXd h(d + 1, d + 1);
  h.topLeftCorner(d, d) = eta_eta;
  h.col(d).head(d) = eta_nu;
  h.row(d).head(d) = eta_nu.transpose();
  h(d, d) = nu_nu;
  return h;
}

HessianBlocks hessian_log_density_blocks(const ThetaPoint& theta,
                                         const SpdMatrix& w) {
  PrecisionParts parts = unpack(theta, w);
  const int p = parts.p;
  Eigen::MatrixXd dp = duplication_matrix(p);
  Eigen::MatrixXd kron(p * p, p * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i)
      kron.block(i * p, j * p, p, p) =
          parts.lambda_inv(i, j) * parts.lambda_inv;
  HessianBlocks h;
  h.eta_eta = -0.5 * theta.nu * dp.transpose() * kron * dp;
  h.eta_nu = 0.5 * dp.transpose() * vec(parts.lambda_inv);
  h.nu_nu = -0.25 * multitrigamma(p, 0.5 * theta.nu);
  return h;
}

HessianBlocks hessian_density_blocks(const ThetaPoint& theta,
                                     const SpdMatrix& w) {
  PrecisionParts parts = unpack(theta, w);
  const int p = parts.p;
  const double f = std::exp(wishart_log_density_precision(theta, w));
  Eigen::MatrixXd dp = duplication_matrix(p);
  Eigen::VectorXd g = 0.5 * vec(theta.nu * parts.lambda_inv - w.entries());
  const double gnu = grad_nu(parts, w, theta.nu);
  Eigen::MatrixXd kron(p * p, p * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i)
      kron.block(i * p, j * p, p, p) =
          parts.lambda_inv(i, j) * parts.lambda_inv;
  HessianBlocks h;
  h.eta_eta = f * (dp.transpose() *
                   (g * g.transpose() - 0.5 * theta.nu * kron) * dp);
  h.eta_nu = f * (dp.transpose() * (gnu * g + 0.5 * vec(parts.lambda_inv)));
  h.nu_nu = f * (gnu * gnu - 0.25 * multitrigamma(p, 0.5 * theta.nu));
  return h;
}

}  // namespace wishmix
