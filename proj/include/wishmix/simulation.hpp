#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wishmix/rng.hpp"
#include "wishmix/spd.hpp"

namespace wishmix {

// Finite Wishart mixture with a shared degrees-of-freedom parameter.
struct MixtureSpec {
  std::vector<SpdMatrix> scales;
  double nu = 10.0;
  int n = 0;
  // Empty means balanced; otherwise one proportion per component, summing
  // to one.
  std::vector<double> proportions;
};

// Deterministic cluster sizes: balanced spreads the remainder over the
// lowest-indexed clusters; explicit proportions use largest-remainder
// rounding.
std::vector<int> cluster_sizes(int n, int k,
                               const std::vector<double>& proportions);

std::pair<std::vector<SpdMatrix>, std::vector<int>> generate_wishart_mixture(
    const MixtureSpec& spec, Rng& rng);

// Three-component design for large matrices: two fixed correlation scales
// plus one redrawn per replicate by standardizing a Wishart draw.
struct LargeSettingSpec {
  std::optional<SpdMatrix> sigma1;
  std::optional<SpdMatrix> sigma2;
  int n = 0;
  double nu = 15.0;
  double sigma3_wishart_dof = 24.0;
};

std::pair<std::vector<SpdMatrix>, std::vector<int>> generate_large_setting(
    const LargeSettingSpec& spec, Rng& rng);

// Stationary VAR(1) cluster: x_t = phi x_{t-1} + eps_t with
// eps_t ~ N_p(0, (1-phi^2) Sigma), observation W = (nu0/T) sum_t x_t x_t^T.
struct Var1Spec {
  double phi = 0.0;
  SpdMatrix scale;
  int series_length = 0;  // T
  double nu0 = 10.0;

  Var1Spec(double phi_in, SpdMatrix scale_in, int t, double nu0_in);
};

std::pair<std::vector<SpdMatrix>, std::vector<int>> generate_var1_dataset(
    const std::vector<Var1Spec>& specs, const std::vector<int>& sizes,
    Rng& rng);

// Covariance-level effective sample size of the lag-0 sample covariance
// under the VAR(1) process: T / (1 + 2 sum_h (1 - h/T) phi^(2h)).
double effective_nu(int series_length, double phi);

// Series length whose effective sample size is closest to the target; ties
// resolved toward the shorter series.
int choose_T_for_target_nu(double nu0, double phi);

// Closed-form Cov(Sigma_hat_ij, Sigma_hat_rs) for the VAR(1) sample
// covariance with divisor T.
double sample_cov_cov_oracle(const SpdMatrix& sigma, double phi,
                             int series_length, int i, int j, int r, int s);

}  // namespace wishmix
