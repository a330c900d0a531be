#include "wishmix/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wishmix/errors.hpp"

namespace wishmix {

std::vector<int> cluster_sizes(int n, int k,
                               const std::vector<double>& proportions) {
  if (k < 1 || k > n) throw BadK(k, n);
  std::vector<int> sizes(static_cast<std::size_t>(k));
  if (proportions.empty()) {
    const int base = n / k;
    const int extra = n % k;
    for (int c = 0; c < k; ++c) sizes[static_cast<std::size_t>(c)] = base + (c < extra ? 1 : 0);
    return sizes;
  }
  if (static_cast<int>(proportions.size()) != k)
    throw LengthMismatch(proportions.size(), static_cast<std::size_t>(k));
  double total = 0.0;
  for (double p : proportions) {
    if (!(p > 0.0)) throw DomainError("proportions must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw DomainError("proportions must sum to one");
  // largest-remainder rounding
  std::vector<double> quota(static_cast<std::size_t>(k));
  int assigned = 0;
  for (int c = 0; c < k; ++c) {
    quota[static_cast<std::size_t>(c)] = proportions[static_cast<std::size_t>(c)] * n;
    sizes[static_cast<std::size_t>(c)] =
        static_cast<int>(std::floor(quota[static_cast<std::size_t>(c)]));
    assigned += sizes[static_cast<std::size_t>(c)];
  }
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = quota[static_cast<std::size_t>(a)] -
                      std::floor(quota[static_cast<std::size_t>(a)]);
    const double rb = quota[static_cast<std::size_t>(b)] -
                      std::floor(quota[static_cast<std::size_t>(b)]);
    return ra > rb;
  });
  for (int r = 0; r < n - assigned; ++r)
    ++sizes[static_cast<std::size_t>(order[static_cast<std::size_t>(r % k)])];
  return sizes;
}

std::pair<std::vector<SpdMatrix>, std::vector<int>> generate_wishart_mixture(
    const MixtureSpec& spec, Rng& rng) {
  const int k = static_cast<int>(spec.scales.size());
  if (k == 0) throw ConfigError("mixture needs at least one component scale");
  const int p = spec.scales.front().dim();
  for (const SpdMatrix& s : spec.scales)
    if (s.dim() != p) throw HeterogeneousDims(s.dim(), p);
  if (!(spec.nu > p - 1)) throw InvalidDof(spec.nu, p - 1);
  const std::vector<int> sizes = cluster_sizes(spec.n, k, spec.proportions);

  std::vector<SpdMatrix> data;
  std::vector<int> labels;
  data.reserve(static_cast<std::size_t>(spec.n));
  labels.reserve(static_cast<std::size_t>(spec.n));
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < sizes[static_cast<std::size_t>(c)]; ++r) {
      data.push_back(
          sample_wishart(spec.scales[static_cast<std::size_t>(c)], spec.nu, rng));
      labels.push_back(c);
    }
  return {std::move(data), std::move(labels)};
}

std::pair<std::vector<SpdMatrix>, std::vector<int>> generate_large_setting(
    const LargeSettingSpec& spec, Rng& rng) {
  if (!spec.sigma1 || !spec.sigma2) throw MissingScaleConfig();
  if (spec.n < 3) throw ConfigError("large setting needs n >= 3");
  const int p = spec.sigma1->dim();
  if (spec.sigma2->dim() != p) throw HeterogeneousDims(spec.sigma2->dim(), p);
  const SpdMatrix sigma3 = standardize_to_correlation(
      sample_wishart(SpdMatrix::identity(p), spec.sigma3_wishart_dof, rng));
  MixtureSpec mixture{{*spec.sigma1, *spec.sigma2, sigma3}, spec.nu, spec.n, {}};
  return generate_wishart_mixture(mixture, rng);
}

Var1Spec::Var1Spec(double phi_in, SpdMatrix scale_in, int t, double nu0_in)
    : phi(phi_in), scale(std::move(scale_in)), series_length(t), nu0(nu0_in) {
  if (!(std::abs(phi) < 1.0))
    throw DomainError("VAR(1) coefficient must satisfy |phi| < 1");
  if (series_length < 2) throw TooShortSeries(series_length, 2);
  if (series_length < scale.dim())
    throw TooShortSeries(series_length, scale.dim());
}

namespace {

Eigen::VectorXd gaussian_vector(const Eigen::MatrixXd& chol_lower, Rng& rng) {
  Eigen::VectorXd z(chol_lower.rows());
  for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return chol_lower * z;
}

}  // namespace

std::pair<std::vector<SpdMatrix>, std::vector<int>> generate_var1_dataset(
    const std::vector<Var1Spec>& specs, const std::vector<int>& sizes,
    Rng& rng) {
  if (specs.empty()) throw ConfigError("VAR(1) design needs components");
  if (specs.size() != sizes.size())
    throw LengthMismatch(sizes.size(), specs.size());
  const int p = specs.front().scale.dim();
  for (const Var1Spec& s : specs)
    if (s.scale.dim() != p) throw HeterogeneousDims(s.scale.dim(), p);

  std::vector<SpdMatrix> data;
  std::vector<int> labels;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    const Var1Spec& spec = specs[c];
    // innovation covariance (1 - phi^2) Sigma has factor sqrt(1-phi^2) L
    const double innov_scale = std::sqrt(1.0 - spec.phi * spec.phi);
    for (int r = 0; r < sizes[c]; ++r) {
      Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
      Eigen::VectorXd x = gaussian_vector(spec.scale.chol(), rng);
      scatter += x * x.transpose();
      for (int t = 1; t < spec.series_length; ++t) {
        x = spec.phi * x +
            innov_scale * gaussian_vector(spec.scale.chol(), rng);
        scatter += x * x.transpose();
      }
      scatter *= spec.nu0 / static_cast<double>(spec.series_length);
      data.emplace_back(scatter);
      labels.push_back(static_cast<int>(c));
    }
  }
  return {std::move(data), std::move(labels)};
}

double effective_nu(int series_length, double phi) {
  if (series_length < 1) throw DomainError("series length must be >= 1");
  if (!(std::abs(phi) < 1.0))
    throw DomainError("effective_nu requires |phi| < 1");
  const double t = static_cast<double>(series_length);
  const double rho = phi * phi;
  double sum = 0.0;
  double pow_rho = 1.0;
  for (int h = 1; h < series_length; ++h) {
    pow_rho *= rho;
    sum += (1.0 - static_cast<double>(h) / t) * pow_rho;
    if (pow_rho < 1e-18) break;
  }
  return t / (1.0 + 2.0 * sum);
}

int choose_T_for_target_nu(double nu0, double phi) {
  if (!(nu0 >= 1.0)) throw DomainError("target nu must be >= 1");
  if (!(std::abs(phi) < 1.0))
    throw DomainError("choose_T requires |phi| < 1");
  // effective_nu is increasing in T; find the first T at or past the target
  // and keep whichever neighbor lands closer.
  int t = 1;
  while (effective_nu(t, phi) < nu0) ++t;
  if (t > 1) {
    const double below = std::abs(effective_nu(t - 1, phi) - nu0);
    const double above = std::abs(effective_nu(t, phi) - nu0);
    if (below <= above) return t - 1;
  }
  return t;
}

double sample_cov_cov_oracle(const SpdMatrix& sigma, double phi,
                             int series_length, int i, int j, int r, int s) {
  const int p = sigma.dim();
  if (i < 0 || j < 0 || r < 0 || s < 0 || i >= p || j >= p || r >= p || s >= p)
    throw DomainError("index out of range for the scale matrix");
  if (series_length < 1) throw DomainError("series length must be >= 1");
  if (!(std::abs(phi) < 1.0)) throw DomainError("|phi| < 1 required");
  const double t = static_cast<double>(series_length);
  const double cross = sigma(i, r) * sigma(j, s) + sigma(i, s) * sigma(j, r);
  double sum = 0.0;
  for (int h = -(series_length - 1); h <= series_length - 1; ++h) {
    // Gamma(h) = phi^{|h|} Sigma, so each product contributes phi^{2|h|}
    sum += (t - std::abs(static_cast<double>(h))) *
           std::pow(phi * phi, std::abs(h));
  }
  return sum / (t * t) * cross;
}

}  // namespace wishmix
