#include "wishmix/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wishmix/errors.hpp"
#include "wishmix/sampler.hpp"

namespace wishmix {

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols())
    throw DimMismatch(static_cast<int>(d_.rows()),
                      static_cast<int>(d_.cols()));
  for (int i = 0; i < d_.rows(); ++i) {
    if (d_(i, i) != 0.0)
      throw DataError("distance matrix diagonal must be zero");
    for (int j = 0; j < d_.cols(); ++j) {
      if (!std::isfinite(d_(i, j)) || d_(i, j) < 0.0)
        throw DataError("distances must be finite and nonnegative");
      if (d_(i, j) != d_(j, i))
        throw DataError("distance matrix must be exactly symmetric");
    }
  }
}

DistanceMatrix pairwise_riemannian(const std::vector<SpdMatrix>& data) {
  const int n = static_cast<int>(data.size());
  if (n == 0) throw DataError("dataset is empty");
  const int p = data.front().dim();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (data[static_cast<std::size_t>(i)].dim() != p)
      throw HeterogeneousDims(data[static_cast<std::size_t>(i)].dim(), p);
    for (int j = i + 1; j < n; ++j) {
      const double dist = riemannian_distance(data[static_cast<std::size_t>(i)],
                                              data[static_cast<std::size_t>(j)]);
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return DistanceMatrix(std::move(d));
}

std::vector<int> hierarchical_ward(const DistanceMatrix& d, int k,
                                   WardVariant variant) {
  const int n = d.n();
  if (k < 1 || k > n) throw BadK(k, n);

  // Work on squared dissimilarities; cluster distance stored squared and the
  // Lance-Williams Ward coefficients applied on that scale.
  Eigen::MatrixXd dist2(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist2(i, j) = variant == WardVariant::kD2 ? d(i, j) * d(i, j) : d(i, j);

  std::vector<int> members(static_cast<std::size_t>(n));  // point -> cluster
  std::iota(members.begin(), members.end(), 0);
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);

  for (int live = n; live > k; --live) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!alive[static_cast<std::size_t>(j)]) continue;
        if (dist2(i, j) < best) {
          best = dist2(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    // merge bj into bi, then update distances to every other live cluster
    for (int m = 0; m < n; ++m) {
      if (!alive[static_cast<std::size_t>(m)] || m == bi || m == bj) continue;
      const double ni = size[static_cast<std::size_t>(bi)];
      const double nj = size[static_cast<std::size_t>(bj)];
      const double nm = size[static_cast<std::size_t>(m)];
      const double merged = ((ni + nm) * dist2(bi, m) + (nj + nm) * dist2(bj, m) -
                             nm * dist2(bi, bj)) /
                            (ni + nj + nm);
      dist2(bi, m) = merged;
      dist2(m, bi) = merged;
    }
    size[static_cast<std::size_t>(bi)] += size[static_cast<std::size_t>(bj)];
    alive[static_cast<std::size_t>(bj)] = false;
    for (int& c : members)
      if (c == bj) c = bi;
  }
  return canonicalize_labels(members);
}

namespace {

double pam_cost(const DistanceMatrix& d, const std::vector<int>& medoids) {
  double cost = 0.0;
  for (int i = 0; i < d.n(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int m : medoids) nearest = std::min(nearest, d(i, m));
    cost += nearest;
  }
  return cost;
}

}  // namespace

std::vector<int> pam(const DistanceMatrix& d, int k, int max_iterations) {
  const int n = d.n();
  if (k < 1 || k > n) throw BadK(k, n);

  // BUILD: first medoid minimizes total distance, then greedily add the
  // point with the largest cost reduction.
  std::vector<int> medoids;
  std::vector<bool> is_medoid(static_cast<std::size_t>(n), false);
  {
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      double cost = 0.0;
      for (int i = 0; i < n; ++i) cost += d(i, c);
      if (cost < best_cost) {
        best_cost = cost;
        best = c;
      }
    }
    medoids.push_back(best);
    is_medoid[static_cast<std::size_t>(best)] = true;
  }
  std::vector<double> nearest(static_cast<std::size_t>(n));
  auto refresh_nearest = [&] {
    for (int i = 0; i < n; ++i) {
      nearest[static_cast<std::size_t>(i)] =
          std::numeric_limits<double>::infinity();
      for (int m : medoids)
        nearest[static_cast<std::size_t>(i)] =
            std::min(nearest[static_cast<std::size_t>(i)], d(i, m));
    }
  };
  refresh_nearest();
  while (static_cast<int>(medoids.size()) < k) {
    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      if (is_medoid[static_cast<std::size_t>(c)]) continue;
      double gain = 0.0;
      for (int i = 0; i < n; ++i)
        gain += std::max(0.0, nearest[static_cast<std::size_t>(i)] - d(i, c));
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    medoids.push_back(best);
    is_medoid[static_cast<std::size_t>(best)] = true;
    refresh_nearest();
  }

  // SWAP: take the best strictly improving (medoid, candidate) exchange.
  double cost = pam_cost(d, medoids);
  for (int iter = 0; iter < max_iterations; ++iter) {
    double best_cost = cost;
    int best_m = -1, best_h = -1;
    for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
      for (int h = 0; h < n; ++h) {
        if (is_medoid[static_cast<std::size_t>(h)]) continue;
        std::vector<int> trial = medoids;
        trial[mi] = h;
        const double trial_cost = pam_cost(d, trial);
        if (trial_cost < best_cost - 1e-12) {
          best_cost = trial_cost;
          best_m = static_cast<int>(mi);
          best_h = h;
        }
      }
    }
    if (best_m < 0) break;
    is_medoid[static_cast<std::size_t>(medoids[static_cast<std::size_t>(
        best_m)])] = false;
    medoids[static_cast<std::size_t>(best_m)] = best_h;
    is_medoid[static_cast<std::size_t>(best_h)] = true;
    cost = best_cost;
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
      if (d(i, medoids[mi]) < best) {
        best = d(i, medoids[mi]);
        arg = static_cast<int>(mi);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
  }
  return canonicalize_labels(labels);
}

}  // namespace wishmix
