#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wishmix/sampler.hpp"

namespace wishmix {

// Representative partition selected by least-squares distance to the mean
// co-membership matrix, plus the K+ posterior histogram.
struct PartitionEstimate {
  std::vector<int> labels;             // canonical
  std::size_t draw_index = 0;          // 0-based index into the retained draws
  Eigen::MatrixXd comembership;        // posterior mean membership matrix
  std::map<int, double> k_histogram;   // K+ -> posterior mass
};

PartitionEstimate dahl_partition(const McmcTrace& trace);

std::map<int, double> k_plus_posterior(const McmcTrace& trace);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

double k_recovery_accuracy(std::span<const int> estimates, int k0);

// Effective sample size via the initial-positive-sequence truncation of the
// autocorrelation sum; a constant series counts as fully independent.
double ess(std::span<const double> series);

// Equal-tailed interval with type-7 (linear interpolation) quantiles.
std::pair<double, double> credible_interval(std::span<const double> series,
                                            double level);

struct ContingencyTable2x2 {
  long long a = 0, b = 0;  // first row
  long long c = 0, d = 0;  // second row
};

// Two-sided p-value: total hypergeometric mass of tables (margins fixed) no
// more probable than the observed one.
double fisher_exact_2x2(const ContingencyTable2x2& table);

}  // namespace wishmix
