#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wishmix/spd.hpp"

namespace wishmix {

// Symmetric nonnegative dissimilarity matrix with zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Eigen::MatrixXd d);

  int n() const { return static_cast<int>(d_.rows()); }
  double operator()(int i, int j) const { return d_(i, j); }
  const Eigen::MatrixXd& matrix() const { return d_; }

 private:
  Eigen::MatrixXd d_;
};

DistanceMatrix pairwise_riemannian(const std::vector<SpdMatrix>& data);

// Which dissimilarities the Lance-Williams Ward update operates on.
enum class WardVariant {
  kD2,  // squares the input distances first (hclust ward.D2)
  kD,   // feeds the raw distances to the update (hclust ward.D)
};

// Agglomerate to exactly k clusters; deterministic, ties broken by the
// smallest pair of cluster indices.
std::vector<int> hierarchical_ward(const DistanceMatrix& d, int k,
                                   WardVariant variant = WardVariant::kD2);

// Classical PAM: greedy BUILD then full SWAP until no improving swap.
std::vector<int> pam(const DistanceMatrix& d, int k, int max_iterations = 200);

}  // namespace wishmix
