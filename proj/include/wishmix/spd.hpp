#pragma once

#include <Eigen/Dense>

#include "wishmix/rng.hpp"

namespace wishmix {

// Symmetric positive-definite matrix with its lower Cholesky factor computed
// and cached at construction. Instances are immutable and safe to share.
class SpdMatrix {
 public:
  // Symmetrizes (A + A^T)/2, validates symmetry of the input (relative
  // tolerance 1e-8) and positive definiteness.
  explicit SpdMatrix(const Eigen::MatrixXd& raw);

  static SpdMatrix identity(int p);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  double log_det() const { return log_det_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
  Eigen::MatrixXd chol_;  // lower triangular
  double log_det_;
};

// Half-vectorization: lower-triangle entries stacked column by column.
struct HalfVector {
  int dim = 0;                 // matrix dimension p
  Eigen::VectorXd values;      // length p(p+1)/2
};

// Lower Cholesky factor of a symmetric matrix; throws NotPositiveDefinite
// with the offending pivot index, or NotSymmetric.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a);

// tr(a*b) for symmetric a, b of equal dimension.
double trace_product(const SpdMatrix& a, const SpdMatrix& b);

// Solves a * x = rhs via the cached Cholesky factor.
Eigen::MatrixXd solve_spd(const SpdMatrix& a, const Eigen::MatrixXd& rhs);

HalfVector vech(const Eigen::MatrixXd& sym);
HalfVector vech(const SpdMatrix& a);
Eigen::MatrixXd vech_inverse(const HalfVector& v);

// Affine-invariant distance d(A,B) = sqrt(sum_i log^2 lambda_i) over the
// generalized eigenvalues of B x = lambda A x.
double riemannian_distance(const SpdMatrix& a, const SpdMatrix& b);

// Bartlett-decomposition draw from W_p(scale, nu), nu > p-1 (non-integer ok).
SpdMatrix sample_wishart(const SpdMatrix& scale, double nu, Rng& rng);

// Draw from IW_p(psi, kappa) by inverting a Wishart draw; kappa > p-1.
SpdMatrix sample_inverse_wishart(const SpdMatrix& psi, double kappa, Rng& rng);

// D^{-1/2} a D^{-1/2} with D = diag(a). Accepts a raw symmetric covariance
// so degenerate inputs surface as ZeroDiagonal / NotPositiveDefinite.
SpdMatrix standardize_to_correlation(const Eigen::MatrixXd& cov);
SpdMatrix standardize_to_correlation(const SpdMatrix& a);

}  // namespace wishmix
