#include "wishmix/spd.hpp"

#include <cmath>

#include "wishmix/errors.hpp"

namespace wishmix {

namespace {

void check_square(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw DimMismatch(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  if (a.rows() == 0) throw DomainError("matrix must be nonempty");
}

void check_symmetry(const Eigen::MatrixXd& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * std::max(1.0, scale)) throw NotSymmetric(asym);
}

}  // namespace

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a) {
  check_square(a);
  check_symmetry(a);
  const int p = static_cast<int>(a.rows());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    double s = a(j, j);
    for (int k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) throw NotPositiveDefinite(j);
    l(j, j) = std::sqrt(s);
    for (int i = j + 1; i < p; ++i) {
      double t = a(i, j);
      for (int k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return l;
}

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& raw) {
  check_square(raw);
  check_symmetry(raw);
  entries_ = 0.5 * (raw + raw.transpose());
  chol_ = cholesky_lower(entries_);
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

SpdMatrix SpdMatrix::identity(int p) {
  return SpdMatrix(Eigen::MatrixXd::Identity(p, p));
}

double trace_product(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) throw DimMismatch(a.dim(), b.dim());
  return (a.entries().array() * b.entries().array()).sum();
}

Eigen::MatrixXd solve_spd(const SpdMatrix& a, const Eigen::MatrixXd& rhs) {
  if (a.dim() != rhs.rows())
    throw DimMismatch(a.dim(), static_cast<int>(rhs.rows()));
  Eigen::MatrixXd y =
      a.chol().triangularView<Eigen::Lower>().solve(rhs);
  return a.chol().transpose().triangularView<Eigen::Upper>().solve(y);
}

HalfVector vech(const Eigen::MatrixXd& sym) {
  check_square(sym);
  const int p = static_cast<int>(sym.rows());
  HalfVector v;
  v.dim = p;
  v.values.resize(p * (p + 1) / 2);
  int idx = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) v.values(idx++) = sym(i, j);
  return v;
}

HalfVector vech(const SpdMatrix& a) { return vech(a.entries()); }

Eigen::MatrixXd vech_inverse(const HalfVector& v) {
  const int p = v.dim;
  const std::size_t want = static_cast<std::size_t>(p) * (p + 1) / 2;
  if (static_cast<std::size_t>(v.values.size()) != want)
    throw LengthMismatch(static_cast<std::size_t>(v.values.size()), want);
  Eigen::MatrixXd a(p, p);
  int idx = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) {
      a(i, j) = v.values(idx);
      a(j, i) = v.values(idx);
      ++idx;
    }
  return a;
}

double riemannian_distance(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) throw DimMismatch(a.dim(), b.dim());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      b.entries(), a.entries(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("generalized eigenvalue solve failed");
  return std::sqrt(es.eigenvalues().array().log().square().sum());
}

SpdMatrix sample_wishart(const SpdMatrix& scale, double nu, Rng& rng) {
  const int p = scale.dim();
  if (!(nu > p - 1)) throw InvalidDof(nu, p - 1);
  // Bartlett factor: chi-squared diagonal, standard normal below.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    a(j, j) = std::sqrt(rng.chi_squared(nu - j));
    for (int i = j + 1; i < p; ++i) a(i, j) = rng.normal();
  }
  Eigen::MatrixXd la = scale.chol() * a;
  return SpdMatrix(la * la.transpose());
}

SpdMatrix sample_inverse_wishart(const SpdMatrix& psi, double kappa, Rng& rng) {
  const int p = psi.dim();
  if (!(kappa > p - 1)) throw InvalidDof(kappa, p - 1);
  SpdMatrix psi_inv(solve_spd(psi, Eigen::MatrixXd::Identity(p, p)));
  SpdMatrix x = sample_wishart(psi_inv, kappa, rng);
  return SpdMatrix(solve_spd(x, Eigen::MatrixXd::Identity(p, p)));
}

SpdMatrix standardize_to_correlation(const Eigen::MatrixXd& cov) {
  check_square(cov);
  check_symmetry(cov);
  const int p = static_cast<int>(cov.rows());
  Eigen::VectorXd inv_sd(p);
  for (int i = 0; i < p; ++i) {
    if (!(cov(i, i) > 0.0)) throw ZeroDiagonal(i);
    inv_sd(i) = 1.0 / std::sqrt(cov(i, i));
  }
  Eigen::MatrixXd r = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  for (int i = 0; i < p; ++i) r(i, i) = 1.0;
  // a unit-magnitude correlation is a singular 2x2 minor that rounding can
  // hide from the factorization
  for (int j = 0; j < p; ++j)
    for (int i = j + 1; i < p; ++i)
      if (std::abs(r(i, j)) >= 1.0 - 1e-12) throw NotPositiveDefinite(i);
  return SpdMatrix(r);
}

SpdMatrix standardize_to_correlation(const SpdMatrix& a) {
  return standardize_to_correlation(a.entries());
}

}  // namespace wishmix
