#include <doctest.h>

#include <cmath>

#include "wishmix/errors.hpp"
#include "wishmix/rng.hpp"
#include "wishmix/spd.hpp"

using namespace wishmix;

namespace {

Eigen::MatrixXd random_spd(int p, Rng& rng, double jitter = 0.5) {
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a * a.transpose() + jitter * Eigen::MatrixXd::Identity(p, p);
}

Eigen::MatrixXd random_square(int p, Rng& rng) {
  Eigen::MatrixXd m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("cholesky of the identity is the identity") {
  const SpdMatrix a = SpdMatrix::identity(3);
  CHECK((a.chol() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
}

TEST_CASE("cholesky matches the hand-computed factor") {
  Eigen::MatrixXd a(2, 2);
  a << 4, 2, 2, 3;
  const SpdMatrix m(a);
  CHECK(m.chol()(0, 0) == doctest::Approx(2.0));
  CHECK(m.chol()(1, 0) == doctest::Approx(1.0));
  CHECK(m.chol()(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(m.chol()(0, 1) == 0.0);
}

TEST_CASE("indefinite input reports the failing pivot") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2, 1;  // eigenvalues 3, -1
  CHECK_THROWS_AS(SpdMatrix{a}, NotPositiveDefinite);
  try {
    SpdMatrix m(a);
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot == 1);
  }
}

TEST_CASE("asymmetric input is rejected with the max asymmetry") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS(SpdMatrix{a}, NotSymmetric);
}

TEST_CASE("construction symmetrizes rounding noise and factors exactly") {
  Rng rng(7);
  for (int p : {2, 5, 8}) {
    Eigen::MatrixXd a = random_spd(p, rng);
    a(0, 1) += 1e-12;  // below the relative tolerance
    const SpdMatrix m(a);
    CHECK((m.entries() - m.entries().transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd rec = m.chol() * m.chol().transpose();
    const double rel = (rec - m.entries()).cwiseAbs().maxCoeff() /
                       m.entries().cwiseAbs().maxCoeff();
    CHECK(rel < 1e-10);
    CHECK(std::isfinite(m.log_det()));
  }
}

TEST_CASE("log_det on known determinants") {
  CHECK(SpdMatrix::identity(5).log_det() == doctest::Approx(0.0));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 8.0;
  CHECK(SpdMatrix(d).log_det() == doctest::Approx(std::log(16.0)));
  Eigen::MatrixXd a(2, 2);
  a << 4, 2, 2, 3;
  CHECK(SpdMatrix(a).log_det() == doctest::Approx(std::log(8.0)));
}

TEST_CASE("trace_product values and symmetry") {
  for (int p : {2, 4}) {
    const SpdMatrix eye = SpdMatrix::identity(p);
    CHECK(trace_product(eye, eye) == doctest::Approx(p));
  }
  Eigen::MatrixXd am(2, 2), bm(2, 2);
  am << 1, 1, 1, 2;
  bm << 2, 0, 0, 1;
  const SpdMatrix a(am), b(bm);
  CHECK(trace_product(a, b) == doctest::Approx(4.0));
  Rng rng(11);
  const SpdMatrix x(random_spd(3, rng)), y(random_spd(3, rng));
  CHECK(trace_product(x, y) == doctest::Approx(trace_product(y, x)));
  CHECK_THROWS_AS(trace_product(a, SpdMatrix::identity(3)), DimMismatch);
}

TEST_CASE("solve_spd identities and residual") {
  Rng rng(3);
  const SpdMatrix eye = SpdMatrix::identity(3);
  Eigen::MatrixXd b = random_square(3, rng);
  CHECK((solve_spd(eye, b) - b).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  const Eigen::MatrixXd inv = solve_spd(SpdMatrix(d), Eigen::MatrixXd::Identity(2, 2));
  CHECK(inv(0, 0) == doctest::Approx(0.5));
  CHECK(inv(1, 1) == doctest::Approx(0.25));

  const SpdMatrix a(random_spd(6, rng));
  const Eigen::MatrixXd rhs = random_square(6, rng);
  const Eigen::MatrixXd x = solve_spd(a, rhs);
  const double rel = (a.entries() * x - rhs).norm() / rhs.norm();
  CHECK(rel < 1e-9);
}

TEST_CASE("vech uses column-major lower-triangle order") {
  const HalfVector v = vech(SpdMatrix::identity(2));
  CHECK(v.values(0) == 1.0);
  CHECK(v.values(1) == 0.0);
  CHECK(v.values(2) == 1.0);

  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2, 3;
  const HalfVector w = vech(a);
  CHECK(w.values(0) == 1.0);
  CHECK(w.values(1) == 2.0);
  CHECK(w.values(2) == 3.0);
}

TEST_CASE("vech round-trips exactly for all dims 1..12") {
  Rng rng(5);
  for (int p = 1; p <= 12; ++p) {
    const Eigen::MatrixXd raw = random_square(p, rng);
    const Eigen::MatrixXd a = 0.5 * (raw + raw.transpose());
    CHECK((vech_inverse(vech(a)) - a).cwiseAbs().maxCoeff() == 0.0);
  }
  HalfVector bad;
  bad.dim = 3;
  bad.values = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(vech_inverse(bad), LengthMismatch);
}

TEST_CASE("riemannian distance: identity, scaling, symmetry") {
  Rng rng(13);
  const SpdMatrix a(random_spd(4, rng));
  CHECK(riemannian_distance(a, a) == doctest::Approx(0.0).epsilon(1e-10));

  const SpdMatrix eye = SpdMatrix::identity(4);
  const SpdMatrix scaled(std::exp(1.0) * Eigen::MatrixXd::Identity(4, 4));
  CHECK(riemannian_distance(eye, scaled) == doctest::Approx(2.0));

  const SpdMatrix b(random_spd(4, rng));
  CHECK(riemannian_distance(a, b) ==
        doctest::Approx(riemannian_distance(b, a)).epsilon(1e-10));
}

TEST_CASE("riemannian distance is affine invariant") {
  Rng rng(17);
  for (int p : {2, 3, 6}) {
    for (int rep = 0; rep < 100; ++rep) {
      const SpdMatrix a(random_spd(p, rng));
      const SpdMatrix b(random_spd(p, rng));
      Eigen::MatrixXd m = random_square(p, rng);
      while (std::abs(m.determinant()) < 1e-3) m = random_square(p, rng);
      const SpdMatrix ma(m * a.entries() * m.transpose());
      const SpdMatrix mb(m * b.entries() * m.transpose());
      CHECK(riemannian_distance(ma, mb) ==
            doctest::Approx(riemannian_distance(a, b)).epsilon(1e-8));
    }
  }
}

TEST_CASE("wishart sampler is deterministic per seed and rejects bad dof") {
  const SpdMatrix scale = SpdMatrix::identity(3);
  Rng a(42), b(42);
  const SpdMatrix wa = sample_wishart(scale, 5.5, a);
  const SpdMatrix wb = sample_wishart(scale, 5.5, b);
  CHECK((wa.entries() - wb.entries()).cwiseAbs().maxCoeff() == 0.0);
  Rng c(42);
  CHECK_THROWS_AS(sample_wishart(scale, 1.5, c), InvalidDof);
}

TEST_CASE("wishart moments match nu*Sigma and the covariance identity") {
  // batch-based Monte Carlo standard errors, p = 2
  const int draws = 100000;
  const int batches = 100;
  Eigen::MatrixXd sig(2, 2);
  sig << 1.0, 0.3, 0.3, 2.0;
  const SpdMatrix scale(sig);
  const double nu = 5.0;
  Rng rng(2024);

  const int per_batch = draws / batches;
  // track mean of W_00, W_01, W_11 and cov(W_00, W_01) per batch
  std::vector<Eigen::Vector3d> batch_mean(batches);
  std::vector<double> batch_cov(batches);
  for (int b = 0; b < batches; ++b) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    double sum00 = 0, sum01 = 0, sum_prod = 0;
    for (int d = 0; d < per_batch; ++d) {
      const SpdMatrix w = sample_wishart(scale, nu, rng);
      sum += Eigen::Vector3d(w(0, 0), w(0, 1), w(1, 1));
      sum00 += w(0, 0);
      sum01 += w(0, 1);
      sum_prod += w(0, 0) * w(0, 1);
    }
    batch_mean[b] = sum / per_batch;
    batch_cov[b] = sum_prod / per_batch -
                   (sum00 / per_batch) * (sum01 / per_batch);
  }
  auto check_within = [&](auto extract, double expected, const char* what) {
    double m = 0;
    for (int b = 0; b < batches; ++b) m += extract(b);
    m /= batches;
    double v = 0;
    for (int b = 0; b < batches; ++b) v += (extract(b) - m) * (extract(b) - m);
    const double se = std::sqrt(v / (batches - 1)) / std::sqrt(batches);
    INFO(what << ": estimate " << m << " expected " << expected << " se " << se);
    CHECK(std::abs(m - expected) < 5.0 * se);
  };
  check_within([&](int b) { return batch_mean[b](0); }, nu * sig(0, 0), "E W00");
  check_within([&](int b) { return batch_mean[b](1); }, nu * sig(0, 1), "E W01");
  check_within([&](int b) { return batch_mean[b](2); }, nu * sig(1, 1), "E W11");
  // Cov(W_00, W_01) = nu (S_00 S_01 + S_01 S_00)
  check_within([&](int b) { return batch_cov[b]; },
               nu * 2.0 * sig(0, 0) * sig(0, 1), "Cov(W00,W01)");
}

TEST_CASE("integer-dof wishart agrees with the outer-product construction") {
  const int draws = 100000;
  const int batches = 100;
  Eigen::MatrixXd sig(2, 2);
  sig << 1.0, 0.4, 0.4, 1.5;
  const SpdMatrix scale(sig);
  const int nu = 5;
  Rng rng_a(99), rng_b(101);

  auto batch_stats = [&](auto draw_fn, Rng& rng) {
    std::vector<Eigen::Vector4d> stats(batches);
    const int per_batch = draws / batches;
    for (int b = 0; b < batches; ++b) {
      Eigen::Vector4d sum = Eigen::Vector4d::Zero();
      for (int d = 0; d < per_batch; ++d) {
        const Eigen::MatrixXd w = draw_fn(rng);
        sum += Eigen::Vector4d(w(0, 0), w(0, 1), w(1, 1),
                               w(0, 0) * w(0, 0));
      }
      stats[b] = sum / per_batch;
    }
    return stats;
  };
  auto bartlett = [&](Rng& rng) {
    return sample_wishart(scale, nu, rng).entries();
  };
  auto outer = [&](Rng& rng) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
    for (int r = 0; r < nu; ++r) {
      Eigen::VectorXd z(2);
      z << rng.normal(), rng.normal();
      const Eigen::VectorXd x = scale.chol() * z;
      w += x * x.transpose();
    }
    return w;
  };
  const auto sa = batch_stats(bartlett, rng_a);
  const auto sb = batch_stats(outer, rng_b);
  for (int coord = 0; coord < 4; ++coord) {
    double ma = 0, mb = 0;
    for (int b = 0; b < batches; ++b) {
      ma += sa[b](coord);
      mb += sb[b](coord);
    }
    ma /= batches;
    mb /= batches;
    double va = 0, vb = 0;
    for (int b = 0; b < batches; ++b) {
      va += (sa[b](coord) - ma) * (sa[b](coord) - ma);
      vb += (sb[b](coord) - mb) * (sb[b](coord) - mb);
    }
    const double se = std::sqrt((va + vb) / (batches - 1)) / std::sqrt(batches);
    INFO("coordinate " << coord << ": " << ma << " vs " << mb);
    CHECK(std::abs(ma - mb) < 5.0 * se);
  }
}

TEST_CASE("inverse-wishart mean and duality with the wishart") {
  const int draws = 100000;
  const int batches = 100;
  const SpdMatrix psi(4.0 * Eigen::MatrixXd::Identity(2, 2));
  const double kappa = 7.0;  // E = Psi / (kappa - p - 1) = I
  Rng rng(31);
  const int per_batch = draws / batches;
  std::vector<double> b00(batches), b01(batches);
  for (int b = 0; b < batches; ++b) {
    double s00 = 0, s01 = 0;
    for (int d = 0; d < per_batch; ++d) {
      const SpdMatrix s = sample_inverse_wishart(psi, kappa, rng);
      s00 += s(0, 0);
      s01 += s(0, 1);
    }
    b00[b] = s00 / per_batch;
    b01[b] = s01 / per_batch;
  }
  auto check = [&](const std::vector<double>& xs, double expected) {
    double m = 0;
    for (double x : xs) m += x;
    m /= batches;
    double v = 0;
    for (double x : xs) v += (x - m) * (x - m);
    const double se = std::sqrt(v / (batches - 1)) / std::sqrt(batches);
    CHECK(std::abs(m - expected) < 4.0 * se);
  };
  check(b00, 1.0);
  check(b01, 0.0);

  // duality at p=1: inverse of IW(psi, kappa) is W(1/psi, kappa);
  // Kolmogorov-Smirnov against the chi-squared-based CDF via MC reference
  Rng rng_a(55), rng_b(56);
  const SpdMatrix psi1(Eigen::MatrixXd::Constant(1, 1, 2.0));
  const SpdMatrix psi1_inv(Eigen::MatrixXd::Constant(1, 1, 0.5));
  const int m = 4000;
  std::vector<double> inv_draws(m), wis_draws(m);
  for (int d = 0; d < m; ++d) {
    inv_draws[d] = 1.0 / sample_inverse_wishart(psi1, 5.0, rng_a)(0, 0);
    wis_draws[d] = sample_wishart(psi1_inv, 5.0, rng_b)(0, 0);
  }
  std::sort(inv_draws.begin(), inv_draws.end());
  std::sort(wis_draws.begin(), wis_draws.end());
  // two-sample KS statistic
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  while (i < inv_draws.size() && j < wis_draws.size()) {
    if (inv_draws[i] <= wis_draws[j])
      ++i;
    else
      ++j;
    ks = std::max(ks, std::abs(static_cast<double>(i) / m -
                               static_cast<double>(j) / m));
  }
  // p >= 0.01 corresponds to ks < 1.627 * sqrt(2/m)
  CHECK(ks < 1.627 * std::sqrt(2.0 / m));

  Rng rng_c(1);
  CHECK_THROWS_AS(sample_inverse_wishart(psi, 0.5, rng_c), InvalidDof);
}

TEST_CASE("standardize_to_correlation") {
  CHECK((standardize_to_correlation(SpdMatrix::identity(3)).entries() -
         Eigen::MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  Eigen::MatrixXd a(2, 2);
  a << 4, 2, 2, 9;
  const SpdMatrix r = standardize_to_correlation(a);
  CHECK(r(0, 0) == doctest::Approx(1.0));
  CHECK(r(1, 1) == doctest::Approx(1.0));
  CHECK(r(0, 1) == doctest::Approx(1.0 / 3.0));

  Eigen::MatrixXd singular(2, 2);
  singular << 4, 2, 2, 1;  // determinant 0
  CHECK_THROWS_AS(standardize_to_correlation(singular), NotPositiveDefinite);

  Eigen::MatrixXd zero_diag(2, 2);
  zero_diag << 0, 0, 0, 1;
  CHECK_THROWS_AS(standardize_to_correlation(zero_diag), ZeroDiagonal);
}

TEST_CASE("rng split streams diverge and reproduce") {
  Rng a(123), b(123);
  Rng child_a = a.split();
  Rng child_b = b.split();
  CHECK(child_a.next_u64() == child_b.next_u64());
  CHECK(a.next_u64() == b.next_u64());
  Rng s1 = Rng::from_stream(9, 0);
  Rng s2 = Rng::from_stream(9, 1);
  CHECK(s1.next_u64() != s2.next_u64());
}
