#include <doctest.h>

#include <random>

#include "iqp/linalg.hpp"
#include "util.hpp"

using iqp::linalg::Matrix;
using iqp::linalg::Vector;
namespace la = iqp::linalg;

TEST_CASE("spectral_decompose: identity and diagonal") {
  const auto id = la::spectral_decompose(Matrix::Identity(3, 3));
  CHECK(id.eigenvalues.isApproxToConstant(1.0, 1e-12));
  CHECK((id.eigenvectors * id.eigenvectors.transpose())
            .isApprox(Matrix::Identity(3, 3), 1e-12));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  const auto dd = la::spectral_decompose(d);
  CHECK(dd.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(dd.eigenvalues(1) == doctest::Approx(2.0));
}

TEST_CASE("spectral_decompose: reconstruction and orthogonality residuals") {
  std::mt19937_64 rng(7);
  for (const int n : {10, 40, 100}) {
    const Matrix m = testutil::random_symmetric(rng, n, 2.0);
    const auto dec = la::spectral_decompose(m);
    const Matrix recon = dec.eigenvectors *
                         dec.eigenvalues.asDiagonal() *
                         dec.eigenvectors.transpose();
    CHECK((recon - m).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((dec.eigenvectors.transpose() * dec.eigenvectors -
           Matrix::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    for (int i = 1; i < n; ++i) {
      CHECK(dec.eigenvalues(i - 1) <= dec.eigenvalues(i));
    }
  }
}

TEST_CASE("spectral_decompose: non-finite input rejected") {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(la::spectral_decompose(m), la::InvalidInput);
}

TEST_CASE("min_eigenvalue examples") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 0.5;
  d(2, 2) = -2.0;
  CHECK(la::min_eigenvalue(d) == doctest::Approx(-2.0));
  CHECK(la::min_eigenvalue(Matrix::Identity(5, 5)) == doctest::Approx(1.0));
  Matrix offdiag = Matrix::Zero(2, 2);
  offdiag(0, 1) = offdiag(1, 0) = 1.0;
  CHECK(la::min_eigenvalue(offdiag) == doctest::Approx(-1.0));
}

TEST_CASE("dense_inverse examples and residuals") {
  CHECK(la::dense_inverse(Matrix::Identity(4, 4))
            .isApprox(Matrix::Identity(4, 4), 1e-14));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  const Matrix dinv = la::dense_inverse(d);
  CHECK(dinv(0, 0) == doctest::Approx(0.5));
  CHECK(dinv(1, 1) == doctest::Approx(0.25));

  std::mt19937_64 rng(11);
  const Matrix m = testutil::random_spd(rng, 20);
  const Matrix w = la::dense_inverse(m);
  CHECK((m * w - Matrix::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-8);
  // involution within 1e-6 for well-conditioned input
  CHECK((la::dense_inverse(w) - m).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("dense_inverse rejects indefinite input") {
  Matrix m = Matrix::Identity(3, 3);
  m(2, 2) = -1.0;
  CHECK_THROWS_AS(la::dense_inverse(m), la::NotPositiveDefinite);
}

TEST_CASE("woodbury_rank1 examples") {
  const Matrix w = Matrix::Identity(3, 3);
  Vector e0 = Vector::Zero(3);
  e0(0) = 1.0;
  // (I - 0.5 e0 e0^T)^{-1} = diag(2, 1, 1)
  const Matrix up = la::woodbury_rank1(w, e0, 0.5);
  CHECK(up(0, 0) == doctest::Approx(2.0));
  CHECK(up(1, 1) == doctest::Approx(1.0));
  CHECK(up(2, 2) == doctest::Approx(1.0));
  // c = 0 leaves W unchanged
  CHECK(la::woodbury_rank1(w, e0, 0.0).isApprox(w, 1e-15));

  std::mt19937_64 rng(3);
  const Matrix m = testutil::random_spd(rng, 15);
  const Matrix minv = la::dense_inverse(m);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(15);
  for (int i = 0; i < 15; ++i) v(i) = u(rng);
  const double c = 0.05;
  const Matrix expect = la::dense_inverse(m - c * v * v.transpose());
  CHECK((la::woodbury_rank1(minv, v, c) - expect).cwiseAbs().maxCoeff() <
        1e-8);
}

TEST_CASE("woodbury_rank1 singular guard") {
  const Matrix w = Matrix::Identity(2, 2);
  Vector v = Vector::Zero(2);
  v(0) = 1.0;
  // 1 - c v^T W v = 0 at c = 1
  CHECK_THROWS_AS(la::woodbury_rank1(w, v, 1.0), la::SingularUpdate);
}

TEST_CASE("woodbury_rank2 embeds rank-1 and matches the dense oracle") {
  std::mt19937_64 rng(5);
  const Matrix m = testutil::random_spd(rng, 8);
  const Matrix w = la::dense_inverse(m);
  Vector v(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 8; ++i) v(i) = u(rng);

  // E C = v v^T written as a rank-2 call with a zero second column
  Matrix e = Matrix::Zero(8, 2);
  e.col(0) = v;
  Matrix c = Matrix::Zero(2, 8);
  c.row(0) = v.transpose();
  const double s = 0.07;
  const Matrix r2 = la::woodbury_rank2(w, e, c, s);
  const Matrix r1 = la::woodbury_rank1(w, v, s);
  CHECK((r2 - r1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("woodbury_rank2 singular guard") {
  const Matrix w = Matrix::Identity(2, 2);
  Matrix e = Matrix::Zero(2, 2);
  e(0, 0) = 1.0;
  Matrix c = Matrix::Zero(2, 2);
  c(0, 0) = 1.0;
  // M - s E C = I - e0 e0^T singular at s = 1
  CHECK_THROWS_AS(la::woodbury_rank2(w, e, c, 1.0), la::SingularUpdate);
}

TEST_CASE("woodbury property sweep: 1000+ random updates, dims 2-30") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> dim_dist(2, 30);
  int cases = 0;
  while (cases < 1100) {
    const int n = dim_dist(rng);
    const Matrix m = testutil::random_spd(rng, n, 1.0);
    const Matrix w = la::dense_inverse(m);
    const bool rank1 = (cases % 2) == 0;
    if (rank1) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = u(rng);
      const double c = 0.2 * u(rng);
      const Matrix pert = m - c * v * v.transpose();
      if (la::min_eigenvalue(pert) < 1e-6) continue;
      const Matrix got = la::woodbury_rank1(w, v, c);
      CHECK((got - la::dense_inverse(pert)).cwiseAbs().maxCoeff() < 1e-8);
    } else {
      Matrix e(n, 2);
      for (int i = 0; i < n; ++i) {
        e(i, 0) = u(rng);
        e(i, 1) = u(rng);
      }
      // symmetric rank-2 perturbation E K E^T
      Matrix k(2, 2);
      k(0, 0) = 0.3 * u(rng);
      k(1, 1) = 0.3 * u(rng);
      k(0, 1) = k(1, 0) = 0.3 * u(rng);
      const double s = 0.5;
      const Matrix pert = m - s * e * (k * e.transpose());
      if (la::min_eigenvalue(pert) < 1e-6) continue;
      const Matrix got = la::woodbury_rank2(w, e, k * e.transpose(), s);
      CHECK((got - la::dense_inverse(pert)).cwiseAbs().maxCoeff() < 1e-8);
    }
    ++cases;
  }
  CHECK(cases >= 1000);
}
