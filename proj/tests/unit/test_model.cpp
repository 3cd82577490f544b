#include <doctest.h>

#include <random>

#include "iqp/model.hpp"
#include "util.hpp"

using iqp::BetaPolicy;
using iqp::IqpInstance;
using iqp::Matrix;
using iqp::Vector;

namespace {

IqpInstance one_var(std::int64_t lo, std::int64_t hi) {
  IqpInstance inst;
  inst.n = 1;
  inst.q_hat = Matrix::Identity(1, 1);
  inst.l_hat = Vector::Zero(1);
  inst.domains = {{lo, hi}};
  return inst;
}

// X = (1,x)(1,x)^T
Matrix rank_one_lift(const std::vector<std::int64_t>& x) {
  const int n = static_cast<int>(x.size());
  Vector v(n + 1);
  v(0) = 1.0;
  for (int i = 0; i < n; ++i) v(i + 1) = static_cast<double>(x[i]);
  return v * v.transpose();
}

int dense_rank(const Matrix& m) {
  const auto dec = iqp::linalg::spectral_decompose(m);
  int r = 0;
  for (int i = 0; i < dec.eigenvalues.size(); ++i) {
    if (std::abs(dec.eigenvalues(i)) > 1e-10) ++r;
  }
  return r;
}

}  // namespace

TEST_CASE("build_relaxation: binary domain facet pair") {
  const auto rel = iqp::build_relaxation(one_var(0, 1));
  REQUIRE(rel.m() == 2);
  // lower facet j=0: -x_ii + x_0i <= 0; default beta = j(j+1) = 0
  const auto& lower = rel.facets[0];
  CHECK(!lower.upper);
  CHECK(lower.beta == doctest::Approx(0.0));
  CHECK(lower.a00 == doctest::Approx(0.0));
  CHECK(lower.a0i == doctest::Approx(0.5));
  CHECK(lower.aii == doctest::Approx(-1.0));
  // upper facet: x_ii - x_0i <= 0; default beta = -l*u = 0
  const auto& upper = rel.facets[1];
  CHECK(upper.upper);
  CHECK(upper.beta == doctest::Approx(0.0));
  CHECK(upper.a00 == doctest::Approx(0.0));
  CHECK(upper.a0i == doctest::Approx(-0.5));
  CHECK(upper.aii == doctest::Approx(1.0));
}

TEST_CASE("build_relaxation: ternary domain facets and rank-one upper") {
  const auto rel = iqp::build_relaxation(one_var(-1, 1));
  REQUIRE(rel.m() == 3);
  // LowerFacet(-1): -x_ii - x_0i <= 0
  CHECK(rel.facets[0].j == -1);
  CHECK(rel.facets[0].a0i == doctest::Approx(-0.5));
  CHECK(rel.facets[0].beta == doctest::Approx(0.0));
  // LowerFacet(0): -x_ii + x_0i <= 0
  CHECK(rel.facets[1].j == 0);
  CHECK(rel.facets[1].a0i == doctest::Approx(0.5));
  // UpperFacet: x_ii <= 1 under the default policy (a00 = a0i = 0)
  const auto& up = rel.facets[2];
  CHECK(up.upper);
  CHECK(up.beta == doctest::Approx(1.0));
  CHECK(up.a00 == doctest::Approx(0.0));
  CHECK(up.a0i == doctest::Approx(0.0));
  CHECK(up.aii == doctest::Approx(1.0));
  // symmetric domain: beta = -lu equals (l-u)^2/4, hence rank one
  CHECK(up.rank_one());
}

TEST_CASE("build_relaxation: facet count and augmented matrix layout") {
  std::mt19937_64 rng(1);
  IqpInstance inst = testutil::random_instance(rng, 3, -2, 3, true);
  inst.c_hat = 1.5;
  const auto rel = iqp::build_relaxation(inst);
  // u - l + 1 facets per variable
  CHECK(rel.m() == 3 * (3 - (-2) + 1));
  CHECK(rel.p() == 1);
  CHECK(rel.dim == 4);
  CHECK(rel.q(0, 0) == doctest::Approx(inst.c_hat));
  for (int i = 1; i <= 3; ++i) {
    CHECK(rel.q(0, i) == doctest::Approx(inst.l_hat(i - 1) / 2.0));
    for (int k = 1; k <= 3; ++k) {
      CHECK(rel.q(i, k) == doctest::Approx(inst.q_hat(i - 1, k - 1)));
    }
  }
  // b layout: b0 = 1, then facet betas, then linear betas
  const Vector b = rel.b();
  CHECK(b(0) == doctest::Approx(1.0));
  for (int f = 0; f < rel.m(); ++f) {
    CHECK(b(1 + f) == doctest::Approx(rel.facets[f].beta));
  }
  CHECK(b(1 + rel.m()) == doctest::Approx(rel.linear[0].beta));
}

TEST_CASE("facet validity and tightness on lifted integer points") {
  // <A_f, X> <= beta holds for all x_i in D_i, with equality exactly at
  // x_i in {j, j+1} (lower) or {l, u} (upper)
  IqpInstance inst = one_var(-2, 2);
  const auto rel = iqp::build_relaxation(inst);
  for (const auto& f : rel.facets) {
    const Matrix a = iqp::dense_facet_matrix(rel, f);
    for (std::int64_t x = -2; x <= 2; ++x) {
      const Matrix lift = rank_one_lift({x});
      const double val = (a.transpose() * lift).trace();
      CHECK(val <= f.beta + 1e-12);
      const bool tight =
          f.upper ? (x == -2 || x == 2) : (x == f.j || x == f.j + 1);
      if (tight) {
        CHECK(val == doctest::Approx(f.beta));
      } else {
        CHECK(val < f.beta - 1e-9);
      }
    }
  }
}

TEST_CASE("rank predicate matches dense-reconstructed rank for all policies") {
  IqpInstance inst = one_var(-1, 2);
  for (const auto policy :
       {BetaPolicy::ZeroFirstEntry, BetaPolicy::AllZero, BetaPolicy::RankOne}) {
    const auto rel = iqp::build_relaxation(inst, policy);
    for (const auto& f : rel.facets) {
      const int r = dense_rank(iqp::dense_facet_matrix(rel, f));
      CHECK(r == (f.rank_one() ? 1 : 2));
    }
    if (policy == BetaPolicy::RankOne) {
      for (const auto& f : rel.facets) CHECK(f.rank_one());
    }
  }
}

TEST_CASE("linear constraint matrices have rank two") {
  std::mt19937_64 rng(2);
  const IqpInstance inst = testutil::random_instance(rng, 4, -1, 1, true);
  const auto rel = iqp::build_relaxation(inst);
  REQUIRE(rel.p() == 1);
  CHECK(dense_rank(iqp::dense_linear_matrix(rel, rel.linear[0])) == 2);
}

TEST_CASE("facet_inner_product examples and dense agreement") {
  const auto rel3 = iqp::build_relaxation(one_var(-1, 1));
  CHECK(iqp::facet_inner_product(rel3.facets[2], Matrix::Identity(2, 2)) ==
        doctest::Approx(1.0));  // upper facet, only aii survives
  const auto rel2 = iqp::build_relaxation(one_var(0, 1));
  CHECK(iqp::facet_inner_product(rel2.facets[0], Matrix::Identity(2, 2)) ==
        doctest::Approx(-1.0));  // LowerFacet(0)

  std::mt19937_64 rng(3);
  const IqpInstance inst = testutil::random_instance(rng, 5, -2, 2);
  const auto rel = iqp::build_relaxation(inst);
  const Matrix w = testutil::random_symmetric(rng, rel.dim);
  for (const auto& f : rel.facets) {
    const double dense =
        (iqp::dense_facet_matrix(rel, f).transpose() * w).trace();
    CHECK(std::abs(iqp::facet_inner_product(f, w) - dense) < 1e-12);
  }
}

TEST_CASE("linear_inner_product examples and dense agreement") {
  IqpInstance inst = one_var(0, 1);
  inst.linear_constraints.push_back({Vector::Ones(1), 0.0});
  const auto rel = iqp::build_relaxation(inst);
  const auto& lc = rel.linear[0];
  // W = I: w01 = 0, and default beta makes a00 = beta - rhs
  CHECK(iqp::linear_inner_product(lc, Matrix::Identity(2, 2)) ==
        doctest::Approx(lc.a00));
  Matrix w = Matrix::Identity(2, 2);
  w(0, 1) = w(1, 0) = 1.0;
  CHECK(iqp::linear_inner_product(lc, w) == doctest::Approx(lc.a00 + 1.0));

  std::mt19937_64 rng(4);
  const IqpInstance rnd = testutil::random_instance(rng, 6, -1, 1, true);
  const auto rrel = iqp::build_relaxation(rnd);
  const Matrix rw = testutil::random_symmetric(rng, rrel.dim);
  const double dense =
      (iqp::dense_linear_matrix(rrel, rrel.linear[0]).transpose() * rw)
          .trace();
  CHECK(std::abs(iqp::linear_inner_product(rrel.linear[0], rw) - dense) <
        1e-12);
}

TEST_CASE("objective_value examples and lifted-form equivalence") {
  IqpInstance inst;
  inst.n = 2;
  inst.q_hat = Matrix::Identity(2, 2);
  inst.l_hat = Vector::Zero(2);
  inst.c_hat = 0.0;
  inst.domains = {{-1, 1}, {-1, 1}};
  CHECK(iqp::objective_value(inst, {0, 0}) == doctest::Approx(0.0));
  CHECK(iqp::objective_value(inst, {1, -1}) == doctest::Approx(2.0));

  std::mt19937_64 rng(5);
  const IqpInstance rnd = testutil::random_instance(rng, 4, -2, 2);
  const auto rel = iqp::build_relaxation(rnd);
  std::uniform_int_distribution<std::int64_t> d(-2, 2);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::int64_t> x(4);
    for (auto& xi : x) xi = d(rng);
    // <Q, X> on the rank-one lift equals the quadratic objective
    const double lifted = (rel.q.transpose() * rank_one_lift(x)).trace();
    CHECK(lifted == doctest::Approx(iqp::objective_value(rnd, x)));
  }
}

TEST_CASE("point_feasible and validate") {
  IqpInstance inst = one_var(0, 1);
  inst.linear_constraints.push_back({Vector::Ones(1), 0.0});
  CHECK(iqp::point_feasible(inst, {0}));
  CHECK(!iqp::point_feasible(inst, {1}));   // violates x <= 0
  CHECK(!iqp::point_feasible(inst, {-1}));  // outside domain
  inst.domains[0] = {2, 1};
  CHECK_THROWS_AS(inst.validate(), iqp::InvalidInstance);
}
