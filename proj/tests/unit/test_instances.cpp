#include <doctest.h>

#include <random>

#include "iqp/instances.hpp"
#include "iqp/linalg.hpp"

using iqp::GenSpec;
using iqp::IqpInstance;

namespace {

bool instances_equal(const IqpInstance& a, const IqpInstance& b) {
  if (a.n != b.n || a.c_hat != b.c_hat || a.domains != b.domains) return false;
  if ((a.q_hat - b.q_hat).cwiseAbs().maxCoeff() != 0.0) return false;
  if ((a.l_hat - b.l_hat).cwiseAbs().maxCoeff() != 0.0) return false;
  if (a.linear_constraints.size() != b.linear_constraints.size()) return false;
  for (size_t i = 0; i < a.linear_constraints.size(); ++i) {
    if (a.linear_constraints[i].rhs != b.linear_constraints[i].rhs) {
      return false;
    }
    if ((a.linear_constraints[i].a - b.linear_constraints[i].a)
            .cwiseAbs()
            .maxCoeff() != 0.0) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("generator determinism") {
  GenSpec spec;
  spec.n = 8;
  spec.seed = 12345;
  const auto a = iqp::generate(spec);
  const auto b = iqp::generate(spec);
  CHECK(iqp::format_instance(a) == iqp::format_instance(b));
}

TEST_CASE("DenseSpectrum: negative eigenvalue count is exact") {
  for (const int p : {0, 30, 50, 100}) {
    GenSpec spec;
    spec.family = iqp::Family::DenseSpectrum;
    spec.n = 10;
    spec.p = p;
    spec.seed = 7 + p;
    const auto inst = iqp::generate(spec);
    const auto dec = iqp::linalg::spectral_decompose(inst.q_hat);
    int neg = 0;
    for (int i = 0; i < 10; ++i) {
      if (dec.eigenvalues(i) < 0.0) ++neg;
    }
    CHECK(neg == p * 10 / 100);
    if (p == 0) CHECK(dec.eigenvalues(0) > 0.0);
    if (p == 100) CHECK(dec.eigenvalues(9) < 0.0);
  }
}

TEST_CASE("Sparse: empirical density near p percent") {
  // off-diagonal nonzero density at p=25 on n=50 stays in [0.15, 0.35]
  // across 20 seeds
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenSpec spec;
    spec.family = iqp::Family::Sparse;
    spec.n = 50;
    spec.p = 25;
    spec.seed = seed;
    const auto inst = iqp::generate(spec);
    int nz = 0, total = 0;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < i; ++j) {
        ++total;
        if (inst.q_hat(i, j) != 0.0) ++nz;
      }
    }
    const double density = static_cast<double>(nz) / total;
    CHECK(density > 0.15);
    CHECK(density < 0.35);
  }
}

TEST_CASE("LowRank: half the spectrum is zero") {
  GenSpec spec;
  spec.family = iqp::Family::LowRank;
  spec.n = 12;
  spec.p = 50;
  spec.seed = 99;
  const auto inst = iqp::generate(spec);
  const auto dec = iqp::linalg::spectral_decompose(inst.q_hat);
  int zeros = 0;
  for (int i = 0; i < 12; ++i) {
    if (std::abs(dec.eigenvalues(i)) < 1e-10) ++zeros;
  }
  CHECK(zeros == 6);
}

TEST_CASE("Knapsack constraints: weights in {1..5}, feasible rhs") {
  GenSpec spec;
  spec.n = 10;
  spec.constraint = iqp::ConstraintKind::Knapsack;
  spec.seed = 4;
  const auto inst = iqp::generate(spec);
  REQUIRE(inst.linear_constraints.size() == 1);
  const auto& lc = inst.linear_constraints[0];
  double total = 0.0;
  for (int i = 0; i < 10; ++i) {
    CHECK(lc.a(i) >= 1.0);
    CHECK(lc.a(i) <= 5.0);
    CHECK(lc.a(i) == std::floor(lc.a(i)));
    total += lc.a(i);
  }
  CHECK(lc.rhs >= 1.0);
  CHECK(lc.rhs <= total);
}

TEST_CASE("SumNonpositive constraint") {
  GenSpec spec;
  spec.n = 5;
  spec.constraint = iqp::ConstraintKind::SumNonpositive;
  spec.seed = 3;
  const auto inst = iqp::generate(spec);
  REQUIRE(inst.linear_constraints.size() == 1);
  CHECK(inst.linear_constraints[0].a.isApproxToConstant(1.0));
  CHECK(inst.linear_constraints[0].rhs == 0.0);
}

TEST_CASE("round-trip: 100 random instances survive format/parse bitwise") {
  std::mt19937_64 meta(2);
  for (int t = 0; t < 100; ++t) {
    GenSpec spec;
    spec.n = 2 + static_cast<int>(meta() % 10);
    spec.family = static_cast<iqp::Family>(meta() % 3);
    spec.p = static_cast<int>(meta() % 101);
    spec.domain = static_cast<iqp::DomainKind>(meta() % 3);
    spec.lo = -2 - static_cast<std::int64_t>(meta() % 4);
    spec.hi = 1 + static_cast<std::int64_t>(meta() % 4);
    spec.constraint = static_cast<iqp::ConstraintKind>(meta() % 3);
    spec.seed = meta();
    const auto inst = iqp::generate(spec);
    const auto back = iqp::parse_instance(iqp::format_instance(inst));
    CHECK(instances_equal(inst, back));
  }
}

TEST_CASE("serialization: no constraint section when none exist") {
  GenSpec spec;
  spec.n = 3;
  spec.seed = 1;
  const auto inst = iqp::generate(spec);
  CHECK(iqp::format_instance(inst).find("lin") == std::string::npos);
}

TEST_CASE("parse errors carry a line number") {
  CHECK_THROWS_AS(iqp::parse_instance("bogus header\n"), iqp::ParseError);
  try {
    iqp::parse_instance("iqp/1\nnot_a_number\n");
    FAIL("expected ParseError");
  } catch (const iqp::ParseError& e) {
    CHECK(e.line >= 1);
  }
}

TEST_CASE("file round-trip through the filesystem") {
  GenSpec spec;
  spec.n = 4;
  spec.constraint = iqp::ConstraintKind::Knapsack;
  spec.seed = 8;
  const auto inst = iqp::generate(spec);
  const std::string path = "roundtrip_tmp.iqp";
  iqp::write_instance(inst, path);
  const auto back = iqp::read_instance(path);
  CHECK(instances_equal(inst, back));
  std::remove(path.c_str());
}
