#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dfrw/generators.hpp"
#include "dfrw/kv.hpp"
#include "dfrw/ops.hpp"

using namespace dfrw;

TEST_CASE("B and F are skew-symmetric") {
  for (int d : {2, 3}) {
    const auto s = gen_local_rules(d, 8, 2);
    for (KvOperator op : {KvOperator::B, KvOperator::F}) {
      const auto r = skew_residual(s.stream, op, 20, 3);
      CHECK(r.pairs == 20);
      CHECK(r.max_residual < 1e-12);
      CHECK(r.max_norm_u > 0.0);
    }
  }
}

TEST_CASE("B and F are conjugate through Λ") {
  const auto s = gen_synthetic_stream(2, 8, 4, 3.0, false);
  CHECK(conjugacy_residual(s.stream, 10, 5) < 1e-12);
}

TEST_CASE("B outputs mean-zero fields and F outputs gradients") {
  const auto s = gen_local_rules(2, 8, 6);
  Rng rng = make_rng(7);
  const ScalarField f = random_scalar(s.env.torus(), rng);
  CHECK(std::abs(apply_B(s.stream, f).mean()) < 1e-14);
  const VectorField fu = apply_F(s.stream, random_vector(s.env.torus(), rng));
  CHECK(gradient_residual(fu) < 1e-12);
}

TEST_CASE("truncation scan") {
  const auto s = gen_synthetic_stream(2, 8, 8, 2.5, false);
  const double top = s.stream.max_abs();
  const auto rows = truncation_scan(s.stream, {0.5, 2.0, top}, 5, 9);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].truncated_entries > rows[1].truncated_entries);
  CHECK(rows[2].truncated_entries == 0);
  CHECK(rows[2].max_abs == 0.0);
  CHECK(rows[0].max_abs > 0.0);
  CHECK_THROWS(skew_residual(s.stream, KvOperator::B, 0, 1));
}
