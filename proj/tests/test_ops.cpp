#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dfrw/error.hpp"
#include "dfrw/generators.hpp"
#include "dfrw/ops.hpp"

using namespace dfrw;

TEST_CASE("self-test suite passes") {
  for (int d : {2, 3, 4}) {
    const auto checks = operator_self_test(d, d == 4 ? 4 : 8, 11);
    CHECK(checks.size() >= 10);
    for (const auto& c : checks) {
      INFO(c.name << " residual " << c.residual);
      CHECK(c.passed());
    }
  }
}

TEST_CASE("gradient of a linear-in-one-site function") {
  const Torus t(2, 4);
  ScalarField f(t);
  f[5] = 1.0;
  const VectorField g = grad(f);
  CHECK(antisymmetry_residual(g) == 0.0);
  CHECK(gradient_residual(g) == 0.0);
  CHECK(g.at(5, 0) == -1.0);
  CHECK(g.at(t.neighbor(5, 1), 0) == 1.0);
}

TEST_CASE("div_star is the adjoint of grad and Δ = -∇*∇") {
  const Torus t(3, 4);
  Rng rng = make_rng(5);
  const ScalarField f = random_scalar(t, rng);
  const VectorField u = random_vector(t, rng);
  CHECK(inner(grad(f), u) == doctest::Approx(inner(f, div_star(u))).epsilon(1e-12));
  const ScalarField lap = laplacian(f);
  const ScalarField dd = div_star(grad(f));
  for (std::size_t x = 0; x < t.sites(); ++x) CHECK(lap[x] == doctest::Approx(-dd[x]).epsilon(1e-12));
}

TEST_CASE("div_star rejects fields outside V") {
  const Torus t(2, 4);
  VectorField u(t);
  u.at(0, 0) = 1.0;
  CHECK_THROWS_AS(div_star(u), ValidationError);
}

TEST_CASE("gradient projection") {
  const Torus t(2, 8);
  Rng rng = make_rng(6);
  const VectorField u = random_vector(t, rng);
  const VectorField p = proj_gradient(u);
  CHECK(gradient_residual(p) < 1e-12);
  const VectorField pp = proj_gradient(p);
  CHECK(norm(pp - p) < 1e-12 * norm(p));
  const VectorField g = grad(random_scalar(t, rng));
  CHECK(norm(proj_gradient(g) - g) < 1e-12 * norm(g));
  // ‖Λf‖ = ‖f‖ on mean-zero f
  const ScalarField f = random_scalar(t, rng);
  CHECK(norm(riesz_lambda(f)) == doctest::Approx(norm(f)).epsilon(1e-12));
}

TEST_CASE("generator splits into S and A") {
  const auto s = gen_local_rules(2, 8, 3);
  Rng rng = make_rng(7);
  const ScalarField f = random_scalar(s.env.torus(), rng);
  const ScalarField lhs = apply_L(s.env, f);
  const ScalarField rhs = apply_A(s.env, f) - apply_S(f);
  for (std::size_t x = 0; x < f.size(); ++x) CHECK(lhs[x] == doctest::Approx(rhs[x]).epsilon(1e-12));
  // Divergence-free drift makes A skew and L mean-preserving.
  const ScalarField g = random_scalar(s.env.torus(), rng);
  CHECK(std::abs(inner(f, apply_A(s.env, g)) + inner(apply_A(s.env, f), g)) < 1e-12);
  CHECK(std::abs(apply_L(s.env, f).mean()) < 1e-12);
}

TEST_CASE("A = ∇*H∇ and truncation") {
  const auto s = gen_local_rules(3, 4, 8);
  Rng rng = make_rng(9);
  const ScalarField f = random_scalar(s.env.torus(), rng);
  const ScalarField a = apply_A(s.env, f);
  const ScalarField viaH = div_star(apply_H(s.stream, grad(f)));
  for (std::size_t x = 0; x < f.size(); ++x) CHECK(a[x] == doctest::Approx(viaH[x]).epsilon(1e-12));
  const VectorField u = random_vector(s.env.torus(), rng);
  CHECK(norm(apply_H_trunc(s.stream, 1.0, u) - apply_H(s.stream, u)) == 0.0);
  CHECK(norm(apply_H_trunc(s.stream, 0.1, u)) == 0.0);
}
