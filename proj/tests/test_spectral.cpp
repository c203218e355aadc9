#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dfrw/ops.hpp"
#include "dfrw/spectral.hpp"

using namespace dfrw;

TEST_CASE("forward and inverse transforms round trip") {
  const Torus t(3, 6);
  Rng rng = make_rng(1);
  const ScalarField f = random_scalar(t, rng, false);
  std::vector<Complex> z = transform(f);
  fft_inverse(t, z);
  for (std::size_t i = 0; i < t.sites(); ++i) {
    CHECK(z[i].real() == doctest::Approx(f[i]).epsilon(1e-12));
    CHECK(std::abs(z[i].imag()) < 1e-12);
  }
}

TEST_CASE("transform convention e^{-ip.x}") {
  const Torus t(2, 8);
  ScalarField delta(t);
  delta[t.index({0, 1, 0, 0})] = 1.0;
  const auto z = transform(delta);
  // momentum index (0, 1): p = (0, 2π/8)
  const Complex expect = std::polar(1.0, -2.0 * std::numbers::pi / 8.0);
  CHECK(std::abs(z[t.index({0, 1, 0, 0})] - expect) < 1e-14);
}

TEST_CASE("cosine deficit and Laplacian symbol") {
  const Torus t(2, 8);
  const auto def = cosine_deficit(t);
  CHECK(def[0] == 0.0);
  Rng rng = make_rng(2);
  const ScalarField f = random_scalar(t, rng);
  // S = |Δ| has symbol 2·deficit: S applied after the Green multiplier is 2·f.
  const ScalarField g = apply_multiplier({Symbol::Green}, f);
  const ScalarField back = apply_S(g);
  for (std::size_t i = 0; i < t.sites(); ++i) CHECK(back[i] == doctest::Approx(2.0 * f[i]).epsilon(1e-10));
}

TEST_CASE("square-root multipliers compose to |Δ| and its inverse") {
  const Torus t(3, 4);
  Rng rng = make_rng(3);
  const ScalarField f = random_scalar(t, rng);
  const ScalarField s2 = apply_multiplier({Symbol::Sqrt}, apply_multiplier({Symbol::Sqrt}, f));
  const ScalarField sf = apply_S(f);
  for (std::size_t i = 0; i < t.sites(); ++i) CHECK(s2[i] == doctest::Approx(sf[i]).epsilon(1e-10));
  const ScalarField id = apply_multiplier({Symbol::InvSqrt}, apply_multiplier({Symbol::Sqrt}, f));
  for (std::size_t i = 0; i < t.sites(); ++i) CHECK(id[i] == doctest::Approx(f[i]).epsilon(1e-10));
}

TEST_CASE("multipliers annihilate the zero mode") {
  const Torus t(2, 4);
  ScalarField one(t, std::vector<double>(t.sites(), 1.0));
  for (Symbol s : {Symbol::Green, Symbol::InvSqrt, Symbol::Sqrt}) {
    const ScalarField g = apply_multiplier({s}, one);
    for (std::size_t i = 0; i < t.sites(); ++i) CHECK(std::abs(g[i]) < 1e-14);
  }
}

TEST_CASE("shifted inverse") {
  const Torus t(2, 8);
  Rng rng = make_rng(4);
  const ScalarField f = random_scalar(t, rng, false);
  for (double lambda : {1.0, 1e-3}) {
    const ScalarField lhs = lambda * f + apply_S(f);
    const ScalarField back = apply_shifted_inverse(lambda, lhs);
    for (std::size_t i = 0; i < t.sites(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-9));
  }
  const ScalarField fc = f.centered();
  const ScalarField back0 = apply_shifted_inverse(0.0, apply_S(fc));
  for (std::size_t i = 0; i < t.sites(); ++i) CHECK(back0[i] == doctest::Approx(fc[i]).epsilon(1e-9));
}
