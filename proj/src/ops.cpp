#include "dfrw/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dfrw/error.hpp"
#include "dfrw/generators.hpp"
#include "dfrw/spectral.hpp"

namespace dfrw {

VectorField grad(const ScalarField& f) {
  const Torus& t = f.torus();
  VectorField u(t);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < t.directions(); ++k) u.at(x, k) = f[t.neighbor(x, k)] - f[x];
  }
  return u;
}

ScalarField div_star(const VectorField& u) {
  const double scale = std::max(1.0, max_abs(u.values()));
  if (antisymmetry_residual(u) > 1e-10 * scale) throw ValidationError("div_star needs an antisymmetric edge field");
  const Torus& t = u.torus();
  ScalarField out(t);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    double s = 0.0;
    for (int k = 0; k < t.directions(); ++k) s += u.at(x, k);
    out[x] = -s;
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Torus& t = f.torus();
  ScalarField out(t);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    double s = 0.0;
    for (int k = 0; k < t.directions(); ++k) s += f[t.neighbor(x, k)] - f[x];
    out[x] = s;
  }
  return out;
}

VectorField riesz_lambda(const ScalarField& f) {
  return grad(apply_multiplier({Symbol::InvSqrt}, f));
}

ScalarField riesz_lambda_star(const VectorField& u) {
  return apply_multiplier({Symbol::InvSqrt}, div_star(u));
}

VectorField proj_gradient(const VectorField& u) { return riesz_lambda(riesz_lambda_star(u)); }

namespace {

VectorField apply_H_impl(const StreamTensor& h, double K, const VectorField& u) {
  if (!(h.torus() == u.torus())) throw ValidationError("stream tensor and field sizes differ");
  const Torus& t = u.torus();
  const int n = t.directions();
  VectorField out(t);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < n; ++k) {
      const std::size_t xk = t.neighbor(x, k);
      double s = 0.0;
      for (int l = 0; l < n; ++l) {
        const double hkl = h.h(x, k, l);
        if (!(std::abs(hkl) <= K)) continue;
        s += hkl * (u.at(xk, l) + u.at(x, l));
      }
      out.at(x, k) = 0.5 * s;
    }
  }
  return out;
}

}  // namespace

VectorField apply_H(const StreamTensor& h, const VectorField& u) {
  return apply_H_impl(h, std::numeric_limits<double>::infinity(), u);
}

VectorField apply_H_trunc(const StreamTensor& h, double K, const VectorField& u) {
  if (K < 0.0) throw ValidationError("truncation level must be non-negative");
  return apply_H_impl(h, K, u);
}

ScalarField apply_L(const TorusEnv& env, const ScalarField& f) {
  const Torus& t = env.torus();
  ScalarField out(t);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    double s = 0.0;
    for (int k = 0; k < t.directions(); ++k) s += env.rate(x, k) * (f[t.neighbor(x, k)] - f[x]);
    out[x] = s;
  }
  return out;
}

ScalarField apply_S(const ScalarField& f) { return -1.0 * laplacian(f); }

ScalarField apply_A(const TorusEnv& env, const ScalarField& f) {
  const Torus& t = env.torus();
  ScalarField out(t);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    double s = 0.0;
    for (int k = 0; k < t.directions(); ++k) s += env.b(x, k) * (f[t.neighbor(x, k)] - f[x]);
    out[x] = s;
  }
  return out;
}

ScalarField random_scalar(const Torus& torus, Rng& rng, bool mean_zero) {
  std::normal_distribution<double> normal;
  ScalarField f(torus);
  for (double& v : f.values()) v = normal(rng);
  return mean_zero ? f.centered() : f;
}

VectorField random_vector(const Torus& torus, Rng& rng) {
  std::normal_distribution<double> normal;
  VectorField u(torus);
  for (std::size_t x = 0; x < torus.sites(); ++x) {
    for (int a = 0; a < torus.dim(); ++a) {
      const double v = normal(rng);
      u.at(x, 2 * a) = v;
      u.at(torus.neighbor(x, 2 * a), 2 * a + 1) = -v;
    }
  }
  return u;
}

std::vector<IdentityCheck> operator_self_test(int dim, int side, std::uint64_t seed) {
  const auto sample = gen_local_rules(dim, side, seed);
  const Torus& t = sample.env.torus();
  Rng rng = make_rng(seed, 1, rng_tag::kTestVectors);
  const ScalarField f = random_scalar(t, rng);
  const ScalarField g = random_scalar(t, rng);
  const VectorField u = random_vector(t, rng);
  const VectorField w = random_vector(t, rng);

  std::vector<IdentityCheck> checks;
  auto add = [&](std::string name, double residual, double tol) { checks.push_back({std::move(name), residual, tol}); };

  add("adjointness <grad f, u> = <f, div* u>", std::abs(inner(grad(f), u) - inner(f, div_star(u))), 1e-12);
  add("laplacian = -div* grad (exact)", max_abs((laplacian(f) + div_star(grad(f))).values()), 0.0);
  add("grad f lies in K", gradient_residual(grad(f)), 1e-12);

  const VectorField lf = riesz_lambda(f);
  add("Riesz isometry |Lambda f| = |f|", std::abs(norm(lf) / norm(f) - 1.0), 1e-10);
  add("Lambda* Lambda = I", max_abs((riesz_lambda_star(lf) - f).values()) / norm(f), 1e-10);
  const VectorField pu = proj_gradient(u);
  add("projection idempotent", norm(proj_gradient(pu) - pu) / norm(u), 1e-10);
  add("projection self-adjoint", std::abs(inner(pu, w) - inner(u, proj_gradient(w))) / (norm(u) * norm(w)), 1e-10);
  add("projection fixes gradients", norm(proj_gradient(grad(g)) - grad(g)) / norm(grad(g)), 1e-10);
  add("projection kills the drift", norm(proj_gradient(sample.env.drift_field())), 1e-10);

  const ScalarField af = apply_A(sample.env, f);
  add("A = div* H grad", max_abs((af - div_star(apply_H(sample.stream, grad(f)))).values()), 1e-12);
  add("L = -S + A", max_abs((apply_L(sample.env, f) - (af - apply_S(f))).values()), 1e-12);
  add("<f, A f> = 0", std::abs(inner(f, af)), 1e-12);
  add("<f, S f> >= 0", std::max(0.0, -inner(f, apply_S(f))), 0.0);
  add("H skew: <w, Hu> + <Hw, u> = 0",
      std::abs(inner(w, apply_H(sample.stream, u)) + inner(apply_H(sample.stream, w), u)), 1e-12);
  add("H maps V to V", antisymmetry_residual(apply_H(sample.stream, u)), 0.0);
  return checks;
}

}  // namespace dfrw
