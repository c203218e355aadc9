#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfrw/env.hpp"
#include "dfrw/fields.hpp"
#include "dfrw/rng.hpp"

namespace dfrw {

/// (∇f)_k(x) = f(x+k) - f(x).
VectorField grad(const ScalarField& f);

/// Adjoint of grad under the normalized inner products: ∇*u = -sum_k u_k.
/// Requires u in V (antisymmetric); with this sign Δ = -∇*∇ and S = ∇*∇.
ScalarField div_star(const VectorField& u);

/// Lattice Laplacian Δf(x) = sum_k (f(x+k) - f(x)).
ScalarField laplacian(const ScalarField& f);

/// Λ = ∇|Δ|^{-1/2}, Λ* = |Δ|^{-1/2}∇*, Π = ΛΛ*. Zero-mode content is
/// annihilated by |Δ|^{-1/2}.
VectorField riesz_lambda(const ScalarField& f);
ScalarField riesz_lambda_star(const VectorField& u);
VectorField proj_gradient(const VectorField& u);

/// (Hu)_k(x) = 1/2 sum_l h_kl(x) (u_l(x+k) + u_l(x)).
VectorField apply_H(const StreamTensor& h, const VectorField& u);

/// apply_H with h replaced by h·1{|h| <= K}.
VectorField apply_H_trunc(const StreamTensor& h, double K, const VectorField& u);

/// Generator of the environment process and its parts, L = -S + A:
/// Lf(x) = sum_k (1 + b_k(x))(f(x+k) - f(x)), S = -Δ, Af(x) = sum_k b_k(x)(f(x+k) - f(x)).
ScalarField apply_L(const TorusEnv& env, const ScalarField& f);
ScalarField apply_S(const ScalarField& f);
ScalarField apply_A(const TorusEnv& env, const ScalarField& f);

/// I.i.d. standard normal site values, centered when mean_zero is set.
ScalarField random_scalar(const Torus& torus, Rng& rng, bool mean_zero = true);

/// Random element of V: i.i.d. standard normal on each positively oriented
/// edge, mirrored with a sign flip onto the reverse direction.
VectorField random_vector(const Torus& torus, Rng& rng);

struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

/// Runs the operator identity suite (adjointness, Δ = -∇*∇, Riesz isometry,
/// projection properties, A = ∇*H∇, skew-symmetry of A and H) on a
/// local-rules environment of the given shape.
std::vector<IdentityCheck> operator_self_test(int dim, int side, std::uint64_t seed);

}  // namespace dfrw
