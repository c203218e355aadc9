#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dfrw/fields.hpp"

namespace dfrw {

using Complex = std::complex<double>;

/// In-place d-dimensional DFT over the torus, f̂(p) = sum_x e^{-i p·x} f(x).
/// Momentum index ordering matches the site ordering (p_a = 2π n_a / L).
void fft_forward(const Torus& torus, std::span<Complex> data);
/// Inverse transform including the 1/L^d normalization.
void fft_inverse(const Torus& torus, std::span<Complex> data);

std::vector<Complex> transform(const ScalarField& f);

/// sum_j (1 - cos p_j) for every momentum; |Δ| has symbol twice this value.
std::vector<double> cosine_deficit(const Torus& torus);

enum class Symbol {
  Green,        // ĝ(p) = (sum_j (1 - cos p_j))^-1
  InvSqrt,      // |Δ|^{-1/2}
  Sqrt,         // |Δ|^{1/2}
};

/// Fourier multiplier; the zero mode is always annihilated.
struct MultiplierSpec {
  Symbol symbol = Symbol::InvSqrt;
};

double symbol_value(Symbol symbol, double deficit);

ScalarField apply_multiplier(const MultiplierSpec& spec, const ScalarField& f);

/// (λ + |Δ|)^{-1} f. With λ = 0 the zero mode is annihilated, which is the
/// pseudo-inverse of |Δ| on mean-zero fields.
ScalarField apply_shifted_inverse(double lambda, const ScalarField& f);

}  // namespace dfrw
