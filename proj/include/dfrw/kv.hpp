#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfrw/env.hpp"
#include "dfrw/fields.hpp"

namespace dfrw {

/// B f = |Δ|^{-1/2} ∇* H ∇ |Δ|^{-1/2} f, i.e. Λ* H Λ f. Output is mean-zero.
ScalarField apply_B(const StreamTensor& h, const ScalarField& f);

/// F u = Π H Π u; the input is projected first, so any u in V is accepted.
VectorField apply_F(const StreamTensor& h, const VectorField& u);

enum class KvOperator { B, F };

struct SkewReport {
  KvOperator op = KvOperator::B;
  std::size_t pairs = 0;
  /// max |<u, T v> + <T u, v>| / (||u|| ||v||) over the random pairs.
  double max_residual = 0.0;
  double max_norm_u = 0.0;
  double max_norm_v = 0.0;
};

/// Randomized bilinear skew-symmetry test. Test vectors are i.i.d. Gaussian,
/// mean-centered (B) or projected by Π (F). On the finite torus the operator
/// is a matrix, so exact skew-symmetry is all there is to skew-adjointness.
SkewReport skew_residual(const StreamTensor& h, KvOperator op, std::size_t pairs, std::uint64_t seed);

/// max ||Λ B f - F Λ f|| / ||f|| over random mean-zero f.
double conjugacy_residual(const StreamTensor& h, std::size_t samples, std::uint64_t seed);

struct TruncationRow {
  double K = 0.0;
  double max_abs = 0.0;       // max |<w, (H - H^K) u>|
  double max_relative = 0.0;  // the same, divided by ||w|| ||u||
  std::size_t truncated_entries = 0;
};

/// Weak convergence H^K -> H tested on random gradient pairs (w, u) = (∇g1, ∇g2).
std::vector<TruncationRow> truncation_scan(const StreamTensor& h, const std::vector<double>& Ks,
                                           std::size_t pairs, std::uint64_t seed);

}  // namespace dfrw
