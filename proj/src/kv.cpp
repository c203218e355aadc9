#include "dfrw/kv.hpp"

#include <algorithm>
#include <cmath>

#include "dfrw/error.hpp"
#include "dfrw/ops.hpp"
#include "dfrw/rng.hpp"

namespace dfrw {

ScalarField apply_B(const StreamTensor& h, const ScalarField& f) {
  return riesz_lambda_star(apply_H(h, riesz_lambda(f)));
}

VectorField apply_F(const StreamTensor& h, const VectorField& u) {
  return proj_gradient(apply_H(h, proj_gradient(u)));
}

SkewReport skew_residual(const StreamTensor& h, KvOperator op, std::size_t pairs, std::uint64_t seed) {
  if (pairs == 0) throw ValidationError("skew test needs at least one pair");
  const Torus& t = h.torus();
  Rng rng = make_rng(seed, 0, rng_tag::kTestVectors);
  SkewReport rep;
  rep.op = op;
  rep.pairs = pairs;
  for (std::size_t i = 0; i < pairs; ++i) {
    double r = 0.0, nu = 0.0, nv = 0.0;
    if (op == KvOperator::B) {
      const ScalarField u = random_scalar(t, rng), v = random_scalar(t, rng);
      nu = norm(u);
      nv = norm(v);
      r = std::abs(inner(u, apply_B(h, v)) + inner(apply_B(h, u), v));
    } else {
      const VectorField u = proj_gradient(random_vector(t, rng));
      const VectorField v = proj_gradient(random_vector(t, rng));
      nu = norm(u);
      nv = norm(v);
      r = std::abs(inner(u, apply_F(h, v)) + inner(apply_F(h, u), v));
    }
    rep.max_residual = std::max(rep.max_residual, r / (nu * nv));
    rep.max_norm_u = std::max(rep.max_norm_u, nu);
    rep.max_norm_v = std::max(rep.max_norm_v, nv);
  }
  return rep;
}

double conjugacy_residual(const StreamTensor& h, std::size_t samples, std::uint64_t seed) {
  const Torus& t = h.torus();
  Rng rng = make_rng(seed, 1, rng_tag::kTestVectors);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const ScalarField f = random_scalar(t, rng);
    const VectorField lhs = riesz_lambda(apply_B(h, f));
    const VectorField rhs = apply_F(h, riesz_lambda(f));
    worst = std::max(worst, norm(lhs - rhs) / norm(f));
  }
  return worst;
}

std::vector<TruncationRow> truncation_scan(const StreamTensor& h, const std::vector<double>& Ks,
                                           std::size_t pairs, std::uint64_t seed) {
  const Torus& t = h.torus();
  Rng rng = make_rng(seed, 2, rng_tag::kTestVectors);
  std::vector<std::pair<VectorField, VectorField>> tests;
  for (std::size_t i = 0; i < pairs; ++i) {
    VectorField w = grad(random_scalar(t, rng));
    VectorField u = grad(random_scalar(t, rng));
    tests.emplace_back(std::move(w), std::move(u));
  }
  std::vector<VectorField> full;
  for (const auto& [w, u] : tests) full.push_back(apply_H(h, u));

  std::vector<TruncationRow> rows;
  for (double K : Ks) {
    TruncationRow row;
    row.K = K;
    for (double v : h.values()) {
      if (std::abs(v) > K) ++row.truncated_entries;
    }
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const auto& [w, u] = tests[i];
      const double diff = std::abs(inner(w, full[i] - apply_H_trunc(h, K, u)));
      row.max_abs = std::max(row.max_abs, diff);
      row.max_relative = std::max(row.max_relative, diff / (norm(w) * norm(u)));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dfrw
