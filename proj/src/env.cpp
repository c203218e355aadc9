#include "dfrw/env.hpp"

#include <algorithm>
#include <cmath>

#include "dfrw/error.hpp"

namespace dfrw {

TorusEnv::TorusEnv(Torus torus, std::vector<double> drift, EnvMeta meta)
    : torus_(std::move(torus)), drift_(std::move(drift)), meta_(std::move(meta)) {
  if (drift_.size() != torus_.sites() * torus_.directions()) {
    throw ValidationError("structural error: drift storage does not match declared (d, L)");
  }
}

TorusEnv::TorusEnv(const VectorField& drift, EnvMeta meta)
    : TorusEnv(drift.torus(), std::vector<double>(drift.values().begin(), drift.values().end()),
               std::move(meta)) {}

TorusEnv TorusEnv::zero(const Torus& torus) {
  return TorusEnv(torus, std::vector<double>(torus.sites() * torus.directions(), 0.0), {"zero", 0});
}

ValidationReport validate_env(const TorusEnv& env, double tol) {
  const Torus& t = env.torus();
  const int dirs = t.directions();
  ValidationReport report;
  report.site_mean.assign(dirs, 0.0);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    double div = 0.0;
    for (int k = 0; k < dirs; ++k) {
      const double bk = env.b(x, k);
      div += bk;
      report.site_mean[k] += bk;
      report.max_antisymmetry =
          std::max(report.max_antisymmetry, std::abs(bk + env.b(t.neighbor(x, k), opposite(k))));
      if (!(std::abs(bk) <= 1.0)) ++report.range_violations;
    }
    report.max_divergence = std::max(report.max_divergence, std::abs(div));
  }
  for (double& m : report.site_mean) m /= static_cast<double>(t.sites());
  report.passed = report.max_antisymmetry <= tol && report.max_divergence <= tol && report.range_violations == 0;
  return report;
}

StreamTensor::StreamTensor(Torus torus, std::vector<double> values)
    : torus_(std::move(torus)), values_(std::move(values)) {
  const auto n = static_cast<std::size_t>(torus_.directions());
  if (values_.size() != torus_.sites() * n * n) {
    throw ValidationError("structural error: stream tensor storage does not match declared (d, L)");
  }
}

StreamTensor StreamTensor::from_plaquettes(const Torus& torus, const std::vector<std::vector<double>>& psi) {
  const auto pairs = axis_pairs(torus.dim());
  if (psi.size() != pairs.size()) throw ValidationError("one plaquette field per axis pair expected");
  const auto n = static_cast<std::size_t>(torus.directions());
  std::vector<double> h(torus.sites() * n * n, 0.0);
  auto put = [&](std::size_t x, int k, int l, double v) {
    h[(x * n + k) * n + l] = v;
    h[(x * n + l) * n + k] = -v;
  };
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (psi[p].size() != torus.sites()) throw ValidationError("plaquette field size does not match torus");
    const auto [a, b] = pairs[p];
    const int pa = 2 * a, ma = 2 * a + 1, pb = 2 * b, mb = 2 * b + 1;
    for (std::size_t x = 0; x < torus.sites(); ++x) {
      const std::size_t xma = torus.neighbor(x, ma);
      const std::size_t xmb = torus.neighbor(x, mb);
      const std::size_t xmab = torus.neighbor(xma, mb);
      put(x, pa, pb, psi[p][x]);
      put(x, pa, mb, -psi[p][xmb]);
      put(x, ma, pb, -psi[p][xma]);
      put(x, ma, mb, psi[p][xmab]);
    }
  }
  return StreamTensor(torus, std::move(h));
}

double StreamTensor::max_abs() const { return dfrw::max_abs(values_); }

StreamTensor StreamTensor::truncated(double K) const {
  std::vector<double> out(values_);
  for (double& v : out) {
    if (!(std::abs(v) <= K)) v = 0.0;
  }
  return StreamTensor(torus_, std::move(out));
}

StreamTensor StreamTensor::scaled(double s) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= s;
  return StreamTensor(torus_, std::move(out));
}

StreamReport validate_stream(const StreamTensor& h) {
  const Torus& t = h.torus();
  const int n = t.directions();
  StreamReport r;
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < n; ++k) {
      const std::size_t xk = t.neighbor(x, k);
      r.max_diagonal = std::max(r.max_diagonal, std::abs(h.h(x, k, k)));
      for (int l = 0; l < n; ++l) {
        const double v = h.h(x, k, l);
        r.max_swap = std::max(r.max_swap, std::abs(v + h.h(x, l, k)));
        r.max_shift_k = std::max(r.max_shift_k, std::abs(v + h.h(xk, opposite(k), l)));
        r.max_shift_l = std::max(r.max_shift_l, std::abs(v + h.h(t.neighbor(x, l), k, opposite(l))));
      }
    }
  }
  return r;
}

VectorField curl_of_stream(const StreamTensor& h) {
  if (!validate_stream(h).passed()) throw ValidationError("stream tensor violates its symmetries");
  const Torus& t = h.torus();
  const int n = t.directions();
  VectorField b(t);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) s += h.h(x, k, l) - h.h(t.neighbor(x, opposite(l)), k, l);
      b.at(x, k) = 0.5 * s;
    }
  }
  return b;
}

VectorField curl_of_stream_plain(const StreamTensor& h) {
  const Torus& t = h.torus();
  const int n = t.directions();
  VectorField b(t);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) s += h.h(x, k, l);
      b.at(x, k) = s;
    }
  }
  return b;
}

std::vector<ScalarField> drift_phi(const TorusEnv& env) {
  const Torus& t = env.torus();
  std::vector<ScalarField> phi(t.dim(), ScalarField(t));
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int a = 0; a < t.dim(); ++a) phi[a][x] = env.b(x, 2 * a) - env.b(x, 2 * a + 1);
  }
  return phi;
}

std::vector<double> mean_drift(const TorusEnv& env) {
  std::vector<double> v;
  for (const auto& f : drift_phi(env)) v.push_back(f.mean());
  return v;
}

}  // namespace dfrw
