#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dfrw/fields.hpp"
#include "dfrw/lattice.hpp"

namespace dfrw {

struct EnvMeta {
  std::string generator;
  std::uint64_t seed = 0;
};

/// One realization of the drift field b_k(x) on the torus. Jump rates are
/// p_k(x) = 1 + b_k(x). The object is immutable once built; structural
/// identities are checked by validate_env, not by the constructor, so that
/// corrupted snapshots can still be inspected.
class TorusEnv {
 public:
  /// `drift` is site-major with the 2d directions innermost.
  TorusEnv(Torus torus, std::vector<double> drift, EnvMeta meta = {});
  static TorusEnv zero(const Torus& torus);
  TorusEnv(const VectorField& drift, EnvMeta meta = {});

  const Torus& torus() const { return torus_; }
  const EnvMeta& meta() const { return meta_; }
  int dim() const { return torus_.dim(); }
  int side() const { return torus_.side(); }

  double b(std::size_t site, int dir) const { return drift_[site * torus_.directions() + dir]; }
  double rate(std::size_t site, int dir) const { return 1.0 + b(site, dir); }
  std::span<const double> drift() const { return drift_; }
  VectorField drift_field() const { return VectorField(torus_, drift_); }

 private:
  Torus torus_;
  std::vector<double> drift_;
  EnvMeta meta_;
};

struct ValidationReport {
  double max_antisymmetry = 0.0;
  double max_divergence = 0.0;
  std::size_t range_violations = 0;
  std::vector<double> site_mean;  // per direction; reported, not enforced
  bool passed = false;
};

inline constexpr double kIdentityTolerance = 1e-12;

ValidationReport validate_env(const TorusEnv& env, double tol = kIdentityTolerance);

/// Plaquette field h_{k,l}(x), stored in full (site-major, then k, then l).
class StreamTensor {
 public:
  StreamTensor(Torus torus, std::vector<double> values);

  /// Builds the tensor from one plaquette amplitude per (axis pair a<b, site):
  /// psi[pair][x] = h_{+a,+b}(x). All other entries follow from the symmetries.
  static StreamTensor from_plaquettes(const Torus& torus, const std::vector<std::vector<double>>& psi);

  const Torus& torus() const { return torus_; }
  double h(std::size_t site, int k, int l) const { return values_[offset(site, k, l)]; }
  std::span<const double> values() const { return values_; }
  double max_abs() const;

  /// h·1{|h| <= K}. Symmetric entries share their magnitude, so the result
  /// is again a stream tensor.
  StreamTensor truncated(double K) const;
  StreamTensor scaled(double s) const;

 private:
  std::size_t offset(std::size_t site, int k, int l) const {
    const auto n = static_cast<std::size_t>(torus_.directions());
    return (site * n + k) * n + l;
  }

  Torus torus_;
  std::vector<double> values_;
};

struct StreamReport {
  double max_swap = 0.0;     // |h_kl(x) + h_lk(x)|
  double max_shift_k = 0.0;  // |h_kl(x) + h_{-k,l}(x+k)|
  double max_shift_l = 0.0;  // |h_kl(x) + h_{k,-l}(x+l)|
  double max_diagonal = 0.0; // |h_kk(x)|
  bool passed(double tol = 0.0) const {
    return max_swap <= tol && max_shift_k <= tol && max_shift_l <= tol && max_diagonal <= tol;
  }
};

StreamReport validate_stream(const StreamTensor& h);

/// Discrete curl b_k(x) = 1/2 sum_l (h_kl(x) - h_kl(x-l)). Rejects tensors
/// that violate the stream symmetries.
VectorField curl_of_stream(const StreamTensor& h);

/// The same curl in the form b_k(x) = sum_l h_kl(x).
VectorField curl_of_stream_plain(const StreamTensor& h);

/// Drift function phi(x) = sum_k k b_k(x); component a is b_{+a}(x) - b_{-a}(x).
std::vector<ScalarField> drift_phi(const TorusEnv& env);

/// Site average of phi.
std::vector<double> mean_drift(const TorusEnv& env);

}  // namespace dfrw
