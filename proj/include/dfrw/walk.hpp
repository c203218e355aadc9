#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dfrw/env.hpp"
#include "dfrw/rng.hpp"

namespace dfrw {

struct WalkOptions {
  double t_max = 1.0;
  std::vector<double> sample_times;  // increasing, in (0, t_max]
  /// Accumulate I(t) = ∫ φ(η_s) ds with exact holding times. When off, the
  /// walk draws Poisson jump counts between sample times instead, which has
  /// the same law for X and skips the holding times.
  bool track_compensator = true;
  bool record_holding_times = false;
};

/// Walk path sampled at t_0 = 0 < t_1 < ... < t_m. Positions are unwrapped.
struct Trajectory {
  int dim = 0;
  std::vector<double> times;
  std::vector<std::int64_t> positions;  // (m+1) × d
  std::vector<double> compensator;      // (m+1) × d, empty when not tracked
  std::vector<std::uint64_t> jumps;     // cumulative jump count at each sample
  std::vector<double> holding_times;

  std::int64_t position(std::size_t i, int a) const { return positions[i * dim + a]; }
  double integral(std::size_t i, int a) const { return compensator[i * dim + a]; }
};

/// Uniformized jump kernel of one environment: events at total rate 2d, and
/// at site x the step k is chosen with probability (1 + b_k(x)) / 2d.
class WalkKernel {
 public:
  explicit WalkKernel(const TorusEnv& env);

  const Torus& torus() const { return torus_; }
  double total_rate() const { return total_rate_; }
  Trajectory simulate(const WalkOptions& options, Rng& rng) const;

 private:
  int choose(std::size_t site, double u) const;

  Torus torus_;
  double total_rate_;
  std::vector<double> thresholds_;  // cumulative rates per site, last positive one is +inf
  std::vector<double> phi_;         // site-major, d components
};

Trajectory simulate_walk(const TorusEnv& env, const WalkOptions& options, Rng& rng);

enum class Pooling { Annealed, Quenched };

struct EnsembleOptions {
  std::size_t walkers = 1000;
  double t_max = 100.0;
  std::vector<double> sample_times;
  std::uint64_t seed = 0;
  Pooling pooling = Pooling::Annealed;
  bool track_compensator = true;
  /// Subtract v_ω t from each walker, v_ω being the site mean of φ in its environment.
  bool subtract_env_drift = false;
  bool keep_endpoints = false;
  std::size_t batches = 20;
  unsigned threads = 0;
};

struct TimeStats {
  double t = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd mean_y;
  Eigen::MatrixXd cov;    // X, about the group means (pooled or per environment)
  Eigen::MatrixXd cov_y;  // Y = X - I
  Eigen::MatrixXd cov_i;
  Eigen::MatrixXd cov_yi;
  Eigen::MatrixXd second_moment;  // E[X X^T] without centering
  std::vector<Eigen::MatrixXd> batch_cov;
  std::vector<Eigen::MatrixXd> batch_cov_y;
  std::vector<double> batch_msd;  // raw E|X|^2 per batch
  std::size_t n = 0;
};

struct WalkEnsembleStats {
  int dim = 0;
  Pooling pooling = Pooling::Annealed;
  bool has_compensator = false;
  std::size_t environments = 0;
  std::vector<TimeStats> rows;
  std::vector<double> endpoints;  // walkers × d at the last sample time
};

/// Walker i runs on environment i mod E with its own RNG stream derived from
/// (seed, i). Results are reduced in walker order, so output is independent
/// of the thread count.
WalkEnsembleStats run_ensemble(std::span<const TorusEnv> envs, const EnsembleOptions& options);

/// Geometric (log = true) or uniform grid of `count` times ending at t_max.
std::vector<double> sample_grid(double t_min, double t_max, std::size_t count, bool log = true);

struct MartingaleReport {
  std::vector<double> times;
  std::vector<double> mean_y_z;       // max_a |mean Y_a| / SE
  std::vector<double> var_y_over_t;   // tr Cov(Y) / t
  std::vector<double> var_x_over_t;
  Eigen::MatrixXd cross_cov_last;     // Cov(Y, I) at the last time
  double linear_r2 = 0.0;             // R² of tr Cov(Y) against t
  bool mean_zero = false;             // all |mean Y| within 4 SE
  bool linear = false;                // R² >= 0.99
};

MartingaleReport martingale_check(const WalkEnsembleStats& stats);

}  // namespace dfrw
