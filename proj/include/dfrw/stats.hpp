#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dfrw/walk.hpp"

namespace dfrw {

struct MsdCurve {
  std::vector<double> times;
  std::vector<double> values;   // E|X(t)|² (or tr Cov when drift-subtracted)
  std::vector<double> stderr;
  std::vector<std::vector<double>> batches;  // per time, per batch
  bool drift_subtracted = false;
};

/// With drift_subtracted the curve is tr Cov(X(t)) about the group means
/// (per environment for quenched pooling); otherwise the raw E|X(t)|².
MsdCurve msd_curve(const WalkEnsembleStats& stats, bool drift_subtracted = false);

struct ExponentFit {
  double alpha = 0.0;
  double stderr = 0.0;
  double ci_low = 0.0;   // 95% interval from batch slopes (Student t)
  double ci_high = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log E|X|² against log t over [t_lo, t_hi].
/// Requires at least five sample times in the window and positive values.
ExponentFit exponent_fit(const MsdCurve& curve, double t_lo, double t_hi);

struct GaussianityReport {
  std::vector<double> ks;               // per coordinate
  std::vector<double> excess_kurtosis;  // per coordinate
  double cov_relative_error = 0.0;      // ||Cov/t - σ²||_F / ||σ²||_F
  std::size_t samples = 0;
};

/// Compares positions X(t) (samples × d, row-major) with N(0, σ² t). The KS
/// distance uses the normal law convolved with the lattice cell of width
/// t^{-1/2}, evaluated on both sides of every jump of the empirical CDF.
GaussianityReport gaussianity_tests(std::span<const double> positions, int dim, double t,
                                    const Eigen::MatrixXd& sigma2);

/// Continuity-corrected KS distance of lattice-valued samples (already
/// scaled) against N(0, variance), lattice spacing `cell`.
double ks_lattice_normal(std::vector<double> samples, double variance, double cell);

double excess_kurtosis(std::span<const double> samples);

/// Student t quantile for a two-sided 95% interval.
double student_t975(std::size_t dof);

}  // namespace dfrw
