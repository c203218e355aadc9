#include "dfrw/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "dfrw/error.hpp"

namespace dfrw {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

MsdCurve msd_curve(const WalkEnsembleStats& stats, bool drift_subtracted) {
  MsdCurve c;
  c.drift_subtracted = drift_subtracted;
  for (const auto& r : stats.rows) {
    c.times.push_back(r.t);
    c.values.push_back(drift_subtracted ? r.cov.trace() : r.second_moment.trace());
    std::vector<double> b;
    if (drift_subtracted) {
      for (const auto& m : r.batch_cov) b.push_back(m.trace());
    } else {
      b = r.batch_msd;
    }
    c.stderr.push_back(se_of(b));
    c.batches.push_back(std::move(b));
  }
  return c;
}

ExponentFit exponent_fit(const MsdCurve& curve, double t_lo, double t_hi) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.times[i] >= t_lo && curve.times[i] <= t_hi) idx.push_back(i);
  }
  if (idx.size() < 5) throw ValidationError("exponent fit needs at least five sample times in the window");
  std::vector<double> lt, lv;
  for (std::size_t i : idx) {
    if (!(curve.values[i] > 0.0)) throw NumericalError("non-positive mean squared displacement in fit window");
    lt.push_back(std::log(curve.times[i]));
    lv.push_back(std::log(curve.values[i]));
  }
  ExponentFit fit;
  fit.alpha = slope(lt, lv);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.points = idx.size();

  const std::size_t B = curve.batches.empty() ? 0 : curve.batches[idx.front()].size();
  fit.ci_low = fit.ci_high = fit.alpha;
  if (B >= 2) {
    std::vector<double> slopes;
    for (std::size_t b = 0; b < B; ++b) {
      std::vector<double> y;
      for (std::size_t i : idx) y.push_back(std::log(std::max(curve.batches[i][b], 1e-300)));
      slopes.push_back(slope(lt, y));
    }
    fit.stderr = se_of(slopes);
    const double q = student_t975(B - 1);
    fit.ci_low = fit.alpha - q * fit.stderr;
    fit.ci_high = fit.alpha + q * fit.stderr;
  }
  return fit;
}

double ks_lattice_normal(std::vector<double> samples, double variance, double cell) {
  if (samples.empty()) throw ValidationError("KS test needs samples");
  if (!(variance > 0.0)) throw ValidationError("KS test needs a positive variance");
  std::sort(samples.begin(), samples.end());
  const double sd = std::sqrt(variance);
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double v = samples[i];
    const double below = static_cast<double>(i) / n;
    const double upto = static_cast<double>(j) / n;
    d = std::max(d, std::abs(below - normal_cdf((v - 0.5 * cell) / sd)));
    d = std::max(d, std::abs(upto - normal_cdf((v + 0.5 * cell) / sd)));
    i = j;
  }
  return d;
}

double excess_kurtosis(std::span<const double> samples) {
  if (samples.size() < 2) throw ValidationError("kurtosis needs at least two samples");
  const double m = mean_of(samples);
  double m2 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d2 = (x - m) * (x - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(samples.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

GaussianityReport gaussianity_tests(std::span<const double> positions, int dim, double t,
                                    const Eigen::MatrixXd& sigma2) {
  if (dim <= 0 || positions.size() % dim != 0) throw ValidationError("positions are not samples × d");
  if (!(t > 0.0)) throw ValidationError("time must be positive");
  if (sigma2.rows() != dim || sigma2.cols() != dim) throw ValidationError("sigma2 must be d × d");
  const std::size_t n = positions.size() / dim;
  GaussianityReport rep;
  rep.samples = n;
  const double root = std::sqrt(t);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < dim; ++a) mean(a) += positions[i * dim + a];
  }
  mean /= static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = positions[i * dim + a] / root;
    rep.ks.push_back(ks_lattice_normal(xs, sigma2(a, a), 1.0 / root));
    rep.excess_kurtosis.push_back(excess_kurtosis(xs));
  }
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x(dim);
    for (int a = 0; a < dim; ++a) x(a) = positions[i * dim + a] - mean(a);
    cov += x * x.transpose();
  }
  cov /= static_cast<double>(n > 1 ? n - 1 : 1) * t;
  rep.cov_relative_error = (cov - sigma2).norm() / sigma2.norm();
  return rep;
}

double student_t975(std::size_t dof) {
  static constexpr std::array<double, 30> table = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
      2.120,  2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof == 0) throw ValidationError("Student t needs at least one degree of freedom");
  if (dof <= table.size()) return table[dof - 1];
  // Cornish-Fisher expansion about the normal quantile.
  const double z = 1.959963984540054;
  const double n = static_cast<double>(dof);
  const double z3 = z * z * z, z5 = z3 * z * z;
  return z + (z3 + z) / (4.0 * n) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * n * n);
}

}  // namespace dfrw
