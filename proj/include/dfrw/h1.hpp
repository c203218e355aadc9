#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dfrw/env.hpp"
#include "dfrw/generators.hpp"

namespace dfrw {

/// Ensemble estimate of Ĉ_kk(p) = E|b̂_k(p)|² / L^d for every direction k.
struct CorrelationSpectrum {
  Torus torus{2, 4};
  std::vector<double> mean;     // momentum-major, 2d directions innermost
  std::vector<double> second;   // ensemble mean of the squared per-sample estimate
  std::vector<double> sample_h1;  // per-sample value of the H-1 sum
  std::size_t samples = 0;

  double at(std::size_t momentum, int dir) const { return mean[momentum * torus.directions() + dir]; }
  /// Standard error of Ĉ_kk(p) across samples.
  double stderr_at(std::size_t momentum, int dir) const;
};

/// Streaming accumulator; add environments one at a time.
class SpectrumAccumulator {
 public:
  explicit SpectrumAccumulator(const Torus& torus);
  void add(const TorusEnv& env);
  CorrelationSpectrum result() const;

 private:
  Torus torus_;
  std::vector<double> green_;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
  std::vector<double> h1_;
};

CorrelationSpectrum correlation_spectrum(std::span<const TorusEnv> envs);

struct H1Statistic {
  std::string model;
  int dim = 0;
  int side = 0;
  double value = 0.0;  // L^-d sum_{p != 0} ĝ(p) sum_k Ĉ_kk(p)
  double stderr = 0.0;
  std::size_t samples = 0;
};

H1Statistic h1_statistic(const CorrelationSpectrum& spectrum, std::string model = {});

enum class H1Verdict { Holds, Marginal, Fails, Withheld };
std::string verdict_name(H1Verdict verdict);

struct GrowthFit {
  std::string model;  // "const": S = a; "log": S = a + c log L; "power": S = a L^c
  double a = 0.0;
  double c = 0.0;
  double chi2 = 0.0;  // weighted by 1/stderr² (unweighted when stderr vanishes)
};

struct H1Study {
  std::vector<H1Statistic> table;
  std::vector<GrowthFit> fits;
  double top_increment = 0.0;  // (S(L_top) - S(L_prev)) / S(L_prev)
  H1Verdict verdict = H1Verdict::Withheld;
  std::string best_growth;     // "log" or "power" by chi², when growing
  double confidence = 0.0;     // Akaike weight of the selected growth model
};

struct H1StudyOptions {
  double sweeps_per_site = 2.0;  // six-vertex: sweeps = ceil(sweeps_per_site · L²)
  double saturation_threshold = 0.05;
  unsigned threads = 0;
};

/// Saturation is declared when the relative increment between the two largest
/// sides is below the threshold; otherwise the log and power fits compete by
/// chi² and the winner decides between marginal (log) and fails (power).
H1Study h1_scaling_study(Model model, int dim, const std::vector<int>& sides, std::size_t samples,
                         std::uint64_t seed, const H1StudyOptions& options = {});

/// Verdict from an already-computed table.
H1Study classify_h1_growth(std::vector<H1Statistic> table, double saturation_threshold = 0.05);

}  // namespace dfrw
