#include "dfrw/h1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "dfrw/error.hpp"
#include "dfrw/parallel.hpp"
#include "dfrw/rng.hpp"
#include "dfrw/spectral.hpp"

namespace dfrw {

double CorrelationSpectrum::stderr_at(std::size_t momentum, int dir) const {
  if (samples < 2) return 0.0;
  const std::size_t i = momentum * torus.directions() + dir;
  const double n = static_cast<double>(samples);
  const double var = std::max(0.0, second[i] - mean[i] * mean[i]) * n / (n - 1.0);
  return std::sqrt(var / n);
}

SpectrumAccumulator::SpectrumAccumulator(const Torus& torus)
    : torus_(torus), sum_(torus.sites() * torus.directions(), 0.0), sum_sq_(sum_.size(), 0.0) {
  const auto deficit = cosine_deficit(torus);
  green_.resize(deficit.size());
  for (std::size_t p = 0; p < deficit.size(); ++p) green_[p] = symbol_value(Symbol::Green, deficit[p]);
}

void SpectrumAccumulator::add(const TorusEnv& env) {
  if (!(env.torus() == torus_)) throw ValidationError("environment size does not match the spectrum");
  const int n = torus_.directions();
  const double vol = static_cast<double>(torus_.sites());
  std::vector<Complex> buf(torus_.sites());
  double h1 = 0.0;
  for (int k = 0; k < n; ++k) {
    for (std::size_t x = 0; x < torus_.sites(); ++x) buf[x] = env.b(x, k);
    fft_forward(torus_, buf);
    for (std::size_t p = 0; p < torus_.sites(); ++p) {
      const double c = std::norm(buf[p]) / vol;
      sum_[p * n + k] += c;
      sum_sq_[p * n + k] += c * c;
      h1 += green_[p] * c;
    }
  }
  h1_.push_back(h1 / vol);
}

CorrelationSpectrum SpectrumAccumulator::result() const {
  CorrelationSpectrum s;
  s.torus = torus_;
  s.samples = h1_.size();
  s.sample_h1 = h1_;
  const double n = std::max<double>(1.0, static_cast<double>(s.samples));
  s.mean.resize(sum_.size());
  s.second.resize(sum_.size());
  for (std::size_t i = 0; i < sum_.size(); ++i) {
    s.mean[i] = sum_[i] / n;
    s.second[i] = sum_sq_[i] / n;
  }
  return s;
}

CorrelationSpectrum correlation_spectrum(std::span<const TorusEnv> envs) {
  if (envs.empty()) throw ValidationError("correlation spectrum needs at least one environment");
  SpectrumAccumulator acc(envs.front().torus());
  for (const auto& e : envs) acc.add(e);
  return acc.result();
}

H1Statistic h1_statistic(const CorrelationSpectrum& spectrum, std::string model) {
  H1Statistic st;
  st.model = std::move(model);
  st.dim = spectrum.torus.dim();
  st.side = spectrum.torus.side();
  st.samples = spectrum.samples;
  const auto& v = spectrum.sample_h1;
  if (v.empty()) throw ValidationError("empty correlation spectrum");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  st.value = mean;
  if (v.size() >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    st.stderr = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return st;
}

std::string verdict_name(H1Verdict verdict) {
  switch (verdict) {
    case H1Verdict::Holds: return "holds";
    case H1Verdict::Marginal: return "marginal";
    case H1Verdict::Fails: return "fails";
    case H1Verdict::Withheld: return "withheld";
  }
  return "unknown";
}

namespace {

struct Points {
  std::vector<double> L, S, w;
};

double chi2_of(const Points& p, auto&& model) {
  double c = 0.0;
  for (std::size_t i = 0; i < p.L.size(); ++i) {
    const double r = p.S[i] - model(p.L[i]);
    c += p.w[i] * r * r;
  }
  return c;
}

// Weighted least squares of S against a + c·u.
std::pair<double, double> linear_fit(const std::vector<double>& u, const std::vector<double>& S,
                                     const std::vector<double>& w) {
  double sw = 0, su = 0, ss = 0, suu = 0, sus = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sw += w[i];
    su += w[i] * u[i];
    ss += w[i] * S[i];
    suu += w[i] * u[i] * u[i];
    sus += w[i] * u[i] * S[i];
  }
  const double det = sw * suu - su * su;
  if (det == 0.0) return {ss / sw, 0.0};
  const double c = (sw * sus - su * ss) / det;
  return {(ss - c * su) / sw, c};
}

GrowthFit fit_power(const Points& p) {
  // Start from the log-log line, then Gauss-Newton on the weighted residuals.
  std::vector<double> lu, ls, lw;
  for (std::size_t i = 0; i < p.L.size(); ++i) {
    if (p.S[i] <= 0.0) continue;
    lu.push_back(std::log(p.L[i]));
    ls.push_back(std::log(p.S[i]));
    lw.push_back(p.w[i] * p.S[i] * p.S[i]);
  }
  double a = 1.0, c = 0.0;
  if (lu.size() >= 2) {
    const auto [la, lc] = linear_fit(lu, ls, lw);
    a = std::exp(la);
    c = lc;
  }
  auto model = [&](double L) { return a * std::pow(L, c); };
  double best = chi2_of(p, model);
  for (int it = 0; it < 100; ++it) {
    Eigen::Matrix2d JtJ = Eigen::Matrix2d::Zero();
    Eigen::Vector2d Jtr = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < p.L.size(); ++i) {
      const double f = a * std::pow(p.L[i], c);
      const Eigen::Vector2d J(f / a, f * std::log(p.L[i]));
      JtJ += p.w[i] * J * J.transpose();
      Jtr += p.w[i] * J * (p.S[i] - f);
    }
    const Eigen::Vector2d step = JtJ.ldlt().solve(Jtr);
    if (!step.allFinite()) break;
    double scale = 1.0;
    bool improved = false;
    for (int h = 0; h < 30 && !improved; ++h, scale *= 0.5) {
      const double na = a + scale * step(0), nc = c + scale * step(1);
      const double chi = chi2_of(p, [&](double L) { return na * std::pow(L, nc); });
      if (chi < best) {
        a = na;
        c = nc;
        improved = chi < best * (1.0 - 1e-12);
        best = chi;
        if (!improved) break;
      }
    }
    if (!improved) break;
  }
  return {"power", a, c, best};
}

}  // namespace

H1Study classify_h1_growth(std::vector<H1Statistic> table, double saturation_threshold) {
  std::sort(table.begin(), table.end(), [](const auto& x, const auto& y) { return x.side < y.side; });
  H1Study study;
  study.table = table;
  if (table.size() < 2) return study;

  Points p;
  bool weighted = true;
  for (const auto& r : table) weighted = weighted && r.stderr > 0.0;
  for (const auto& r : table) {
    p.L.push_back(r.side);
    p.S.push_back(r.value);
    p.w.push_back(weighted ? 1.0 / (r.stderr * r.stderr) : 1.0);
  }

  const auto [ca, cc] = linear_fit(std::vector<double>(p.L.size(), 0.0), p.S, p.w);
  (void)cc;
  study.fits.push_back({"const", ca, 0.0, chi2_of(p, [&](double) { return ca; })});
  std::vector<double> logs;
  for (double L : p.L) logs.push_back(std::log(L));
  const auto [la, lc] = linear_fit(logs, p.S, p.w);
  study.fits.push_back({"log", la, lc, chi2_of(p, [&](double L) { return la + lc * std::log(L); })});
  study.fits.push_back(fit_power(p));

  const double prev = table[table.size() - 2].value;
  study.top_increment = prev != 0.0 ? (table.back().value - prev) / std::abs(prev)
                                    : std::numeric_limits<double>::infinity();

  // Akaike weights; all growth models have two parameters, const has one.
  auto aic = [](const GrowthFit& f) { return f.chi2 + 2.0 * (f.model == "const" ? 1.0 : 2.0); };
  if (study.top_increment < saturation_threshold) {
    study.verdict = H1Verdict::Holds;
    study.best_growth = "const";
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& f : study.fits) lo = std::min(lo, aic(f));
    double total = 0.0;
    for (const auto& f : study.fits) total += std::exp(-0.5 * (aic(f) - lo));
    study.confidence = std::exp(-0.5 * (aic(study.fits[0]) - lo)) / total;
  } else {
    const GrowthFit& lg = study.fits[1];
    const GrowthFit& pw = study.fits[2];
    const bool log_wins = lg.chi2 <= pw.chi2;
    study.verdict = log_wins ? H1Verdict::Marginal : H1Verdict::Fails;
    study.best_growth = log_wins ? "log" : "power";
    const double lo = std::min(lg.chi2, pw.chi2);
    const double wl = std::exp(-0.5 * (lg.chi2 - lo)), wp = std::exp(-0.5 * (pw.chi2 - lo));
    study.confidence = (log_wins ? wl : wp) / (wl + wp);
  }
  return study;
}

H1Study h1_scaling_study(Model model, int dim, const std::vector<int>& sides, std::size_t samples,
                         std::uint64_t seed, const H1StudyOptions& options) {
  if (sides.empty() || samples == 0) throw ValidationError("H1 study needs sides and samples");
  const unsigned threads = options.threads == 0 ? default_threads() : options.threads;
  std::vector<H1Statistic> table;
  for (int side : sides) {
    const Torus torus(dim, side);
    SpectrumAccumulator acc(torus);
    GeneratorConfig cfg;
    cfg.model = model;
    cfg.dim = dim;
    cfg.side = side;
    if (model == Model::SixVertex) {
      cfg.sweeps = static_cast<std::uint64_t>(std::ceil(options.sweeps_per_site * side * side));
    }
    // Generate in chunks so memory stays bounded; add in sample order.
    const std::size_t chunk = std::max<std::size_t>(1, 2 * static_cast<std::size_t>(threads));
    for (std::size_t start = 0; start < samples; start += chunk) {
      const std::size_t count = std::min(chunk, samples - start);
      std::vector<std::optional<TorusEnv>> envs(count);
      parallel_for(count, threads, [&](std::size_t j) {
        GeneratorConfig c = cfg;
        Rng r = make_rng(seed, (static_cast<std::uint64_t>(side) << 32) + start + j, rng_tag::kEnsemble);
        c.seed = r();
        envs[j] = generate(c).env;
      });
      for (const auto& e : envs) acc.add(*e);
    }
    table.push_back(h1_statistic(acc.result(), model_name(model)));
  }
  return classify_h1_growth(std::move(table), options.saturation_threshold);
}

}  // namespace dfrw
