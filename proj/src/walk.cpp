#include "dfrw/walk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "dfrw/error.hpp"
#include "dfrw/parallel.hpp"

namespace dfrw {

WalkKernel::WalkKernel(const TorusEnv& env) : torus_(env.torus()), total_rate_(2.0 * env.dim()) {
  const int n = torus_.directions();
  const int d = torus_.dim();
  thresholds_.resize(torus_.sites() * n);
  phi_.resize(torus_.sites() * d);
  for (std::size_t x = 0; x < torus_.sites(); ++x) {
    double acc = 0.0;
    int last = -1;
    for (int k = 0; k < n; ++k) {
      const double r = env.rate(x, k);
      if (!(r >= -1e-12)) throw ValidationError("negative jump rate at site " + std::to_string(x));
      acc += std::max(r, 0.0);
      thresholds_[x * n + k] = acc;
      if (r > 0.0) last = k;
    }
    if (last < 0) throw ValidationError("site " + std::to_string(x) + " has no outgoing rate");
    for (int k = last; k < n; ++k) thresholds_[x * n + k] = std::numeric_limits<double>::infinity();
    for (int a = 0; a < d; ++a) phi_[x * d + a] = env.b(x, 2 * a) - env.b(x, 2 * a + 1);
  }
}

int WalkKernel::choose(std::size_t site, double u) const {
  const double* thr = &thresholds_[site * torus_.directions()];
  int k = 0;
  while (u >= thr[k]) ++k;
  return k;
}

Trajectory WalkKernel::simulate(const WalkOptions& options, Rng& rng) const {
  const auto& times = options.sample_times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || times[i] > options.t_max || (i > 0 && !(times[i] > times[i - 1]))) {
      throw ValidationError("sample times must be increasing in (0, t_max]");
    }
  }
  const int d = torus_.dim();
  Trajectory tr;
  tr.dim = d;
  tr.times.reserve(times.size() + 1);
  tr.times.push_back(0.0);
  tr.times.insert(tr.times.end(), times.begin(), times.end());
  tr.positions.assign(tr.times.size() * d, 0);
  tr.jumps.assign(tr.times.size(), 0);
  if (options.track_compensator) tr.compensator.assign(tr.times.size() * d, 0.0);

  std::size_t site = uniform_below(rng, torus_.sites());
  std::array<std::int64_t, kMaxDim> pos{};
  std::uint64_t jumps = 0;

  auto step = [&] {
    const int k = choose(site, uniform01(rng) * total_rate_);
    site = torus_.neighbor(site, k);
    pos[k >> 1] += (k & 1) ? -1 : 1;
    ++jumps;
  };
  auto record = [&](std::size_t i) {
    for (int a = 0; a < d; ++a) tr.positions[i * d + a] = pos[a];
    tr.jumps[i] = jumps;
  };

  if (options.track_compensator) {
    std::exponential_distribution<double> hold(total_rate_);
    std::array<double, kMaxDim> integral{};
    double t = 0.0;
    std::size_t next = 1;
    while (next < tr.times.size()) {
      const double tau = hold(rng);
      const double* phi = &phi_[site * d];
      while (next < tr.times.size() && tr.times[next] <= t + tau) {
        record(next);
        for (int a = 0; a < d; ++a) tr.compensator[next * d + a] = integral[a] + phi[a] * (tr.times[next] - t);
        ++next;
      }
      if (next >= tr.times.size()) break;
      for (int a = 0; a < d; ++a) integral[a] += phi[a] * tau;
      if (options.record_holding_times) tr.holding_times.push_back(tau);
      t += tau;
      step();
    }
  } else {
    for (std::size_t i = 1; i < tr.times.size(); ++i) {
      std::poisson_distribution<std::uint64_t> count(total_rate_ * (tr.times[i] - tr.times[i - 1]));
      for (std::uint64_t n = count(rng); n > 0; --n) step();
      record(i);
    }
  }
  return tr;
}

Trajectory simulate_walk(const TorusEnv& env, const WalkOptions& options, Rng& rng) {
  return WalkKernel(env).simulate(options, rng);
}

std::vector<double> sample_grid(double t_min, double t_max, std::size_t count, bool log) {
  if (count == 0 || !(t_max > 0.0)) throw ValidationError("sample grid needs count >= 1 and t_max > 0");
  if (count == 1) return {t_max};
  if (!(t_min > 0.0) || !(t_min < t_max)) throw ValidationError("sample grid needs 0 < t_min < t_max");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = log ? t_min * std::pow(t_max / t_min, f) : t_min + (t_max - t_min) * f;
  }
  out.back() = t_max;
  return out;
}

namespace {

// Per-walker sample rows: X (drift-corrected) and I, both m × d.
struct WalkerRows {
  std::vector<double> x;
  std::vector<double> i;
};

Eigen::MatrixXd outer_sum(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.front().size(), b.front().size());
  for (std::size_t w = 0; w < a.size(); ++w) m += a[w] * b[w].transpose();
  return m;
}

}  // namespace

WalkEnsembleStats run_ensemble(std::span<const TorusEnv> envs, const EnsembleOptions& options) {
  if (envs.empty()) throw ValidationError("ensemble needs at least one environment");
  if (options.walkers == 0) throw ValidationError("ensemble needs at least one walker");
  const int d = envs.front().dim();
  for (const auto& e : envs) {
    if (e.dim() != d) throw ValidationError("all environments must share the dimension");
  }
  std::vector<double> times = options.sample_times;
  if (times.empty()) times = {options.t_max};
  const std::size_t m = times.size();
  const std::size_t E = envs.size();
  const std::size_t W = options.walkers;
  if (options.pooling == Pooling::Quenched && W < 2 * E) {
    throw ValidationError("quenched pooling needs at least two walkers per environment");
  }

  std::vector<WalkKernel> kernels;
  std::vector<std::vector<double>> v_env;
  kernels.reserve(E);
  for (const auto& e : envs) {
    kernels.emplace_back(e);
    v_env.push_back(mean_drift(e));
  }

  WalkOptions wopt;
  wopt.t_max = options.t_max;
  wopt.sample_times = times;
  wopt.track_compensator = options.track_compensator;

  std::vector<WalkerRows> rows(W);
  parallel_for(W, options.threads, [&](std::size_t w) {
    Rng rng = make_rng(options.seed, w, rng_tag::kWalker);
    const std::size_t e = w % E;
    const Trajectory tr = kernels[e].simulate(wopt, rng);
    WalkerRows& r = rows[w];
    r.x.resize(m * d);
    if (options.track_compensator) r.i.resize(m * d);
    for (std::size_t s = 0; s < m; ++s) {
      for (int a = 0; a < d; ++a) {
        const double shift = options.subtract_env_drift ? v_env[e][a] * times[s] : 0.0;
        r.x[s * d + a] = static_cast<double>(tr.position(s + 1, a)) - shift;
        if (options.track_compensator) r.i[s * d + a] = tr.integral(s + 1, a) - shift;
      }
    }
  });

  WalkEnsembleStats out;
  out.dim = d;
  out.pooling = options.pooling;
  out.has_compensator = options.track_compensator;
  out.environments = E;
  const bool quenched = options.pooling == Pooling::Quenched;
  const double dof = static_cast<double>(quenched ? W - E : (W > 1 ? W - 1 : 1));
  const std::size_t B = std::max<std::size_t>(1, std::min(options.batches, W));

  for (std::size_t s = 0; s < m; ++s) {
    std::vector<Eigen::VectorXd> xs(W), is, ys;
    for (std::size_t w = 0; w < W; ++w) xs[w] = Eigen::Map<const Eigen::VectorXd>(&rows[w].x[s * d], d);
    if (out.has_compensator) {
      is.resize(W);
      ys.resize(W);
      for (std::size_t w = 0; w < W; ++w) {
        is[w] = Eigen::Map<const Eigen::VectorXd>(&rows[w].i[s * d], d);
        ys[w] = xs[w] - is[w];
      }
    }

    // Centering: pooled mean, or the mean of each environment's walkers.
    auto centered = [&](const std::vector<Eigen::VectorXd>& v) {
      std::vector<Eigen::VectorXd> c = v;
      const std::size_t groups = quenched ? E : 1;
      std::vector<Eigen::VectorXd> sums(groups, Eigen::VectorXd::Zero(d));
      std::vector<double> counts(groups, 0.0);
      for (std::size_t w = 0; w < W; ++w) {
        const std::size_t g = quenched ? w % E : 0;
        sums[g] += v[w];
        counts[g] += 1.0;
      }
      for (std::size_t w = 0; w < W; ++w) {
        const std::size_t g = quenched ? w % E : 0;
        c[w] -= sums[g] / counts[g];
      }
      return c;
    };

    TimeStats ts;
    ts.t = times[s];
    ts.n = W;
    ts.mean = Eigen::VectorXd::Zero(d);
    for (const auto& x : xs) ts.mean += x;
    ts.mean /= static_cast<double>(W);
    ts.second_moment = outer_sum(xs, xs) / static_cast<double>(W);
    const auto cx = centered(xs);
    ts.cov = outer_sum(cx, cx) / dof;

    std::vector<Eigen::VectorXd> cy, ci;
    if (out.has_compensator) {
      ts.mean_y = Eigen::VectorXd::Zero(d);
      for (const auto& y : ys) ts.mean_y += y;
      ts.mean_y /= static_cast<double>(W);
      cy = centered(ys);
      ci = centered(is);
      ts.cov_y = outer_sum(cy, cy) / dof;
      ts.cov_i = outer_sum(ci, ci) / dof;
      ts.cov_yi = outer_sum(cy, ci) / dof;
    }

    // Batches are contiguous walker blocks; deviations use the full-sample centering.
    for (std::size_t b = 0; b < B; ++b) {
      const std::size_t lo = b * W / B, hi = (b + 1) * W / B;
      const double nb = static_cast<double>(hi - lo);
      Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(d, d), by = Eigen::MatrixXd::Zero(d, d);
      double msd = 0.0;
      for (std::size_t w = lo; w < hi; ++w) {
        bc += cx[w] * cx[w].transpose();
        if (out.has_compensator) by += cy[w] * cy[w].transpose();
        msd += xs[w].squaredNorm();
      }
      ts.batch_cov.push_back(bc / nb);
      if (out.has_compensator) ts.batch_cov_y.push_back(by / nb);
      ts.batch_msd.push_back(msd / nb);
    }
    out.rows.push_back(std::move(ts));
  }

  if (options.keep_endpoints) {
    out.endpoints.reserve(W * d);
    for (std::size_t w = 0; w < W; ++w) {
      out.endpoints.insert(out.endpoints.end(), rows[w].x.end() - d, rows[w].x.end());
    }
  }
  return out;
}

MartingaleReport martingale_check(const WalkEnsembleStats& stats) {
  if (!stats.has_compensator) throw ValidationError("martingale check needs the compensator");
  if (stats.rows.empty()) throw ValidationError("no sample times");
  MartingaleReport rep;
  rep.mean_zero = true;
  std::vector<double> vy;
  for (const auto& r : stats.rows) {
    rep.times.push_back(r.t);
    double z = 0.0;
    for (int a = 0; a < stats.dim; ++a) {
      const double se = std::sqrt(r.cov_y(a, a) / static_cast<double>(r.n));
      z = std::max(z, se > 0.0 ? std::abs(r.mean_y(a)) / se : 0.0);
    }
    rep.mean_y_z.push_back(z);
    if (z > 4.0) rep.mean_zero = false;
    rep.var_y_over_t.push_back(r.cov_y.trace() / r.t);
    rep.var_x_over_t.push_back(r.cov.trace() / r.t);
    vy.push_back(r.cov_y.trace());
  }
  rep.cross_cov_last = stats.rows.back().cov_yi;

  const auto n = static_cast<double>(vy.size());
  if (vy.size() >= 2) {
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < vy.size(); ++i) {
      mt += rep.times[i] / n;
      mv += vy[i] / n;
    }
    double stt = 0.0, stv = 0.0, svv = 0.0;
    for (std::size_t i = 0; i < vy.size(); ++i) {
      stt += (rep.times[i] - mt) * (rep.times[i] - mt);
      stv += (rep.times[i] - mt) * (vy[i] - mv);
      svv += (vy[i] - mv) * (vy[i] - mv);
    }
    rep.linear_r2 = (stt > 0.0 && svv > 0.0) ? stv * stv / (stt * svv) : 0.0;
  }
  rep.linear = rep.linear_r2 >= 0.99;
  return rep;
}

}  // namespace dfrw
