#include "dfrw/diffusivity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "dfrw/error.hpp"
#include "dfrw/ops.hpp"
#include "dfrw/spectral.hpp"

namespace dfrw {

std::string method_name(SigmaMethod method) {
  switch (method) {
    case SigmaMethod::CellExact: return "cell_exact";
    case SigmaMethod::ResolventScan: return "resolvent_scan";
    case SigmaMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

ResolventSolve solve_resolvent(const TorusEnv& env, double lambda, double tol, GmresOptions options) {
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be non-negative");
  const Torus& t = env.torus();
  options.tol = tol;

  const LinearMap op = [&](std::span<const double> in, std::span<double> out) {
    const ScalarField f(t, std::vector<double>(in.begin(), in.end()));
    const ScalarField lf = apply_L(env, f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lambda * in[i] - lf[i];
  };
  const LinearMap pre = [&](std::span<const double> in, std::span<double> out) {
    const ScalarField g = apply_shifted_inverse(lambda, ScalarField(t, std::vector<double>(in.begin(), in.end())));
    std::copy(g.values().begin(), g.values().end(), out.begin());
  };

  ResolventSolve res;
  res.lambda = lambda;
  res.converged = true;
  for (const ScalarField& phi : drift_phi(env)) {
    const ScalarField rhs = phi.centered();
    ScalarField chi(t);
    if (norm(rhs) > 0.0) {
      const GmresResult g = gmres(op, pre, rhs.values(), options);
      chi = ScalarField(t, g.x);
      if (lambda == 0.0) chi = chi.centered();
      res.iterations += g.iterations;
      res.converged = res.converged && g.converged;
      res.residual = std::max(res.residual, g.relative_residual);
    }
    res.chi.push_back(std::move(chi));
  }
  return res;
}

ResolventScan sigma_resolvent_scan(const TorusEnv& env, const std::vector<double>& lambdas, double tol) {
  if (lambdas.empty()) throw ValidationError("resolvent scan needs at least one lambda");
  std::vector<double> ls = lambdas;
  std::sort(ls.begin(), ls.end(), std::greater<>());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  if (ls.back() < 0.0) throw ValidationError("lambda must be non-negative");

  const int d = env.dim();
  std::vector<ScalarField> phi;
  for (const auto& f : drift_phi(env)) phi.push_back(f.centered());

  ResolventScan scan;
  bool converged = true;
  for (double lambda : ls) {
    const ResolventSolve s = solve_resolvent(env, lambda, tol);
    converged = converged && s.converged;
    ScanRow row;
    row.lambda = lambda;
    row.m = Eigen::MatrixXd::Zero(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) row.m(a, b) = inner(phi[a], s.chi[b]);
      row.lam_norm2 += lambda * inner(s.chi[a], s.chi[a]);
      row.dirichlet += inner(s.chi[a], apply_S(s.chi[a]));
    }
    row.m = 0.5 * (row.m + row.m.transpose()).eval();
    row.residual = s.residual;
    row.iterations = s.iterations;
    scan.rows.push_back(std::move(row));
  }

  scan.lam_norm_decreasing = true;
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    const auto& prev = scan.rows[i - 1];
    const auto& cur = scan.rows[i];
    const double scale = std::max(1.0, std::abs(prev.m.trace()));
    if (cur.m.trace() < prev.m.trace() - 1e-9 * scale) scan.monotone = false;
    if (cur.lam_norm2 > prev.lam_norm2 * (1.0 + 1e-9) + 1e-300) scan.lam_norm_decreasing = false;
  }
  const double last = scan.rows.back().lam_norm2;
  scan.decrease_ratio = last > 0.0 ? scan.rows.front().lam_norm2 / last : std::numeric_limits<double>::infinity();

  // m(0): the λ = 0 row when present, else a least-squares line through the
  // three smallest λ evaluated at zero.
  Eigen::MatrixXd m0;
  if (ls.back() == 0.0) {
    m0 = scan.rows.back().m;
  } else {
    const std::size_t k = std::min<std::size_t>(3, scan.rows.size());
    const std::size_t first = scan.rows.size() - k;
    if (k == 1) {
      m0 = scan.rows.back().m;
    } else {
      double ml = 0.0;
      Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(d, d);
      for (std::size_t i = first; i < scan.rows.size(); ++i) {
        ml += scan.rows[i].lambda / k;
        mm += scan.rows[i].m / static_cast<double>(k);
      }
      double sll = 0.0;
      Eigen::MatrixXd slm = Eigen::MatrixXd::Zero(d, d);
      for (std::size_t i = first; i < scan.rows.size(); ++i) {
        sll += (scan.rows[i].lambda - ml) * (scan.rows[i].lambda - ml);
        slm += (scan.rows[i].lambda - ml) * (scan.rows[i].m - mm);
      }
      m0 = mm - (slm / sll) * ml;
    }
  }

  DiffusivityEstimate& est = scan.estimate;
  est.method = SigmaMethod::ResolventScan;
  est.sigma2 = 2.0 * Eigen::MatrixXd::Identity(d, d) + 2.0 * m0;
  est.mean_drift = to_eigen(mean_drift(env));
  est.parameter = ls.back();
  if (!scan.monotone) {
    est.withheld = true;
    est.note = "m(lambda) is not monotone along the scan";
  } else if (!converged) {
    est.note = "some resolvent solves did not reach the tolerance";
  }
  return scan;
}

bool is_irreducible(const TorusEnv& env) {
  const Torus& t = env.torus();
  const std::size_t n = t.sites();
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (int k = 0; k < t.directions(); ++k) {
        const std::size_t y = t.neighbor(x, k);
        // Backward search follows edges y -> x, i.e. rate of direction -k at y.
        const double r = forward ? env.rate(x, k) : env.rate(y, opposite(k));
        if (r > 0.0 && !seen[y]) {
          seen[y] = 1;
          ++count;
          queue.push_back(y);
        }
      }
    }
    return count == n;
  };
  return reach(true) && reach(false);
}

DiffusivityEstimate sigma_cell_exact(const TorusEnv& env, double tol) {
  if (!is_irreducible(env)) throw NumericalError("torus chain is reducible; the cell problem is singular");
  GmresOptions opts;
  opts.restart = 200;
  const ResolventSolve s = solve_resolvent(env, 0.0, tol, opts);
  if (!s.converged) {
    throw NumericalError("cell problem did not converge (relative residual " + std::to_string(s.residual) + ")");
  }
  const Torus& t = env.torus();
  const int d = t.dim();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd w(d);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < t.directions(); ++k) {
      const std::size_t y = t.neighbor(x, k);
      for (int a = 0; a < d; ++a) {
        const double step = (k >> 1) == a ? ((k & 1) ? -1.0 : 1.0) : 0.0;
        w(a) = step + s.chi[a][y] - s.chi[a][x];
      }
      sigma += env.rate(x, k) * w * w.transpose();
    }
  }
  DiffusivityEstimate est;
  est.method = SigmaMethod::CellExact;
  est.sigma2 = sigma / static_cast<double>(t.sites());
  est.mean_drift = to_eigen(mean_drift(env));
  est.parameter = tol;
  return est;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace

DiffusivityEstimate sigma_monte_carlo(const WalkEnsembleStats& stats, MonteCarloFitOptions options) {
  if (stats.rows.empty()) throw ValidationError("no sample times in walk statistics");
  const double t_last = stats.rows.back().t;
  const double lo = options.t_min > 0.0 ? options.t_min : t_last / 10.0;
  const double hi = options.t_max > 0.0 ? options.t_max : t_last;
  std::vector<const TimeStats*> win;
  for (const auto& r : stats.rows) {
    if (r.t >= lo && r.t <= hi) win.push_back(&r);
  }
  if (win.size() < 2) throw ValidationError("Monte Carlo fit window needs at least two sample times");

  const int d = stats.dim;
  std::vector<double> ts;
  for (const auto* r : win) ts.push_back(r->t);

  auto slope_of = [&](std::size_t from, std::size_t to, auto&& value) {
    std::vector<double> x(ts.begin() + from, ts.begin() + to), y;
    for (std::size_t i = from; i < to; ++i) y.push_back(value(*win[i]));
    return fit_line(x, y).slope;
  };

  DiffusivityEstimate est;
  est.method = SigmaMethod::MonteCarlo;
  est.sigma2 = Eigen::MatrixXd::Zero(d, d);
  est.mean_drift = Eigen::VectorXd::Zero(d);
  est.parameter = lo;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      est.sigma2(a, b) = slope_of(0, win.size(), [&](const TimeStats& r) { return r.cov(a, b); });
    }
    est.mean_drift(a) = slope_of(0, win.size(), [&](const TimeStats& r) { return r.mean(a); });
  }

  // Standard errors from the spread of per-batch slopes.
  const std::size_t B = win.front()->batch_cov.size();
  if (B >= 2) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d), sum2 = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t b = 0; b < B; ++b) {
      Eigen::MatrixXd s(d, d);
      for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) {
          s(a, c) = slope_of(0, win.size(), [&](const TimeStats& r) { return r.batch_cov[b](a, c); });
        }
      }
      sum += s;
      sum2 += s.cwiseProduct(s);
    }
    const double nb = static_cast<double>(B);
    const Eigen::MatrixXd var = (sum2 - sum.cwiseProduct(sum) / nb) / (nb - 1.0);
    est.stderr = (var.cwiseMax(0.0) / nb).cwiseSqrt();
  }

  // Superdiffusion flag: the trace slope over the upper half of the window
  // exceeds the lower-half slope by more than 10% and by more than 3 SE.
  if (win.size() >= 4) {
    const std::size_t mid = win.size() / 2;
    auto tr = [](const TimeStats& r) { return r.cov.trace(); };
    const double s1 = slope_of(0, mid + 1, tr);
    const double s2 = slope_of(mid, win.size(), tr);
    double se = 0.0;
    if (B >= 2) {
      double sum = 0.0, sum2 = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        auto btr = [&](const TimeStats& r) { return r.batch_cov[b].trace(); };
        const double diff = slope_of(mid, win.size(), btr) - slope_of(0, mid + 1, btr);
        sum += diff;
        sum2 += diff * diff;
      }
      const double nb = static_cast<double>(B);
      se = std::sqrt(std::max(0.0, (sum2 - sum * sum / nb) / (nb - 1.0)) / nb);
    }
    if (s2 - s1 > 0.1 * std::abs(s1) && s2 - s1 > 3.0 * se) {
      est.withheld = true;
      est.note = "Cov(X)/t grows across the fit window; not diffusive on this time range";
    }
  }
  return est;
}

}  // namespace dfrw
