#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>

#include "CLI11.hpp"

#include "dfrw/config.hpp"
#include "dfrw/diffusivity.hpp"
#include "dfrw/env_io.hpp"
#include "dfrw/error.hpp"
#include "dfrw/generators.hpp"
#include "dfrw/h1.hpp"
#include "dfrw/kv.hpp"
#include "dfrw/ops.hpp"
#include "dfrw/parallel.hpp"
#include "dfrw/pipeline.hpp"
#include "dfrw/report.hpp"

namespace {

using namespace dfrw;

bool g_verbose = false;

void note(const std::string& msg) {
  if (g_verbose) std::cerr << msg << '\n';
}

Pooling parse_pooling(const std::string& s) {
  if (s == "annealed") return Pooling::Annealed;
  if (s == "quenched") return Pooling::Quenched;
  throw ValidationError("unknown pooling '" + s + "'");
}

struct GenArgs {
  std::string model = "local-rules";
  int dim = 2;
  int side = 16;
  std::uint64_t seed = 0;
  std::uint64_t sweeps = 0;
  double tail_index = 2.5;
  bool raw = false;
  std::string out, stream_out;
};

int run_gen(const GenArgs& a) {
  GeneratorConfig cfg;
  cfg.model = parse_model(a.model);
  cfg.dim = a.dim;
  cfg.side = a.side;
  cfg.seed = a.seed;
  cfg.sweeps = a.sweeps;
  cfg.tail_index = a.tail_index;
  cfg.walkable = !a.raw;
  const GeneratedEnv g = generate(cfg);
  const ValidationReport rep = validate_env(g.env);
  write_env(a.out, g.env);
  if (!a.stream_out.empty()) {
    if (!g.stream) throw ValidationError("model " + a.model + " has no stream tensor");
    write_stream(a.stream_out, *g.stream, g.env.meta());
  }
  std::cout << "model=" << model_name(cfg.model) << " d=" << cfg.dim << " L=" << cfg.side
            << " antisymmetry=" << rep.max_antisymmetry << " divergence=" << rep.max_divergence
            << " range_violations=" << rep.range_violations;
  if (g.flips) std::cout << " flip_acceptance=" << g.flips->acceptance();
  std::cout << '\n';
  return 0;
}

struct WalkArgs {
  std::vector<std::string> envs;
  std::size_t walkers = 1000;
  double tmax = 100.0;
  double tmin = 0.0;
  std::size_t samples = 20;
  std::string spacing = "log";
  std::uint64_t seed = 0;
  std::string pooling = "annealed";
  bool fast = false;
  bool subtract_drift = false;
  std::string out, endpoints;
};

EnsembleOptions ensemble_options(const WalkArgs& a) {
  EnsembleOptions o;
  o.walkers = a.walkers;
  o.t_max = a.tmax;
  const double tmin = a.tmin > 0.0 ? a.tmin : std::min(1.0, a.tmax / 2.0);
  o.sample_times = sample_grid(tmin, a.tmax, a.samples, a.spacing == "log");
  o.seed = a.seed;
  o.pooling = parse_pooling(a.pooling);
  o.track_compensator = !a.fast;
  o.subtract_env_drift = a.subtract_drift;
  o.keep_endpoints = !a.endpoints.empty();
  return o;
}

std::vector<TorusEnv> load_envs(const std::vector<std::string>& paths) {
  std::vector<TorusEnv> envs;
  for (const auto& p : paths) {
    envs.push_back(read_env(p));
    const ValidationReport r = validate_env(envs.back());
    if (!r.passed) throw ValidationError(p + ": environment fails validation");
  }
  return envs;
}

int run_walk(const WalkArgs& a) {
  if (a.spacing != "log" && a.spacing != "linear") throw ValidationError("--spacing must be log or linear");
  const auto envs = load_envs(a.envs);
  const WalkEnsembleStats stats = run_ensemble(envs, ensemble_options(a));
  write_stats_csv(stats, a.out);
  if (!a.endpoints.empty()) write_endpoints_csv(stats, a.endpoints);
  note("wrote " + std::to_string(stats.rows.size()) + " sample times");
  return 0;
}

struct SigmaArgs {
  std::string env, method = "cell", lambdas = "1e-1,1e-2,1e-3,1e-4", out;
  double tol = 1e-10;
  WalkArgs walk;
};

int run_sigma(const SigmaArgs& a) {
  const TorusEnv env = read_env(a.env);
  if (!validate_env(env).passed) throw ValidationError(a.env + ": environment fails validation");
  Json j;
  DiffusivityEstimate est;
  if (a.method == "cell") {
    est = sigma_cell_exact(env, a.tol);
    j = sigma_to_json(est);
  } else if (a.method == "resolvent") {
    const ResolventScan scan = sigma_resolvent_scan(env, parse_doubles(a.lambdas), a.tol);
    est = scan.estimate;
    j = sigma_to_json(est, scan.rows);
    j["lam_norm_decreasing"] = scan.lam_norm_decreasing;
    j["decrease_ratio"] = scan.decrease_ratio;
  } else if (a.method == "mc") {
    const TorusEnv envs[] = {env};
    est = sigma_monte_carlo(run_ensemble(envs, ensemble_options(a.walk)));
    j = sigma_to_json(est);
  } else {
    throw ValidationError("--method must be cell, resolvent or mc");
  }
  write_json(j, a.out);
  std::cout << "sigma2 trace=" << est.sigma2.trace() << (est.withheld ? " (withheld: " + est.note + ")" : "") << '\n';
  return 0;
}

struct H1Args {
  std::string model = "local-rules", sides = "16,32,64", out;
  int dim = 2;
  std::size_t samples = 16;
  std::uint64_t seed = 0;
  double sweeps_per_site = 2.0;
};

int run_h1(const H1Args& a) {
  std::vector<int> sides;
  for (double s : parse_doubles(a.sides)) sides.push_back(static_cast<int>(s));
  H1StudyOptions opts;
  opts.sweeps_per_site = a.sweeps_per_site;
  const H1Study study = h1_scaling_study(parse_model(a.model), a.dim, sides, a.samples, a.seed, opts);
  write_h1_csv(study.table, a.out);
  std::cout << "verdict=" << verdict_name(study.verdict) << " top_increment=" << study.top_increment
            << " growth=" << study.best_growth << " confidence=" << study.confidence << '\n';
  return 0;
}

struct KvArgs {
  std::string stream, op = "B", Ks = "1,2,4,8", out;
  std::size_t pairs = 100;
  std::uint64_t seed = 0;
};

int run_kv(const KvArgs& a) {
  if (a.op != "B" && a.op != "F") throw ValidationError("--op must be B or F");
  const StreamTensor h = read_stream(a.stream);
  const Json j = kv_report(h, a.op == "B" ? KvOperator::B : KvOperator::F, a.pairs, parse_doubles(a.Ks), a.seed);
  write_json(j, a.out);
  std::cout << "skew_residual=" << j["skew_residual"].get<double>()
            << " conjugacy_residual=" << j["conjugacy_residual"].get<double>() << '\n';
  return 0;
}

struct StatsArgs {
  std::string in, sigma, report, csv, endpoints;
};

int run_stats(const StatsArgs& a) {
  const WalkEnsembleStats stats = read_stats_csv(a.in);
  const DiffusivityEstimate ref = sigma_from_json(read_json(a.sigma));
  std::optional<Endpoints> ep;
  if (!a.endpoints.empty()) ep = read_endpoints_csv(a.endpoints);
  write_json(stats_report(stats, ref, ep), a.report);
  if (!a.csv.empty()) write_curves_csv(stats, a.csv);
  return 0;
}

int run_self_test(int dim, int side, std::uint64_t seed) {
  bool ok = true;
  for (const auto& c : operator_self_test(dim, side, seed)) {
    std::printf("%-42s residual=%.3e tol=%.1e %s\n", c.name.c_str(), c.residual, c.tolerance,
                c.passed() ? "ok" : "FAIL");
    ok = ok && c.passed();
  }
  if (!ok) throw NumericalError("operator identities violated");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks in divergence-free random drift fields on the torus"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
  app.add_flag("--verbose", g_verbose, "progress messages on stderr");

  std::function<int()> action;

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "sample an environment");
  g->add_option("--model", gen.model, "local-rules|manhattan|six-vertex|synthetic")->required();
  g->add_option("--dim", gen.dim);
  g->add_option("--side", gen.side)->required();
  g->add_option("--seed", gen.seed)->required();
  g->add_option("--sweeps", gen.sweeps, "six-vertex sweeps");
  g->add_option("--tail-index", gen.tail_index, "synthetic Pareto tail index (inf for ±1)");
  g->add_flag("--raw", gen.raw, "synthetic: keep raw amplitudes (no walkable rescaling)");
  g->add_option("--out", gen.out)->required();
  g->add_option("--stream-out", gen.stream_out, "also write the stream tensor");
  g->callback([&] { action = [&] { return run_gen(gen); }; });

  WalkArgs walk;
  auto add_walk_opts = [](CLI::App* c, WalkArgs& w, bool required) {
    auto* s = c->add_option("--seed", w.seed);
    if (required) s->required();
    c->add_option("--walkers", w.walkers);
    c->add_option("--tmax", w.tmax);
    c->add_option("--tmin", w.tmin, "first sample time");
    c->add_option("--samples", w.samples, "number of sample times");
    c->add_option("--spacing", w.spacing, "log|linear");
    c->add_option("--pooling", w.pooling, "annealed|quenched");
    c->add_flag("--fast", w.fast, "Poisson jump counts, no compensator");
    c->add_flag("--subtract-drift", w.subtract_drift, "subtract v t per environment");
  };
  auto* w = app.add_subcommand("walk", "simulate a walker ensemble");
  w->add_option("--env", walk.envs, "environment file (repeatable)")->required();
  add_walk_opts(w, walk, true);
  w->add_option("--out", walk.out)->required();
  w->add_option("--endpoints", walk.endpoints, "write positions at t_max");
  w->callback([&] { action = [&] { return run_walk(walk); }; });

  SigmaArgs sigma;
  auto* s = app.add_subcommand("sigma", "effective diffusivity");
  s->add_option("--env", sigma.env)->required();
  s->add_option("--method", sigma.method, "cell|resolvent|mc");
  s->add_option("--lambdas", sigma.lambdas);
  s->add_option("--tol", sigma.tol);
  s->add_option("--out", sigma.out)->required();
  add_walk_opts(s, sigma.walk, false);
  s->callback([&] { action = [&] { return run_sigma(sigma); }; });

  H1Args h1;
  auto* h = app.add_subcommand("h1", "finite-size scaling of the H-1 statistic");
  h->add_option("--model", h1.model)->required();
  h->add_option("--dim", h1.dim);
  h->add_option("--sides", h1.sides);
  h->add_option("--samples", h1.samples);
  h->add_option("--seed", h1.seed)->required();
  h->add_option("--sweeps-per-site", h1.sweeps_per_site, "six-vertex sweeps per L^2");
  h->add_option("--out", h1.out)->required();
  h->callback([&] { action = [&] { return run_h1(h1); }; });

  KvArgs kv;
  auto* k = app.add_subcommand("kv-check", "skew-symmetry and truncation checks");
  k->add_option("--stream", kv.stream)->required();
  k->add_option("--op", kv.op, "B|F");
  k->add_option("--pairs", kv.pairs);
  k->add_option("--Ks", kv.Ks);
  k->add_option("--seed", kv.seed);
  k->add_option("--out", kv.out)->required();
  k->callback([&] { action = [&] { return run_kv(kv); }; });

  StatsArgs st;
  auto* t = app.add_subcommand("stats", "post-process walk statistics");
  t->add_option("--in", st.in)->required();
  t->add_option("--sigma", st.sigma)->required();
  t->add_option("--report", st.report)->required();
  t->add_option("--csv", st.csv);
  t->add_option("--endpoints", st.endpoints);
  t->callback([&] { action = [&] { return run_stats(st); }; });

  std::string config_path, out_dir;
  auto* p = app.add_subcommand("pipeline", "run a configured pipeline");
  p->add_option("--config", config_path)->required();
  p->add_option("--out", out_dir)->required();
  p->callback([&] {
    action = [&] {
      const Manifest m = run_pipeline(Config::load(config_path), out_dir);
      std::cout << "artifacts=" << m.artifacts.size() << '\n';
      return 0;
    };
  });

  int st_dim = 2, st_side = 16;
  std::uint64_t st_seed = 1;
  auto* o = app.add_subcommand("ops", "operator utilities");
  o->require_subcommand(1);
  auto* ost = o->add_subcommand("self-test", "run the operator identity suite");
  ost->add_option("--dim", st_dim);
  ost->add_option("--side", st_side);
  ost->add_option("--seed", st_seed);
  ost->callback([&] { action = [&] { return run_self_test(st_dim, st_side, st_seed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    set_default_threads(threads);
    return action ? action() : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
