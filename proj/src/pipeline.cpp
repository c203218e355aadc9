#include "dfrw/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <set>

#include "dfrw/diffusivity.hpp"
#include "dfrw/env_io.hpp"
#include "dfrw/error.hpp"
#include "dfrw/generators.hpp"
#include "dfrw/h1.hpp"
#include "dfrw/report.hpp"

namespace dfrw {

namespace {

const std::vector<std::string> kStageOrder = {"gen", "walk", "sigma", "h1", "kv", "stats"};

std::vector<std::string> selected_stages(const Config& config) {
  std::set<std::string> chosen;
  for (std::string s : split_list(config.require("pipeline.stages"))) {
    if (s == "kv-check") s = "kv";
    if (std::find(kStageOrder.begin(), kStageOrder.end(), s) == kStageOrder.end()) {
      throw ValidationError("unknown pipeline stage '" + s + "'");
    }
    chosen.insert(s);
  }
  std::vector<std::string> out;
  for (const auto& s : kStageOrder) {
    if (chosen.count(s)) out.push_back(s);
  }
  if (out.empty()) throw ValidationError("pipeline.stages is empty");
  return out;
}

std::uint64_t require_seed(const Config& c, const std::string& key) {
  if (!c.has(key)) throw ValidationError("stochastic stage needs an explicit '" + key + "'");
  const long long v = c.require_int(key);
  if (v < 0) throw ValidationError("'" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

GeneratorConfig gen_config(const Config& c) {
  GeneratorConfig g;
  g.model = parse_model(c.require("gen.model"));
  g.dim = static_cast<int>(c.get_int("gen.dim", 2));
  g.side = static_cast<int>(c.require_int("gen.side"));
  g.seed = require_seed(c, "gen.seed");
  g.sweeps = static_cast<std::uint64_t>(c.get_int("gen.sweeps", 0));
  g.tail_index = c.get_double("gen.tail_index", 2.5);
  return g;
}

Pooling parse_pooling(const std::string& s) {
  if (s == "annealed") return Pooling::Annealed;
  if (s == "quenched") return Pooling::Quenched;
  throw ValidationError("unknown pooling '" + s + "'");
}

EnsembleOptions walk_options(const Config& c) {
  EnsembleOptions o;
  o.walkers = static_cast<std::size_t>(c.require_int("walk.walkers"));
  o.t_max = c.get_double("walk.tmax", 100.0);
  const auto samples = static_cast<std::size_t>(c.get_int("walk.samples", 20));
  const std::string spacing = c.get_string("walk.spacing", "log");
  if (spacing != "log" && spacing != "linear") throw ValidationError("walk.spacing must be log or linear");
  o.sample_times = sample_grid(c.get_double("walk.tmin", std::min(1.0, o.t_max / 2)), o.t_max, samples, spacing == "log");
  o.seed = require_seed(c, "walk.seed");
  o.pooling = parse_pooling(c.get_string("walk.pooling", "annealed"));
  o.track_compensator = c.get_bool("walk.compensator", true);
  o.subtract_env_drift = c.get_bool("walk.subtract_drift", false);
  o.keep_endpoints = true;
  if (o.walkers == 0) throw ValidationError("walk.walkers must be positive");
  return o;
}

class ManifestWriter {
 public:
  ManifestWriter(std::filesystem::path dir, std::vector<std::string> stages) : dir_(std::move(dir)) {
    manifest_.stages = std::move(stages);
  }

  void add(const std::string& name, const std::string& file) {
    const auto p = dir_ / file;
    manifest_.artifacts.push_back({name, file, sha256_file(p), std::filesystem::file_size(p)});
    flush();
  }

  void flush() const {
    Json j;
    j["stages"] = manifest_.stages;
    j["complete"] = manifest_.complete;
    if (!manifest_.error.empty()) j["error"] = manifest_.error;
    Json arts = Json::array();
    for (const auto& a : manifest_.artifacts) {
      arts.push_back({{"name", a.name}, {"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    }
    j["artifacts"] = arts;
    write_json(j, dir_ / "manifest.json");
  }

  Manifest& manifest() { return manifest_; }

 private:
  std::filesystem::path dir_;
  Manifest manifest_;
};

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

void validate_pipeline_config(const Config& config) {
  const auto stages = selected_stages(config);
  auto has = [&](const char* s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };
  const bool needs_env = has("gen") || has("walk") || has("sigma") || has("kv") || has("stats");
  if (needs_env && !has("gen")) throw ValidationError("stages walk/sigma/kv/stats need the gen stage");
  if (has("gen")) {
    const GeneratorConfig g = gen_config(config);
    if (has("kv") && g.model != Model::LocalRules && g.model != Model::SyntheticStream) {
      throw ValidationError("kv stage needs a model with a stream tensor (local_rules or synthetic)");
    }
  }
  if (has("walk")) walk_options(config);
  if (has("sigma")) {
    const std::string m = config.get_string("sigma.method", "cell");
    if (m != "cell" && m != "resolvent" && m != "mc") throw ValidationError("sigma.method must be cell, resolvent or mc");
    if (m == "mc" && !has("walk")) throw ValidationError("sigma.method = mc needs the walk stage");
    config.get_doubles("sigma.lambdas", {});
    config.get_double("sigma.tol", 1e-10);
  }
  if (has("stats") && !(has("walk") && has("sigma"))) throw ValidationError("stats stage needs walk and sigma");
  if (has("h1")) {
    parse_model(config.require("h1.model"));
    require_seed(config, "h1.seed");
    config.require_int("h1.samples");
    if (config.get_doubles("h1.sides", {}).empty()) throw ValidationError("h1.sides is required");
  }
  if (has("kv")) {
    require_seed(config, "kv.seed");
    const std::string op = config.get_string("kv.op", "B");
    if (op != "B" && op != "F") throw ValidationError("kv.op must be B or F");
    config.get_doubles("kv.Ks", {});
  }
}

Manifest run_pipeline(const Config& config, const std::filesystem::path& out_dir) {
  validate_pipeline_config(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string());

  ManifestWriter mw(out_dir, selected_stages(config));
  std::optional<GeneratedEnv> gen;
  std::optional<WalkEnsembleStats> walk;
  std::optional<DiffusivityEstimate> sigma;

  try {
    for (const auto& stage : mw.manifest().stages) {
      if (stage == "gen") {
        gen = generate(gen_config(config));
        write_env(out_dir / "env.bin", gen->env);
        mw.add("env", "env.bin");
        if (gen->stream) {
          write_stream(out_dir / "stream.bin", *gen->stream, gen->env.meta());
          mw.add("stream", "stream.bin");
        }
      } else if (stage == "walk") {
        const TorusEnv envs[] = {gen->env};
        walk = run_ensemble(envs, walk_options(config));
        write_stats_csv(*walk, out_dir / "stats.csv");
        mw.add("stats", "stats.csv");
        write_endpoints_csv(*walk, out_dir / "endpoints.csv");
        mw.add("endpoints", "endpoints.csv");
      } else if (stage == "sigma") {
        const std::string m = config.get_string("sigma.method", "cell");
        const double tol = config.get_double("sigma.tol", 1e-10);
        Json j;
        if (m == "cell") {
          sigma = sigma_cell_exact(gen->env, tol);
          j = sigma_to_json(*sigma);
        } else if (m == "resolvent") {
          const auto scan =
              sigma_resolvent_scan(gen->env, config.get_doubles("sigma.lambdas", {1e-1, 1e-2, 1e-3, 1e-4}), tol);
          sigma = scan.estimate;
          j = sigma_to_json(*sigma, scan.rows);
        } else {
          sigma = sigma_monte_carlo(*walk);
          j = sigma_to_json(*sigma);
        }
        write_json(j, out_dir / "sigma.json");
        mw.add("sigma", "sigma.json");
      } else if (stage == "h1") {
        std::vector<int> sides;
        for (double s : config.get_doubles("h1.sides", {})) sides.push_back(static_cast<int>(s));
        H1StudyOptions opts;
        opts.sweeps_per_site = config.get_double("h1.sweeps_per_site", opts.sweeps_per_site);
        const H1Study study = h1_scaling_study(parse_model(config.require("h1.model")),
                                               static_cast<int>(config.get_int("h1.dim", 2)), sides,
                                               static_cast<std::size_t>(config.require_int("h1.samples")),
                                               require_seed(config, "h1.seed"), opts);
        write_h1_csv(study.table, out_dir / "h1.csv");
        mw.add("h1", "h1.csv");
      } else if (stage == "kv") {
        const KvOperator op = config.get_string("kv.op", "B") == "F" ? KvOperator::F : KvOperator::B;
        const Json j = kv_report(*gen->stream, op, static_cast<std::size_t>(config.get_int("kv.pairs", 10)),
                                 config.get_doubles("kv.Ks", {1, 2, 4, 8}), require_seed(config, "kv.seed"));
        write_json(j, out_dir / "kv.json");
        mw.add("kv", "kv.json");
      } else if (stage == "stats") {
        Endpoints ep{walk->dim, walk->rows.back().t, walk->endpoints};
        write_json(stats_report(*walk, *sigma, ep), out_dir / "report.json");
        mw.add("report", "report.json");
        write_curves_csv(*walk, out_dir / "curves.csv");
        mw.add("curves", "curves.csv");
      }
    }
  } catch (const std::exception& e) {
    mw.manifest().error = e.what();
    mw.flush();
    throw;
  }
  mw.manifest().complete = true;
  mw.flush();
  return mw.manifest();
}

}  // namespace dfrw
