#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dfrw/config.hpp"
#include "dfrw/error.hpp"
#include "dfrw/report.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / ("dfrw_cli_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(DFRW_CLI) + " " + args + " > " + (workdir() / "stdout.txt").string() +
                          " 2> " + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("gen, walk, sigma and stats chain") {
  REQUIRE(run("gen --model local-rules --dim 2 --side 16 --seed 3 --out " + path("env.bin") + " --stream-out " +
              path("stream.bin")) == 0);
  CHECK(slurp(workdir() / "stdout.txt").find("model=local_rules") != std::string::npos);
  REQUIRE(run("walk --env " + path("env.bin") + " --seed 4 --walkers 500 --tmax 100 --samples 10 --out " +
              path("stats.csv") + " --endpoints " + path("ends.csv")) == 0);
  REQUIRE(run("sigma --env " + path("env.bin") + " --method cell --out " + path("sigma.json")) == 0);
  const auto sigma = dfrw::read_json(workdir() / "sigma.json");
  CHECK(sigma["method"] == "cell_exact");
  CHECK(sigma["sigma2"].size() == 2);
  REQUIRE(run("stats --in " + path("stats.csv") + " --sigma " + path("sigma.json") + " --report " +
              path("report.json") + " --csv " + path("curves.csv") + " --endpoints " + path("ends.csv")) == 0);
  const auto rep = dfrw::read_json(workdir() / "report.json");
  CHECK(rep.contains("msd_exponent"));
  CHECK(rep.contains("gaussianity"));
  CHECK(fs::file_size(workdir() / "curves.csv") > 0);
}

TEST_CASE("resolvent and kv-check") {
  REQUIRE(run("gen --model local-rules --dim 2 --side 8 --seed 5 --out " + path("e8.bin") + " --stream-out " +
              path("s8.bin")) == 0);
  CHECK(run("sigma --env " + path("e8.bin") + " --method resolvent --lambdas 1e-1,1e-2,1e-3 --out " +
            path("sr.json")) == 0);
  CHECK(dfrw::read_json(workdir() / "sr.json")["scan"].size() == 3);
  CHECK(run("kv-check --stream " + path("s8.bin") + " --op F --pairs 5 --Ks 0.1,1 --seed 2 --out " +
            path("kv.json")) == 0);
  const auto kv = dfrw::read_json(workdir() / "kv.json");
  CHECK(kv["op"] == "F");
  CHECK(kv["skew_residual"].get<double>() < 1e-10);
  CHECK(kv["truncation"].size() == 2);
}

TEST_CASE("h1 and ops self-test") {
  CHECK(run("h1 --model local-rules --dim 2 --sides 4,8 --samples 5 --seed 1 --out " + path("h1.csv")) == 0);
  CHECK(slurp(workdir() / "stdout.txt").find("verdict=") != std::string::npos);
  CHECK(slurp(workdir() / "h1.csv").rfind("model,d,L,S,stderr,n", 0) == 0);
  CHECK(run("ops self-test --dim 2 --side 8") == 0);
}

TEST_CASE("exit codes") {
  CHECK(run("gen --model nope --side 8 --seed 1 --out " + path("x.bin")) == 2);
  CHECK(run("gen --model local-rules --side 7 --seed 1 --out " + path("x.bin")) == 2);
  CHECK(run("gen --side 8 --seed 1 --out " + path("x.bin")) == 2);
  CHECK(run("bogus") == 2);
  CHECK(run("walk --env " + path("missing.bin") + " --seed 1 --out " + path("w.csv")) == 4);
  {
    std::ofstream(workdir() / "garbage.bin") << "not an environment";
  }
  CHECK(run("sigma --env " + path("garbage.bin") + " --out " + path("g.json")) == 4);
  // Raw heavy-tailed amplitudes give negative rates.
  CHECK(run("gen --model synthetic --dim 2 --side 8 --seed 1 --tail-index 2.5 --raw --out " + path("raw.bin")) ==
        0);
  CHECK(run("walk --env " + path("raw.bin") + " --seed 1 --walkers 10 --out " + path("r.csv")) == 2);
}

TEST_CASE("config parsing") {
  const auto c = dfrw::Config::parse("# comment\npipeline.stages = gen\ngen.side = 8\n\ngen.seed=3\n");
  CHECK(c.has("gen.side"));
  CHECK_THROWS_AS(dfrw::Config::parse("gen.side = 8\ngen.side = 9\n"), dfrw::ValidationError);
  CHECK_THROWS_AS(dfrw::Config::parse("no equals sign\n"), dfrw::ValidationError);
  CHECK_THROWS_AS(dfrw::Config::parse("nodot = 1\n"), dfrw::ValidationError);
}

TEST_CASE("pipeline through the CLI is deterministic and validates seeds") {
  const std::string cfg =
      "pipeline.stages = gen, walk, sigma, stats\n"
      "gen.model = local_rules\ngen.dim = 2\ngen.side = 8\ngen.seed = 1\n"
      "walk.walkers = 200\nwalk.tmax = 50\nwalk.samples = 8\nwalk.seed = 2\n"
      "sigma.method = cell\n";
  std::ofstream(workdir() / "p.cfg") << cfg;
  REQUIRE(run("pipeline --config " + path("p.cfg") + " --out " + path("runA")) == 0);
  REQUIRE(run("--threads 2 pipeline --config " + path("p.cfg") + " --out " + path("runB")) == 0);
  CHECK(slurp(workdir() / "runA" / "manifest.json") == slurp(workdir() / "runB" / "manifest.json"));
  const auto m = dfrw::read_json(workdir() / "runA" / "manifest.json");
  CHECK(m["complete"] == true);

  std::ofstream(workdir() / "noseed.cfg") << "pipeline.stages = gen\ngen.model = manhattan\ngen.side = 8\n";
  CHECK(run("pipeline --config " + path("noseed.cfg") + " --out " + path("runC")) == 2);
  std::ofstream(workdir() / "dup.cfg") << "pipeline.stages = gen\ngen.seed = 1\ngen.seed = 1\n";
  CHECK(run("pipeline --config " + path("dup.cfg") + " --out " + path("runD")) == 2);
}
