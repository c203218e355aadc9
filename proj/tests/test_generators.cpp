#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <map>

#include "dfrw/error.hpp"
#include "dfrw/generators.hpp"

using namespace dfrw;

TEST_CASE("model names") {
  CHECK(parse_model("local-rules") == Model::LocalRules);
  CHECK(parse_model("six_vertex") == Model::SixVertex);
  CHECK(parse_model("synthetic") == Model::SyntheticStream);
  CHECK_THROWS_AS(parse_model("ising"), ValidationError);
  CHECK(model_name(Model::Manhattan) == "manhattan");
}

TEST_CASE("local rules d=2: drift values and jump probabilities") {
  const auto s = gen_local_rules(2, 64, 1);
  std::map<double, std::size_t> counts;
  for (double b : s.env.drift()) ++counts[b];
  REQUIRE(counts.size() == 3);
  const double n = static_cast<double>(s.env.drift().size());
  CHECK(counts[-1.0] / n == doctest::Approx(0.25).epsilon(0.1));
  CHECK(counts[0.0] / n == doctest::Approx(0.5).epsilon(0.1));
  CHECK(counts[1.0] / n == doctest::Approx(0.25).epsilon(0.1));
  // p_k / sum p is 1/2, 1/4 or 0.
  for (double b : s.env.drift()) {
    const double p = (1.0 + b) / 4.0;
    CHECK((p == 0.0 || p == 0.25 || p == 0.5));
  }
}

TEST_CASE("local rules: opposite neighbouring faces give |b| = 1, equal faces give 0") {
  const Torus t(2, 4);
  std::vector<std::vector<double>> psi(1, std::vector<double>(t.sites(), 0.5));
  // All faces clockwise: interior edges cancel.
  auto env = TorusEnv(curl_of_stream(StreamTensor::from_plaquettes(t, psi)));
  for (double b : env.drift()) CHECK(b == 0.0);
  psi[0][5] = -0.5;
  env = TorusEnv(curl_of_stream(StreamTensor::from_plaquettes(t, psi)));
  double peak = 0.0;
  for (double b : env.drift()) peak = std::max(peak, std::abs(b));
  CHECK(peak == 1.0);
}

TEST_CASE("local rules in higher dimensions stay walkable") {
  for (int d : {3, 4}) {
    const auto s = gen_local_rules(d, 8, 4);
    const auto r = validate_env(s.env, 0.0);
    CHECK(r.passed);
  }
  CHECK_THROWS_AS(gen_local_rules(2, 7, 1), ValidationError);
}

TEST_CASE("manhattan: line structure") {
  const auto env = gen_manhattan(2, 16, 3);
  CHECK(validate_env(env, 0.0).passed);
  const Torus& t = env.torus();
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < 4; ++k) CHECK(std::abs(env.b(x, k)) == 1.0);
    // b_{+0} is constant along axis 0
    CHECK(env.b(x, 0) == env.b(t.neighbor(x, 0), 0));
    CHECK(env.b(x, 2) == env.b(t.neighbor(x, 2), 2));
  }
}

TEST_CASE("manhattan: all lines positive") {
  const Torus t(3, 4);
  const TorusEnv env = manhattan_from_orientations(t, std::vector<std::vector<int>>(3, std::vector<int>(16, 1)));
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int a = 0; a < 3; ++a) {
      CHECK(env.b(x, 2 * a) == 1.0);
      CHECK(env.b(x, 2 * a + 1) == -1.0);
    }
  }
  CHECK_THROWS_AS(manhattan_from_orientations(t, std::vector<std::vector<int>>(3, std::vector<int>(15, 1))),
                  ValidationError);
}

TEST_CASE("manhattan: site mean of b_{e1} averages to zero") {
  const int seeds = 1000;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const TorusEnv env = gen_manhattan(2, 16, s);
    double m = 0.0;
    for (std::size_t x = 0; x < env.torus().sites(); ++x) m += env.b(x, 0);
    m /= static_cast<double>(env.torus().sites());
    sum += m;
    sum2 += m * m;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt((sum2 / seeds - mean * mean) / seeds);
  CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("six-vertex: initial state and sampler") {
  const auto init = gen_six_vertex(8, 1, 0);
  CHECK(validate_env(init.env, 0.0).passed);
  CHECK(init.flips.proposed == 0);
  const auto s = gen_six_vertex(8, 1, 10000, true);
  CHECK(validate_env(s.env, 0.0).passed);
  CHECK(s.flips.acceptance() > 0.0);
  bool differs = false;
  for (std::size_t i = 0; i < s.env.drift().size(); ++i) differs = differs || s.env.drift()[i] != init.env.drift()[i];
  CHECK(differs);
  for (std::size_t x = 0; x < s.env.torus().sites(); ++x) {
    int out = 0;
    for (int k = 0; k < 4; ++k) out += s.env.b(x, k) > 0 ? 1 : 0;
    CHECK(out == 2);
  }
  GeneratorConfig cfg;
  cfg.model = Model::SixVertex;
  cfg.dim = 3;
  cfg.side = 4;
  CHECK_THROWS_AS(generate(cfg), ValidationError);
}

TEST_CASE("synthetic stream") {
  CHECK_THROWS_AS(gen_synthetic_stream(2, 8, 1, 2.0, true), ValidationError);
  const auto raw = gen_synthetic_stream(2, 16, 1, 2.5, false);
  CHECK(validate_stream(raw.stream).passed(0.0));
  CHECK(raw.scale == 1.0);
  const auto w = gen_synthetic_stream(2, 16, 1, 2.5, true);
  CHECK(validate_env(w.env).passed);
  CHECK(w.scale < 1.0);
  CHECK(std::log2(w.scale) == std::round(std::log2(w.scale)));

  // Bounded limit: ±1 plaquettes rescaled to the local-rules amplitude.
  const auto b = gen_synthetic_stream(2, 16, 1, std::numeric_limits<double>::infinity(), true);
  CHECK(b.stream.max_abs() == 0.5);
  for (double v : b.env.drift()) CHECK((v == 0.0 || std::abs(v) == 1.0));
}

TEST_CASE("generation is deterministic in the seed") {
  for (Model m : {Model::LocalRules, Model::Manhattan, Model::SixVertex, Model::SyntheticStream}) {
    GeneratorConfig c;
    c.model = m;
    c.side = 8;
    c.seed = 99;
    c.sweeps = 20;
    const auto a = generate(c), b = generate(c);
    for (std::size_t i = 0; i < a.env.drift().size(); ++i) CHECK(a.env.drift()[i] == b.env.drift()[i]);
    c.seed = 100;
    const auto other = generate(c);
    bool differs = false;
    for (std::size_t i = 0; i < a.env.drift().size(); ++i) differs = differs || a.env.drift()[i] != other.env.drift()[i];
    CHECK(differs);
  }
}
