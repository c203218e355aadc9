#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dfrw/env.hpp"
#include "dfrw/env_io.hpp"
#include "dfrw/error.hpp"
#include "dfrw/generators.hpp"

using namespace dfrw;

namespace {
std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dfrw_test_env_" + name);
}
}  // namespace

TEST_CASE("zero environment validates") {
  const auto r = validate_env(TorusEnv::zero(Torus(2, 4)));
  CHECK(r.passed);
  CHECK(r.max_antisymmetry == 0.0);
}

TEST_CASE("structural size mismatch is rejected") {
  CHECK_THROWS_AS(TorusEnv(Torus(2, 4), std::vector<double>(10)), ValidationError);
  CHECK_THROWS_AS(StreamTensor(Torus(2, 4), std::vector<double>(10)), ValidationError);
}

TEST_CASE("validation reports corruption") {
  const Torus t(2, 4);
  std::vector<double> b(t.sites() * 4, 0.0);
  b[0] = 0.5;  // breaks antisymmetry and divergence at site 0
  const auto r = validate_env(TorusEnv(t, b));
  CHECK_FALSE(r.passed);
  CHECK(r.max_antisymmetry == doctest::Approx(0.5));
  CHECK(r.max_divergence == doctest::Approx(0.5));
  b[0] = 1.5;
  CHECK(validate_env(TorusEnv(t, b)).range_violations == 1);
}

TEST_CASE("stream tensor from plaquettes satisfies all symmetries") {
  for (int d = 2; d <= 4; ++d) {
    const auto s = gen_synthetic_stream(d, 4, 3, 3.0, false);
    const StreamReport r = validate_stream(s.stream);
    CHECK(r.passed(0.0));
    const Torus& t = s.stream.torus();
    for (std::size_t x = 0; x < t.sites(); ++x) {
      for (int k = 0; k < t.directions(); ++k) {
        CHECK(s.stream.h(x, k, k) == 0.0);
        CHECK(s.stream.h(x, k, opposite(k)) == 0.0);
      }
    }
  }
}

TEST_CASE("both curl forms agree and are divergence-free") {
  const auto s = gen_local_rules(3, 4, 11);
  const VectorField a = curl_of_stream(s.stream);
  const VectorField b = curl_of_stream_plain(s.stream);
  for (std::size_t i = 0; i < a.values().size(); ++i) CHECK(a.values()[i] == doctest::Approx(b.values()[i]));
  CHECK(validate_env(TorusEnv(a)).passed);
}

TEST_CASE("curl rejects a tensor with broken symmetries") {
  const Torus t(2, 4);
  std::vector<double> h(t.sites() * 16, 0.0);
  h[1] = 1.0;  // h_{+0,-0}(0) without partners
  CHECK_THROWS_AS(curl_of_stream(StreamTensor(t, h)), ValidationError);
}

TEST_CASE("truncation keeps the symmetries") {
  const auto s = gen_synthetic_stream(2, 8, 5, 2.5, false);
  for (double K : {0.5, 1.0, 2.0, 4.0, 1e9}) {
    const StreamTensor tk = s.stream.truncated(K);
    CHECK(validate_stream(tk).passed(0.0));
    CHECK(tk.max_abs() <= K);
  }
  CHECK(s.stream.truncated(s.stream.max_abs()).max_abs() == s.stream.max_abs());
}

TEST_CASE("drift function") {
  const Torus t(2, 4);
  std::vector<std::vector<int>> up(2, std::vector<int>(4, 1));
  const TorusEnv env = manhattan_from_orientations(t, up);
  const auto v = mean_drift(env);
  CHECK(v[0] == 2.0);
  CHECK(v[1] == 2.0);
}

TEST_CASE("environment snapshot round trip") {
  const auto s = gen_local_rules(3, 4, 9);
  const auto p = tmp("env.bin");
  write_env(p, s.env);
  const TorusEnv back = read_env(p);
  CHECK(back.torus() == s.env.torus());
  CHECK(back.meta().generator == "local_rules");
  CHECK(back.meta().seed == 9);
  for (std::size_t i = 0; i < back.drift().size(); ++i) CHECK(back.drift()[i] == s.env.drift()[i]);
  // 5 magic + 1 + 4 + 1 + 11 name + 8 seed + payload
  CHECK(std::filesystem::file_size(p) == 30 + 8 * s.env.drift().size());

  std::ifstream in(p, std::ios::binary);
  char head[6] = {};
  in.read(head, 5);
  CHECK(std::string(head) == "DFRW1");
  std::filesystem::remove(p);
}

TEST_CASE("stream snapshot round trip stores only k < l") {
  const auto s = gen_synthetic_stream(2, 4, 2, 2.5, false);
  const auto p = tmp("stream.bin");
  write_stream(p, s.stream, {"synthetic_stream", 2});
  EnvMeta meta;
  const StreamTensor back = read_stream(p, &meta);
  CHECK(meta.seed == 2);
  for (std::size_t i = 0; i < back.values().size(); ++i) CHECK(back.values()[i] == s.stream.values()[i]);
  // 4 directions: 6 pairs k < l per site.
  CHECK(std::filesystem::file_size(p) == 35 + 8 * 6 * 16);
  std::filesystem::remove(p);
}

TEST_CASE("malformed snapshots are rejected") {
  const auto p = tmp("bad.bin");
  {
    std::ofstream out(p, std::ios::binary);
    out << "NOPE!xxxxxxxx";
  }
  CHECK_THROWS_AS(read_env(p), IoError);
  const auto s = gen_local_rules(2, 4, 1);
  write_env(p, s.env);
  {
    std::ofstream out(p, std::ios::binary | std::ios::app);
    out << 'x';
  }
  CHECK_THROWS_AS(read_env(p), IoError);
  std::filesystem::resize_file(p, 40);
  CHECK_THROWS_AS(read_env(p), IoError);
  CHECK_THROWS_AS(read_env(tmp("missing.bin")), IoError);
  std::filesystem::remove(p);
}
