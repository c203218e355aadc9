#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dfrw/error.hpp"
#include "dfrw/generators.hpp"
#include "dfrw/walk.hpp"

using namespace dfrw;

TEST_CASE("sample grids") {
  const auto g = sample_grid(1.0, 1000.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(g.back() == 1000.0);
  const auto u = sample_grid(2.0, 10.0, 5, false);
  CHECK(u.front() == doctest::Approx(2.0));
  CHECK(u.back() == 10.0);
}

TEST_CASE("a walk never uses a zero-rate edge") {
  const auto env = gen_manhattan(2, 8, 1);
  Rng rng = make_rng(2);
  WalkOptions opt;
  opt.t_max = 200.0;
  opt.sample_times = sample_grid(0.1, 200.0, 2000, false);
  const auto tr = simulate_walk(env, opt, rng);
  // Positions are displacements from an unknown start site; some start must
  // make every observed unit step a positive-rate edge.
  const Torus& t = env.torus();
  std::size_t consistent = 0;
  for (std::size_t s0 = 0; s0 < t.sites(); ++s0) {
    const Coords o = t.coords(s0);
    bool ok = true;
    std::size_t steps = 0;
    for (std::size_t i = 1; ok && i < tr.times.size(); ++i) {
      Coords a{}, b{};
      int dist = 0, dir = -1;
      for (int k = 0; k < 2; ++k) {
        a[k] = o[k] + tr.position(i - 1, k);
        b[k] = o[k] + tr.position(i, k);
        dist += static_cast<int>(std::abs(b[k] - a[k]));
        if (b[k] != a[k]) dir = 2 * k + (b[k] < a[k] ? 1 : 0);
      }
      if (dist != 1) continue;
      ++steps;
      ok = env.rate(t.index(a), dir) > 0.0;
    }
    if (ok && steps > 0) ++consistent;
  }
  CHECK(consistent > 0);
  CHECK(consistent < t.sites());
}

TEST_CASE("jump counts are Poisson(2d t)") {
  const auto env = TorusEnv::zero(Torus(3, 4));
  double sum = 0.0, sum2 = 0.0;
  const int n = 4000;
  WalkOptions opt;
  opt.t_max = 5.0;
  opt.sample_times = {5.0};
  for (int i = 0; i < n; ++i) {
    Rng rng = make_rng(3, i);
    const auto tr = simulate_walk(env, opt, rng);
    const double j = static_cast<double>(tr.jumps.back());
    sum += j;
    sum2 += j * j;
  }
  const double mean = sum / n, var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - 30.0) < 4.0 * std::sqrt(30.0 / n));
  CHECK(var == doctest::Approx(30.0).epsilon(0.1));
}

TEST_CASE("compensator equals the drift integral on a constant-drift torus") {
  // Manhattan with all lines positive: φ = (2, 2), deterministic I(t) = 2t.
  const Torus t(2, 4);
  const TorusEnv env = manhattan_from_orientations(t, std::vector<std::vector<int>>(2, std::vector<int>(4, 1)));
  Rng rng = make_rng(4);
  WalkOptions opt;
  opt.t_max = 10.0;
  opt.sample_times = {1.0, 10.0};
  opt.record_holding_times = true;
  const auto tr = simulate_walk(env, opt, rng);
  CHECK(tr.integral(2, 0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(tr.integral(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tr.holding_times.size() >= tr.jumps.back());
  for (int a = 0; a < 2; ++a) CHECK(tr.position(2, a) >= 0);
}

TEST_CASE("fast and compensator modes agree in law") {
  const auto s = gen_local_rules(2, 8, 5);
  const std::vector<TorusEnv> envs{s.env};
  EnsembleOptions opt;
  opt.walkers = 4000;
  opt.t_max = 50.0;
  opt.sample_times = sample_grid(1.0, 50.0, 5);
  opt.seed = 6;
  const auto slow = run_ensemble(envs, opt);
  opt.track_compensator = false;
  opt.seed = 7;
  const auto fast = run_ensemble(envs, opt);
  const auto& a = slow.rows.back();
  const auto& b = fast.rows.back();
  const double ta = a.cov.trace(), tb = b.cov.trace();
  CHECK(std::abs(ta - tb) < 0.1 * ta);
  CHECK(slow.has_compensator);
  CHECK_FALSE(fast.has_compensator);
}

TEST_CASE("ensemble output is independent of the thread count") {
  const auto s = gen_local_rules(2, 8, 8);
  const std::vector<TorusEnv> envs{s.env, gen_local_rules(2, 8, 9).env};
  EnsembleOptions opt;
  opt.walkers = 300;
  opt.t_max = 20.0;
  opt.sample_times = sample_grid(1.0, 20.0, 4);
  opt.seed = 10;
  opt.keep_endpoints = true;
  opt.pooling = Pooling::Quenched;
  opt.threads = 1;
  const auto one = run_ensemble(envs, opt);
  opt.threads = 4;
  const auto four = run_ensemble(envs, opt);
  CHECK(one.endpoints == four.endpoints);
  CHECK(one.environments == 2);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK((one.rows[i].cov - four.rows[i].cov).norm() == 0.0);
    CHECK((one.rows[i].cov_y - four.rows[i].cov_y).norm() == 0.0);
  }
}

TEST_CASE("zero drift: variance is 2t per axis and the martingale check passes") {
  const std::vector<TorusEnv> envs{TorusEnv::zero(Torus(2, 16))};
  EnsembleOptions opt;
  opt.walkers = 5000;
  opt.t_max = 100.0;
  opt.sample_times = sample_grid(1.0, 100.0, 10);
  opt.seed = 11;
  const auto stats = run_ensemble(envs, opt);
  const auto& last = stats.rows.back();
  CHECK(last.cov(0, 0) / 100.0 == doctest::Approx(2.0).epsilon(0.08));
  CHECK(last.cov(1, 1) / 100.0 == doctest::Approx(2.0).epsilon(0.08));
  const auto m = martingale_check(stats);
  CHECK(m.mean_zero);
  CHECK(m.linear);
}

TEST_CASE("invalid ensemble options") {
  const std::vector<TorusEnv> envs{TorusEnv::zero(Torus(2, 4))};
  EnsembleOptions opt;
  opt.walkers = 0;
  CHECK_THROWS_AS(run_ensemble(envs, opt), ValidationError);
  opt.walkers = 3;
  opt.pooling = Pooling::Quenched;
  opt.sample_times = {1.0};
  opt.t_max = 1.0;
  CHECK_THROWS_AS(run_ensemble(std::vector<TorusEnv>{envs[0], envs[0], envs[0], envs[0]}, opt), ValidationError);
  CHECK_THROWS_AS(run_ensemble({}, opt), ValidationError);
}
