#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "dfrw/diffusivity.hpp"
#include "dfrw/error.hpp"
#include "dfrw/generators.hpp"

using namespace dfrw;

namespace {

// Dense oracle: solve L χ = -φ̃ with a pseudo-inverse and evaluate the flux formula.
Eigen::MatrixXd dense_cell(const TorusEnv& env) {
  const Torus& t = env.torus();
  const auto n = static_cast<Eigen::Index>(t.sites());
  const int d = t.dim();
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t x = 0; x < t.sites(); ++x)
    for (int k = 0; k < 2 * d; ++k) {
      gen(x, t.neighbor(x, k)) += env.rate(x, k);
      gen(x, x) -= env.rate(x, k);
    }
  const Eigen::MatrixXd pinv = gen.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::MatrixXd chi(n, d);
  for (int a = 0; a < d; ++a) {
    Eigen::VectorXd phi(n);
    for (std::size_t x = 0; x < t.sites(); ++x) phi(x) = env.b(x, 2 * a) - env.b(x, 2 * a + 1);
    phi.array() -= phi.mean();
    chi.col(a) = -pinv * phi;
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t x = 0; x < t.sites(); ++x)
    for (int k = 0; k < 2 * d; ++k) {
      const auto y = t.neighbor(x, k);
      Eigen::VectorXd w = chi.row(y) - chi.row(x);
      w(k / 2) += (k % 2 == 0) ? 1.0 : -1.0;
      s += env.rate(x, k) * w * w.transpose();
    }
  return s / static_cast<double>(n);
}

}  // namespace

TEST_CASE("zero drift gives 2I") {
  const auto est = sigma_cell_exact(TorusEnv::zero(Torus(3, 4)));
  CHECK((est.sigma2 - 2.0 * Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("matrix-free cell solve matches a dense oracle") {
  for (int d : {2, 3}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto env = gen_local_rules(d, 4, seed).env;
      const auto est = sigma_cell_exact(env);
      const Eigen::MatrixXd ref = dense_cell(env);
      INFO("d=" << d << " seed=" << seed);
      CHECK((est.sigma2 - ref).norm() < 1e-8 * ref.norm());
      CHECK((est.sigma2 - est.sigma2.transpose()).norm() < 1e-12);
      // enhancement: σ² ≥ 2I
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(est.sigma2 - 2.0 * Eigen::MatrixXd::Identity(d, d));
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
  }
}

TEST_CASE("resolvent scan approaches the cell value") {
  const auto env = gen_local_rules(2, 8, 4).env;
  const auto cell = sigma_cell_exact(env);
  const auto scan = sigma_resolvent_scan(env, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}, 1e-12);
  CHECK(scan.monotone);
  CHECK(scan.rows.size() == 5);
  CHECK(scan.rows.front().lambda == 1e-1);
  CHECK((scan.estimate.sigma2 - cell.sigma2).norm() < 1e-3 * cell.sigma2.norm());
  CHECK(scan.h1_signal_ok());
  for (const auto& r : scan.rows) CHECK(r.residual <= 1e-10);
}

TEST_CASE("irreducibility") {
  const Torus t(2, 4);
  CHECK(is_irreducible(TorusEnv::zero(t)));
  CHECK(is_irreducible(gen_manhattan(2, 8, 1)));
  // All axis-0 rates in the + direction switched off and - direction doubled:
  // divergence-free but the walk cannot move forward along axis 0.
  std::vector<double> drift(t.sites() * 4, 0.0);
  for (std::size_t x = 0; x < t.sites(); ++x) {
    drift[x * 4 + 0] = -1.0;
    drift[x * 4 + 1] = 1.0;
  }
  const TorusEnv one_way(t, drift);
  CHECK(is_irreducible(one_way));
  // A site with every exit closed.
  std::vector<double> trap(t.sites() * 4, 0.0);
  for (int k = 0; k < 4; ++k) trap[k] = -1.0;
  CHECK_FALSE(is_irreducible(TorusEnv(t, trap)));
  CHECK_THROWS_AS(sigma_cell_exact(TorusEnv(t, trap)), NumericalError);
}

TEST_CASE("Monte Carlo fit on zero drift") {
  const std::vector<TorusEnv> envs{TorusEnv::zero(Torus(2, 16))};
  EnsembleOptions opt;
  opt.walkers = 4000;
  opt.t_max = 200.0;
  opt.sample_times = sample_grid(1.0, 200.0, 12);
  opt.seed = 5;
  const auto stats = run_ensemble(envs, opt);
  const auto est = sigma_monte_carlo(stats);
  REQUIRE(est.stderr.has_value());
  CHECK_FALSE(est.withheld);
  for (int a = 0; a < 2; ++a) CHECK(std::abs(est.sigma2(a, a) - 2.0) < 4.0 * (*est.stderr)(a, a) + 1e-3);
}
