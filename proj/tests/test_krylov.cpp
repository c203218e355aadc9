#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include "dfrw/krylov.hpp"
#include "dfrw/rng.hpp"

using namespace dfrw;

namespace {

LinearMap dense(const Eigen::MatrixXd& m) {
  return [m](std::span<const double> in, std::span<double> out) {
    Eigen::Map<Eigen::VectorXd>(out.data(), out.size()) =
        m * Eigen::Map<const Eigen::VectorXd>(in.data(), in.size());
  };
}

const LinearMap identity = [](std::span<const double> in, std::span<double> out) {
  std::copy(in.begin(), in.end(), out.begin());
};

}  // namespace

TEST_CASE("nonsymmetric dense system") {
  const int n = 80;
  Rng rng = make_rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng) / std::sqrt(n);
  a += 3.0 * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = g(rng);
  const auto r = gmres(dense(a), identity, std::span<const double>(b.data(), n), {1e-12, 20, 5000});
  CHECK(r.converged);
  CHECK(r.relative_residual <= 1e-12);
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.x.data(), n);
  CHECK((x - a.partialPivLu().solve(b)).norm() < 1e-9 * x.norm());
}

TEST_CASE("right preconditioning by the exact inverse converges in one step") {
  const int n = 30;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) * 2.0;
  for (int i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = 1.0;
    a(i + 1, i) = -0.7;
  }
  const Eigen::MatrixXd inv = a.inverse();
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  const auto r = gmres(dense(a), dense(inv), std::span<const double>(b.data(), n));
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
}

TEST_CASE("zero right-hand side and non-convergence") {
  const int n = 10;
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const auto r0 = gmres(dense(Eigen::MatrixXd::Identity(n, n)), identity, std::span<const double>(zero.data(), n));
  CHECK(r0.converged);
  for (double v : r0.x) CHECK(v == 0.0);

  // Cyclic shift: GMRES(1) stagnates.
  Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) shift((i + 1) % n, i) = 1.0;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(0) = 1.0;
  const auto r = gmres(dense(shift), identity, std::span<const double>(e.data(), n), {1e-12, 1, 50});
  CHECK_FALSE(r.converged);
  CHECK(r.relative_residual == doctest::Approx(1.0));
}
