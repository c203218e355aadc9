#include "dfrw/krylov.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace dfrw {

namespace {

using Vec = Eigen::VectorXd;

Vec apply_map(const LinearMap& op, const Vec& v) {
  Vec out = Vec::Zero(v.size());
  op(std::span<const double>(v.data(), v.size()), std::span<double>(out.data(), out.size()));
  return out;
}

}  // namespace

GmresResult gmres(const LinearMap& op, const LinearMap& precond, std::span<const double> rhs,
                  const GmresOptions& options) {
  const auto n = static_cast<Eigen::Index>(rhs.size());
  const Vec b = Eigen::Map<const Vec>(rhs.data(), n);
  GmresResult result;
  result.x.assign(rhs.size(), 0.0);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    result.converged = true;
    return result;
  }

  const auto m = static_cast<Eigen::Index>(std::max<std::size_t>(1, options.restart));
  Vec x = Vec::Zero(n);
  Vec best = x;
  double best_res = 1.0;
  std::size_t iterations = 0;

  while (iterations < options.max_iterations) {
    const Vec r = b - apply_map(op, x);
    const double beta = r.norm();
    if (beta / bnorm < best_res) {
      best_res = beta / bnorm;
      best = x;
    }
    if (beta / bnorm <= options.tol) break;

    Eigen::MatrixXd V(n, m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Vec cs = Vec::Zero(m), sn = Vec::Zero(m), g = Vec::Zero(m + 1);
    V.col(0) = r / beta;
    g(0) = beta;
    Eigen::Index j = 0;
    for (; j < m && iterations < options.max_iterations; ++j) {
      ++iterations;
      Vec w = apply_map(op, apply_map(precond, V.col(j)));
      // Modified Gram-Schmidt with one reorthogonalization pass.
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i <= j; ++i) {
          const double h = V.col(i).dot(w);
          H(i, j) += h;
          w -= h * V.col(i);
        }
      }
      H(j + 1, j) = w.norm();
      const bool breakdown = H(j + 1, j) <= 1e-300;
      if (!breakdown) V.col(j + 1) = w / H(j + 1, j);
      for (Eigen::Index i = 0; i < j; ++i) {
        const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
        H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs(j) = denom == 0.0 ? 1.0 : H(j, j) / denom;
      sn(j) = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      if (std::abs(g(j + 1)) / bnorm <= options.tol * 0.5 || breakdown) {
        ++j;
        break;
      }
    }
    const Vec y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    x += apply_map(precond, V.leftCols(j) * y);
  }

  const double final_res = (b - apply_map(op, x)).norm() / bnorm;
  if (final_res < best_res) {
    best_res = final_res;
    best = x;
  }
  result.x.assign(best.data(), best.data() + n);
  result.relative_residual = best_res;
  result.iterations = iterations;
  result.converged = best_res <= options.tol;
  return result;
}

}  // namespace dfrw
