#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dfrw {

using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

struct GmresOptions {
  double tol = 1e-10;          // relative to ||rhs||
  std::size_t restart = 60;
  std::size_t max_iterations = 20000;
};

struct GmresResult {
  std::vector<double> x;
  double relative_residual = 0.0;  // true residual ||b - Ax|| / ||b||
  std::size_t iterations = 0;
  bool converged = false;
};

/// Restarted GMRES with right preconditioning, A M^{-1} y = b, x = M^{-1} y,
/// so the monitored residual is the unpreconditioned one. The returned x is
/// the best iterate seen.
GmresResult gmres(const LinearMap& op, const LinearMap& precond, std::span<const double> rhs,
                  const GmresOptions& options = {});

}  // namespace dfrw
