#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dfrw/env.hpp"
#include "dfrw/krylov.hpp"
#include "dfrw/walk.hpp"

namespace dfrw {

enum class SigmaMethod { CellExact, ResolventScan, MonteCarlo };
std::string method_name(SigmaMethod method);

struct DiffusivityEstimate {
  SigmaMethod method = SigmaMethod::CellExact;
  Eigen::MatrixXd sigma2;
  Eigen::VectorXd mean_drift;    // v, site mean of φ (or fitted velocity for Monte Carlo)
  double parameter = 0.0;        // solver tolerance, or smallest λ for a scan
  std::optional<Eigen::MatrixXd> stderr;
  bool withheld = false;         // Monte Carlo: fit flagged as non-diffusive
  std::string note;
};

struct ResolventSolve {
  double lambda = 0.0;
  std::vector<ScalarField> chi;  // one per drift component
  double residual = 0.0;         // max over components of ||(λ - L)χ - φ̃|| / ||φ̃||
  std::size_t iterations = 0;
  bool converged = false;
};

/// Solves (λ - L)χ_a = φ̃_a with φ̃ the site-centered drift, matrix-free by
/// GMRES right-preconditioned with (λ + S)^{-1}. λ = 0 is accepted and solves
/// on mean-zero fields. Non-convergence is reported, not thrown.
ResolventSolve solve_resolvent(const TorusEnv& env, double lambda, double tol, GmresOptions options = {});

struct ScanRow {
  double lambda = 0.0;
  Eigen::MatrixXd m;          // symmetrized <φ̃_a, χ_b>
  double lam_norm2 = 0.0;     // λ sum_a ||χ_a||²
  double dirichlet = 0.0;     // sum_a ||S^{1/2} χ_a||²
  double residual = 0.0;
  std::size_t iterations = 0;
};

struct ResolventScan {
  DiffusivityEstimate estimate;   // withheld when m(λ) is non-monotone
  std::vector<ScanRow> rows;
  bool monotone = true;           // tr m(λ) non-decreasing as λ decreases
  double decrease_ratio = 0.0;    // lam_norm2(first) / lam_norm2(last)
  bool lam_norm_decreasing = false;
  /// λ‖χ‖² monotonically non-increasing along the scan and dropping by >= 10×.
  bool h1_signal_ok() const { return lam_norm_decreasing && decrease_ratio >= 10.0; }
};

/// σ² = 2I + 2 m(0), m(0) extrapolated linearly in λ from the last three scan points.
ResolventScan sigma_resolvent_scan(const TorusEnv& env, const std::vector<double>& lambdas, double tol);

/// Periodic-cell oracle: solves Lχ_a = -φ̃_a on mean-zero fields and returns
/// σ²_ab = L^{-d} sum_x sum_k p_k(x) w_a w_b with w = k + χ(x+k) - χ(x).
/// Throws NumericalError when the torus chain is reducible or the solve fails.
DiffusivityEstimate sigma_cell_exact(const TorusEnv& env, double tol = 1e-12);

/// True when every site can reach every other along positive-rate edges.
bool is_irreducible(const TorusEnv& env);

struct MonteCarloFitOptions {
  double t_min = 0.0;  // fit window; default uses the upper decade of sample times
  double t_max = 0.0;
};

/// σ² as the least-squares slope of Cov(X(t)) against t; stderr from batch
/// slopes. Flags (and withholds) fits whose slope grows across the window.
DiffusivityEstimate sigma_monte_carlo(const WalkEnsembleStats& stats, MonteCarloFitOptions options = {});

}  // namespace dfrw
