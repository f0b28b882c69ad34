#ifndef PCMEAN_FIT_HPP
#define PCMEAN_FIT_HPP

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "pcmean/types.hpp"

namespace pcm {

enum class Criterion { Pseudo, Full };

struct FitConfig {
  double eta = 1e-10;        // relative-change convergence tolerance
  int max_outer = 500;       // cap on outer alternations
  int max_inner = 2000;      // cap on ICM / Newton inner iterations
  double beta_box = 10.0;    // admissible region |beta|_inf <= beta_box
  double delta_floor = 1e-10; // smallest mean increment kept where dN > 0

  // When set, beta is held fixed and only the baseline mean is fitted
  // (covariate-degenerate contract; skips the identifiability check).
  std::optional<Eigen::VectorXd> fixed_beta;

  // Looser tolerance for repeated fits in simulation studies.
  static FitConfig monte_carlo() {
    FitConfig cfg;
    cfg.eta = 1e-6;
    return cfg;
  }
};

struct FitResult {
  Eigen::VectorXd beta;
  MonotoneStepFunction lambda;
  double loglik = 0.0;
  int outer_iters = 0;
  bool converged = false;
  std::vector<double> trace; // criterion value at start and after each outer sweep
};

/// Maximizes the chosen criterion over beta for a fixed baseline mean by
/// damped Newton steps (the criterion is concave in beta with negative
/// definite Hessian). Stops when the executed step has inf-norm <= cfg.eta.
Eigen::VectorXd newton_beta(const MonotoneStepFunction& lambda, const Dataset& data,
                            Eigen::VectorXd beta_init, const FitConfig& cfg,
                            Criterion criterion);

/// Maximizes the full criterion over nondecreasing step functions with jumps
/// on data.grid() for fixed beta: iterative convex minorant steps (isotonic
/// projection of a diagonally scaled gradient step) with a halving line
/// search that enforces ascent. lambda_init must give a finite criterion.
MonotoneStepFunction icm_lambda(const Eigen::VectorXd& beta, const Dataset& data,
                                const MonotoneStepFunction& lambda_init,
                                const FitConfig& cfg);

/// Strictly increasing starting value for the full-likelihood iteration:
/// piecewise-linear interpolation of pseudo_lambda between its jump points,
/// evaluated on data.grid() and floored so consecutive values differ by at
/// least delta_floor.
MonotoneStepFunction warm_start_lambda(const MonotoneStepFunction& pseudo_lambda,
                                       const Dataset& data, double delta_floor);

/// Maximum pseudo-likelihood estimator: alternates the closed-form profile
/// step for the baseline mean with Newton steps for beta until the relative
/// change of the criterion is <= cfg.eta.
FitResult fit_mple(const Dataset& data, const Eigen::VectorXd& beta_init,
                   const FitConfig& cfg = {});

/// Maximum likelihood estimator: starts from the pseudo-likelihood fit
/// (beta warm start plus interpolated baseline mean) and alternates
/// icm_lambda with newton_beta on the full criterion.
FitResult fit_mle(const Dataset& data, const FitConfig& cfg = {});

/// Same, reusing an already computed pseudo-likelihood fit as the warm start.
FitResult fit_mle_from(const Dataset& data, const FitResult& mple, const FitConfig& cfg = {});

}  // namespace pcm

#endif
