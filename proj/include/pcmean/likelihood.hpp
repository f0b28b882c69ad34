#ifndef PCMEAN_LIKELIHOOD_HPP
#define PCMEAN_LIKELIHOOD_HPP

#include <Eigen/Core>

#include "pcmean/types.hpp"

namespace pcm {

// Both criteria use the convention 0*log(0) = 0 and return -infinity when a
// positive count meets a zero mean (or mean increment), so optimizers can
// reject infeasible points without throwing.

/// Marginal-Poisson criterion: sum over observations of
///   N log Lambda(t) + N beta'z - exp(beta'z) Lambda(t).
double loglik_pseudo(const Eigen::VectorXd& beta, const MonotoneStepFunction& lambda,
                     const Dataset& data);

/// Independent-increments criterion: sum over consecutive observation gaps of
///   dN log dLambda + dN beta'z - exp(beta'z) dLambda,  with Lambda(0) = 0.
double loglik_full(const Eigen::VectorXd& beta, const MonotoneStepFunction& lambda,
                   const Dataset& data);

/// Empirical L2 distance on (beta, Lambda): euclidean gap in beta plus the
/// mean squared gap of Lambda over all observation times, square-rooted.
double metric_d1(const Theta& theta_hat, const Theta& theta0, const Dataset& data);

/// Same with Lambda increments over consecutive observation gaps.
double metric_d2(const Theta& theta_hat, const Theta& theta0, const Dataset& data);

}  // namespace pcm

#endif
