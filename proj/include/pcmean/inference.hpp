#ifndef PCMEAN_INFERENCE_HPP
#define PCMEAN_INFERENCE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pcmean/fit.hpp"
#include "pcmean/types.hpp"

namespace pcm {

enum class Method { Mple, Mle };

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule for integrals over [0, 1] (Golub-Welsch).
QuadratureRule gauss_legendre_01(int n);

/// Gauss-Hermite rule normalized for expectations under N(0, 1):
/// E f(N) ~ sum_k weights[k] * f(nodes[k]).
QuadratureRule gauss_hermite_normal(int n);

/// W  = E{ e^{b'Z} (Z - m)(Z - m)' } with m = E(Z e^{b'Z}) / E(e^{b'Z}),
/// and with e^{2 b'Z} in place of e^{b'Z} when tilde is set (same m).
/// Z = (Unif(0,1), N(0,1), Bernoulli(0.5)) independent; the expectation is a
/// deterministic product quadrature (Legendre x Hermite x two-point).
Eigen::MatrixXd covariance_W(const Eigen::VectorXd& beta0, bool tilde,
                             int legendre_nodes = 40, int hermite_nodes = 40);

struct ScenarioCov {
  Eigen::MatrixXd sigma_ps;
  Eigen::MatrixXd sigma;
};

/// Asymptotic covariances of the two estimators under the conditional
/// Poisson scheme: Sigma_ps = (1582/17787) W^-1, Sigma = (1260/19179) W^-1.
ScenarioCov scenario1_cov(const Eigen::VectorXd& beta0, int legendre_nodes = 40,
                          int hermite_nodes = 40);

/// Mixed-Poisson scheme: adds the frailty terms
///   Sigma_ps = (1582/17787) W^-1 + (463.12/17787) W^-1 Wt W^-1,
///   Sigma    = (1260/19179) W^-1 + (7917588/19179^2) W^-1 Wt W^-1.
ScenarioCov scenario2_cov(const Eigen::VectorXd& beta0, int legendre_nodes = 40,
                          int hermite_nodes = 40);

struct BootstrapResult {
  Eigen::VectorXd se;
  Eigen::MatrixXd cov;        // sample covariance of converged replicate betas
  Eigen::MatrixXd replicates; // one converged replicate beta per row
  int failed = 0;
};

/// Nonparametric bootstrap: resamples whole subjects with replacement B
/// times, refits, and returns the sample covariance of the converged
/// replicate estimates. More than 20% failed replicates is an error.
/// Replicate b draws its indices from stream (seed, b), so results are
/// bitwise reproducible for fixed (data, method, B, seed).
BootstrapResult bootstrap_se(const Dataset& data, Method method, int B, std::uint64_t seed,
                             const FitConfig& cfg = {}, int threads = 0);

struct WaldRow {
  double estimate;
  double se;
  double zstat;  // estimate / se
  double pvalue; // two-sided normal
};

std::vector<WaldRow> wald_test(const Eigen::VectorXd& estimates, const Eigen::VectorXd& se);

}  // namespace pcm

#endif
