#include "pcmean/inference.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "pcmean/random.hpp"
#include "parallel.hpp"

namespace pcm {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights are
// mu0 times the squared first components of the normalized eigenvectors.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n - 1; ++k) {
    jacobi(k, k + 1) = offdiag[k];
    jacobi(k + 1, k) = offdiag[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  QuadratureRule rule = golub_welsch(off, 2.0);
  rule.nodes = (rule.nodes.array() + 1.0) / 2.0;
  rule.weights /= 2.0;
  return rule;
}

QuadratureRule gauss_hermite_normal(int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k / 2.0);
  QuadratureRule rule = golub_welsch(off, std::sqrt(M_PI));
  rule.nodes *= std::sqrt(2.0);
  rule.weights /= std::sqrt(M_PI);
  return rule;
}

Eigen::MatrixXd covariance_W(const Eigen::VectorXd& beta0, bool tilde, int legendre_nodes,
                             int hermite_nodes) {
  if (beta0.size() != 3)
    throw std::invalid_argument("covariance_W is defined for the 3-covariate scenario law");
  const QuadratureRule gl = gauss_legendre_01(legendre_nodes);
  const QuadratureRule gh = gauss_hermite_normal(hermite_nodes);

  double e1 = 0.0;
  Eigen::Vector3d ez = Eigen::Vector3d::Zero();
  Eigen::Vector3d z;
  for (int a = 0; a < gl.nodes.size(); ++a)
    for (int b = 0; b < gh.nodes.size(); ++b)
      for (int c = 0; c < 2; ++c) {
        z << gl.nodes[a], gh.nodes[b], static_cast<double>(c);
        const double wt = gl.weights[a] * gh.weights[b] * 0.5;
        const double g = wt * std::exp(beta0.dot(z));
        e1 += g;
        ez += g * z;
      }
  const Eigen::Vector3d center = ez / e1;

  const double scale = tilde ? 2.0 : 1.0;
  Eigen::Matrix3d w = Eigen::Matrix3d::Zero();
  for (int a = 0; a < gl.nodes.size(); ++a)
    for (int b = 0; b < gh.nodes.size(); ++b)
      for (int c = 0; c < 2; ++c) {
        z << gl.nodes[a], gh.nodes[b], static_cast<double>(c);
        const double wt = gl.weights[a] * gh.weights[b] * 0.5;
        const Eigen::Vector3d dev = z - center;
        w.noalias() += wt * std::exp(scale * beta0.dot(z)) * dev * dev.transpose();
      }
  return 0.5 * (w + w.transpose());
}

namespace {

Eigen::MatrixXd invert_spd(const Eigen::MatrixXd& w) {
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success) throw NumericalError("W matrix is singular");
  return llt.solve(Eigen::MatrixXd::Identity(w.rows(), w.cols()));
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

ScenarioCov scenario1_cov(const Eigen::VectorXd& beta0, int legendre_nodes, int hermite_nodes) {
  const Eigen::MatrixXd winv =
      invert_spd(covariance_W(beta0, false, legendre_nodes, hermite_nodes));
  ScenarioCov out;
  out.sigma_ps = symmetrize((1582.0 / 17787.0) * winv);
  out.sigma = symmetrize((1260.0 / 19179.0) * winv);
  return out;
}

ScenarioCov scenario2_cov(const Eigen::VectorXd& beta0, int legendre_nodes, int hermite_nodes) {
  const Eigen::MatrixXd winv =
      invert_spd(covariance_W(beta0, false, legendre_nodes, hermite_nodes));
  const Eigen::MatrixXd wt = covariance_W(beta0, true, legendre_nodes, hermite_nodes);
  const Eigen::MatrixXd mixed = symmetrize(winv * wt * winv.transpose());
  ScenarioCov out;
  out.sigma_ps = symmetrize((1582.0 / 17787.0) * winv + (463.12 / 17787.0) * mixed);
  out.sigma =
      symmetrize((1260.0 / 19179.0) * winv + (7917588.0 / (19179.0 * 19179.0)) * mixed);
  return out;
}

BootstrapResult bootstrap_se(const Dataset& data, Method method, int B, std::uint64_t seed,
                             const FitConfig& cfg, int threads) {
  if (B < 2) throw std::invalid_argument("bootstrap requires B >= 2");
  const Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(data.d());

  // The point estimate must exist before resampling; errors propagate.
  const FitResult point =
      method == Method::Mple ? fit_mple(data, beta0, cfg) : fit_mle(data, cfg);
  if (!point.converged) throw InferenceError("point estimate did not converge");

  const int n = data.n();
  std::vector<std::optional<Eigen::VectorXd>> reps(B);
  detail::parallel_for(B, threads, [&](int b) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(b));
    std::vector<Subject> resampled;
    resampled.reserve(n);
    for (int i = 0; i < n; ++i) resampled.push_back(data.subjects()[rng.uniform_int(0, n - 1)]);
    try {
      const Dataset boot(std::move(resampled));
      const FitResult fit =
          method == Method::Mple ? fit_mple(boot, beta0, cfg) : fit_mle(boot, cfg);
      if (fit.converged) reps[b] = fit.beta;
    } catch (const std::exception&) {
      // counted as a failed replicate
    }
  });

  BootstrapResult out;
  for (const auto& r : reps)
    if (!r) ++out.failed;
  if (out.failed > B / 5)
    throw InferenceError("more than 20% of bootstrap replicates failed; SEs unreliable");

  const int kept = B - out.failed;
  out.replicates.resize(kept, data.d());
  int row = 0;
  for (const auto& r : reps)
    if (r) out.replicates.row(row++) = r->transpose();

  const Eigen::RowVectorXd mean = out.replicates.colwise().mean();
  const Eigen::MatrixXd centered = out.replicates.rowwise() - mean;
  out.cov = symmetrize(centered.transpose() * centered / (kept - 1));
  out.se = out.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

std::vector<WaldRow> wald_test(const Eigen::VectorXd& estimates, const Eigen::VectorXd& se) {
  if (estimates.size() != se.size())
    throw std::invalid_argument("wald_test: estimate/se length mismatch");
  std::vector<WaldRow> rows;
  rows.reserve(estimates.size());
  for (Eigen::Index j = 0; j < estimates.size(); ++j) {
    if (!(se[j] > 0.0)) throw std::invalid_argument("wald_test: standard errors must be positive");
    const double z = estimates[j] / se[j];
    rows.push_back(WaldRow{estimates[j], se[j], z, std::erfc(std::abs(z) / std::sqrt(2.0))});
  }
  return rows;
}

}  // namespace pcm
