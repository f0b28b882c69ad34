#include "pcmean/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dim(const Eigen::VectorXd& beta, const Dataset& data) {
  if (beta.size() != data.d())
    throw std::invalid_argument("beta dimension does not match covariate dimension");
}

}  // namespace

double loglik_pseudo(const Eigen::VectorXd& beta, const MonotoneStepFunction& lambda,
                     const Dataset& data) {
  check_dim(beta, data);
  double total = 0.0;
  for (const Subject& s : data.subjects()) {
    const double lin = beta.dot(s.z);
    const double rate = std::exp(lin);
    for (int j = 0; j < s.k(); ++j) {
      const double lam = lambda.eval(s.times[j]);
      const double n = static_cast<double>(s.counts[j]);
      if (n > 0.0) {
        if (lam <= 0.0) return kNegInf;
        total += n * std::log(lam);
      }
      total += n * lin - rate * lam;
    }
  }
  return total;
}

double loglik_full(const Eigen::VectorXd& beta, const MonotoneStepFunction& lambda,
                   const Dataset& data) {
  check_dim(beta, data);
  double total = 0.0;
  for (const Subject& s : data.subjects()) {
    const double lin = beta.dot(s.z);
    const double rate = std::exp(lin);
    double prev_lam = 0.0;
    std::int64_t prev_count = 0;
    for (int j = 0; j < s.k(); ++j) {
      const double lam = lambda.eval(s.times[j]);
      const double dlam = lam - prev_lam;
      const double dn = static_cast<double>(s.counts[j] - prev_count);
      if (dn > 0.0) {
        if (dlam <= 0.0) return kNegInf;
        total += dn * std::log(dlam);
      }
      total += dn * lin - rate * dlam;
      prev_lam = lam;
      prev_count = s.counts[j];
    }
  }
  return total;
}

double metric_d1(const Theta& theta_hat, const Theta& theta0, const Dataset& data) {
  double ss = 0.0;
  for (const Subject& s : data.subjects())
    for (double t : s.times) {
      const double gap = theta_hat.lambda.eval(t) - theta0.lambda.eval(t);
      ss += gap * gap;
    }
  const double beta_gap = (theta_hat.beta - theta0.beta).squaredNorm();
  return std::sqrt(beta_gap + ss / static_cast<double>(data.total_observations()));
}

double metric_d2(const Theta& theta_hat, const Theta& theta0, const Dataset& data) {
  double ss = 0.0;
  for (const Subject& s : data.subjects()) {
    double prev_hat = 0.0, prev_0 = 0.0;
    for (double t : s.times) {
      const double hat = theta_hat.lambda.eval(t);
      const double ref = theta0.lambda.eval(t);
      const double gap = (hat - prev_hat) - (ref - prev_0);
      ss += gap * gap;
      prev_hat = hat;
      prev_0 = ref;
    }
  }
  const double beta_gap = (theta_hat.beta - theta0.beta).squaredNorm();
  return std::sqrt(beta_gap + ss / static_cast<double>(data.total_observations()));
}

}  // namespace pcm
