#ifndef PCMEAN_ISOTONIC_HPP
#define PCMEAN_ISOTONIC_HPP

#include <Eigen/Core>
#include <span>
#include <vector>

#include "pcmean/types.hpp"

namespace pcm {

/// Pooled per-time sufficient statistics: responses y and positive weights w
/// attached to strictly increasing positions.
struct WeightedSeries {
  std::vector<double> positions;
  std::vector<double> responses;
  std::vector<double> weights;

  WeightedSeries(std::vector<double> positions_, std::vector<double> responses_,
                 std::vector<double> weights_);
};

/// Weighted isotonic regression by pool-adjacent-violators: the nondecreasing
/// vector minimizing sum_l w_l (y_l - x_l)^2. Linear-time stack algorithm;
/// adjacent blocks with equal means merge.
std::vector<double> pava(std::span<const double> responses, std::span<const double> weights);
std::vector<double> pava(const WeightedSeries& series);

/// O(m^3) evaluation of the max-min characterization
///   x_l = max_{r<=l} min_{q>=l} (sum_{p=r..q} w_p y_p) / (sum_{p=r..q} w_p).
/// Independent check of pava; agrees with it to 1e-10.
std::vector<double> isotonic_maxmin(const WeightedSeries& series);

/// Closed-form profile maximizer of the marginal-Poisson criterion over
/// nondecreasing step functions for fixed beta: pool observations by distinct
/// time, w_l = sum exp(beta'z), y_l = (sum counts)/w_l, then isotonize.
MonotoneStepFunction profile_lambda_pseudo(const Eigen::VectorXd& beta, const Dataset& data);

}  // namespace pcm

#endif
