#ifndef PCMEAN_TYPES_HPP
#define PCMEAN_TYPES_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pcmean/errors.hpp"

namespace pcm {

/// One individual's panel observation: covariates, inspection times and the
/// cumulative event counts recorded at those times.
struct Subject {
  std::string id;
  Eigen::VectorXd z;
  std::vector<double> times;        // strictly increasing, all > 0
  std::vector<std::int64_t> counts; // cumulative, nondecreasing, >= 0

  Subject(std::string id_, Eigen::VectorXd z_, std::vector<double> times_,
          std::vector<std::int64_t> counts_);

  int k() const { return static_cast<int>(times.size()); }
};

/// Immutable collection of subjects sharing a covariate dimension, plus the
/// pooled grid of distinct observation times (estimates jump only there).
class Dataset {
public:
  explicit Dataset(std::vector<Subject> subjects);

  const std::vector<Subject>& subjects() const { return subjects_; }
  int n() const { return static_cast<int>(subjects_.size()); }
  int d() const { return d_; }
  const std::vector<double>& grid() const { return grid_; }
  // grid_index(i)[j] is the position of subjects()[i].times[j] in grid().
  const std::vector<int>& grid_index(int i) const { return grid_index_[i]; }
  std::size_t total_observations() const { return total_obs_; }

private:
  std::vector<Subject> subjects_;
  int d_ = 0;
  std::vector<double> grid_;
  std::vector<std::vector<int>> grid_index_;
  std::size_t total_obs_ = 0;
};

/// Nondecreasing right-continuous step estimate of the baseline mean
/// function, zero before the first jump (and at 0, since all jumps are > 0).
/// Evaluation past the last jump extends the final value as a constant.
struct MonotoneStepFunction {
  std::vector<double> jumps;  // strictly increasing, all > 0
  std::vector<double> values; // nondecreasing, all >= 0

  MonotoneStepFunction() = default;
  MonotoneStepFunction(std::vector<double> jumps_, std::vector<double> values_);

  double eval(double t) const;
  double operator()(double t) const { return eval(t); }
};

/// Right-continuous step evaluation: the value at the largest jump <= t,
/// zero when t precedes every jump. t < 0 is a domain error.
double eval_step(const MonotoneStepFunction& f, double t);

struct Theta {
  Eigen::VectorXd beta;
  MonotoneStepFunction lambda;
};

}  // namespace pcm

#endif
