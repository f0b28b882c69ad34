#include "pcmean/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcm {

Subject::Subject(std::string id_, Eigen::VectorXd z_, std::vector<double> times_,
                 std::vector<std::int64_t> counts_)
    : id(std::move(id_)), z(std::move(z_)), times(std::move(times_)),
      counts(std::move(counts_)) {
  if (times.empty() || times.size() != counts.size())
    throw std::invalid_argument("subject " + id +
                                ": times and counts must be nonempty and equally long");
  if (times.front() <= 0.0)
    throw std::invalid_argument("subject " + id + ": observation times must be positive");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1]))
      throw std::invalid_argument("subject " + id +
                                  ": observation times must be strictly increasing");
  if (counts.front() < 0)
    throw std::invalid_argument("subject " + id + ": counts must be nonnegative");
  for (std::size_t j = 1; j < counts.size(); ++j)
    if (counts[j] < counts[j - 1])
      throw std::invalid_argument("subject " + id +
                                  ": cumulative counts must be nondecreasing");
  for (double t : times)
    if (!std::isfinite(t))
      throw std::invalid_argument("subject " + id + ": nonfinite observation time");
}

Dataset::Dataset(std::vector<Subject> subjects) : subjects_(std::move(subjects)) {
  if (subjects_.empty()) throw std::invalid_argument("dataset must contain at least one subject");
  d_ = static_cast<int>(subjects_.front().z.size());
  for (const Subject& s : subjects_) {
    if (static_cast<int>(s.z.size()) != d_)
      throw std::invalid_argument("subject " + s.id + ": covariate dimension mismatch");
    grid_.insert(grid_.end(), s.times.begin(), s.times.end());
    total_obs_ += s.times.size();
  }
  std::sort(grid_.begin(), grid_.end());
  grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());

  grid_index_.resize(subjects_.size());
  for (std::size_t i = 0; i < subjects_.size(); ++i) {
    grid_index_[i].reserve(subjects_[i].times.size());
    for (double t : subjects_[i].times) {
      auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
      grid_index_[i].push_back(static_cast<int>(it - grid_.begin()));
    }
  }
}

MonotoneStepFunction::MonotoneStepFunction(std::vector<double> jumps_,
                                           std::vector<double> values_)
    : jumps(std::move(jumps_)), values(std::move(values_)) {
  if (jumps.size() != values.size())
    throw std::invalid_argument("step function: jumps and values must be equally long");
  if (!jumps.empty() && jumps.front() <= 0.0)
    throw std::invalid_argument("step function: jumps must be positive");
  for (std::size_t l = 1; l < jumps.size(); ++l)
    if (!(jumps[l] > jumps[l - 1]))
      throw std::invalid_argument("step function: jumps must be strictly increasing");
  if (!values.empty() && values.front() < 0.0)
    throw std::invalid_argument("step function: values must be nonnegative");
  for (std::size_t l = 1; l < values.size(); ++l)
    if (values[l] < values[l - 1])
      throw std::invalid_argument("step function: values must be nondecreasing");
}

double MonotoneStepFunction::eval(double t) const {
  if (t < 0.0) throw std::domain_error("step function evaluated at negative time");
  auto it = std::upper_bound(jumps.begin(), jumps.end(), t);
  if (it == jumps.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - jumps.begin()) - 1];
}

double eval_step(const MonotoneStepFunction& f, double t) { return f.eval(t); }

}  // namespace pcm
