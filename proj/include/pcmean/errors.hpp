#ifndef PCMEAN_ERRORS_HPP
#define PCMEAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pcm {

// Linear algebra breakdown (singular Hessian, singular W, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optimizer left the admissible region or the criterion is flat along a
// ridge (non-identifiable covariates).
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Line search could not make progress away from a non-stationary point.
struct StagnationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resampling produced too many failed replicate fits for reliable SEs.
struct InferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Monte Carlo study exceeded its replicate failure budget.
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (CSV schema violations, non-cumulative counts, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pcm

#endif
