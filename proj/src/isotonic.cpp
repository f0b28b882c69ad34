#include "pcmean/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcm {

namespace {

void check_series(std::span<const double> y, std::span<const double> w) {
  if (y.empty()) throw std::invalid_argument("isotonic regression: empty input");
  if (y.size() != w.size())
    throw std::invalid_argument("isotonic regression: responses/weights length mismatch");
  for (double wi : w)
    if (!(wi > 0.0)) throw std::invalid_argument("isotonic regression: weights must be positive");
}

}  // namespace

WeightedSeries::WeightedSeries(std::vector<double> positions_, std::vector<double> responses_,
                               std::vector<double> weights_)
    : positions(std::move(positions_)), responses(std::move(responses_)),
      weights(std::move(weights_)) {
  if (positions.empty() || positions.size() != responses.size() ||
      positions.size() != weights.size())
    throw std::invalid_argument("weighted series: fields must be nonempty and equally long");
  for (std::size_t l = 1; l < positions.size(); ++l)
    if (!(positions[l] > positions[l - 1]))
      throw std::invalid_argument("weighted series: positions must be strictly increasing");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("weighted series: weights must be positive");
}

std::vector<double> pava(std::span<const double> y, std::span<const double> w) {
  check_series(y, w);
  const std::size_t m = y.size();
  // Stack of pooled blocks: [start, end], weight sum, weighted mean.
  struct Block {
    std::size_t start;
    double wsum;
    double mean;
  };
  std::vector<Block> blocks;
  blocks.reserve(m);
  for (std::size_t l = 0; l < m; ++l) {
    Block b{l, w[l], y[l]};
    while (!blocks.empty() && blocks.back().mean >= b.mean) {
      const Block& prev = blocks.back();
      const double wsum = prev.wsum + b.wsum;
      b = Block{prev.start, wsum, (prev.wsum * prev.mean + b.wsum * b.mean) / wsum};
      blocks.pop_back();
    }
    blocks.push_back(b);
  }
  std::vector<double> out(m);
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const std::size_t end = bi + 1 < blocks.size() ? blocks[bi + 1].start : m;
    for (std::size_t l = blocks[bi].start; l < end; ++l) out[l] = blocks[bi].mean;
  }
  return out;
}

std::vector<double> pava(const WeightedSeries& series) {
  return pava(series.responses, series.weights);
}

std::vector<double> isotonic_maxmin(const WeightedSeries& series) {
  const std::vector<double>& y = series.responses;
  const std::vector<double>& w = series.weights;
  const std::size_t m = y.size();
  std::vector<double> out(m);
  for (std::size_t l = 0; l < m; ++l) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r <= l; ++r) {
      double inner = std::numeric_limits<double>::infinity();
      double num = 0.0, den = 0.0;
      for (std::size_t p = r; p < m; ++p) {
        num += w[p] * y[p];
        den += w[p];
        if (p >= l) inner = std::min(inner, num / den);
      }
      best = std::max(best, inner);
    }
    out[l] = best;
  }
  return out;
}

MonotoneStepFunction profile_lambda_pseudo(const Eigen::VectorXd& beta, const Dataset& data) {
  if (beta.size() != data.d())
    throw std::invalid_argument("beta dimension does not match covariate dimension");
  const std::vector<double>& grid = data.grid();
  std::vector<double> wsum(grid.size(), 0.0);
  std::vector<double> nsum(grid.size(), 0.0);
  for (int i = 0; i < data.n(); ++i) {
    const Subject& s = data.subjects()[i];
    const double rate = std::exp(beta.dot(s.z));
    const std::vector<int>& idx = data.grid_index(i);
    for (int j = 0; j < s.k(); ++j) {
      wsum[idx[j]] += rate;
      nsum[idx[j]] += static_cast<double>(s.counts[j]);
    }
  }
  std::vector<double> y(grid.size());
  for (std::size_t l = 0; l < grid.size(); ++l) y[l] = nsum[l] / wsum[l];
  return MonotoneStepFunction(grid, pava(y, wsum));
}

}  // namespace pcm
