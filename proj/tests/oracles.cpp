#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

pcm::Subject subject(const std::string& id, std::initializer_list<double> z,
                     std::initializer_list<double> times,
                     std::initializer_list<long long> counts) {
  return pcm::Subject(id, vec(z), std::vector<double>(times),
                      std::vector<std::int64_t>(counts.begin(), counts.end()));
}

double pseudo_loglik(const pcm::Dataset& data, const Eigen::VectorXd& beta,
                     const std::function<double(double)>& lambda) {
  double total = 0.0;
  for (const pcm::Subject& s : data.subjects()) {
    const double lin = beta.dot(s.z);
    for (int j = 0; j < s.k(); ++j) {
      const double lam = lambda(s.times[j]);
      const double n = static_cast<double>(s.counts[j]);
      if (n > 0.0) {
        if (lam <= 0.0) return kNegInf;
        total += n * std::log(lam);
      }
      total += n * lin - std::exp(lin) * lam;
    }
  }
  return total;
}

double full_loglik(const pcm::Dataset& data, const Eigen::VectorXd& beta,
                   const std::function<double(double)>& lambda) {
  double total = 0.0;
  for (const pcm::Subject& s : data.subjects()) {
    const double lin = beta.dot(s.z);
    double prev_lam = 0.0;
    double prev_n = 0.0;
    for (int j = 0; j < s.k(); ++j) {
      const double lam = lambda(s.times[j]);
      const double dn = static_cast<double>(s.counts[j]) - prev_n;
      const double dl = lam - prev_lam;
      if (dn > 0.0) {
        if (dl <= 0.0) return kNegInf;
        total += dn * std::log(dl);
      }
      total += dn * lin - std::exp(lin) * dl;
      prev_lam = lam;
      prev_n = static_cast<double>(s.counts[j]);
    }
  }
  return total;
}

double grid_argmax(const std::function<double(double)>& f, double lo, double hi, double mesh) {
  double best_x = lo;
  double best = f(lo);
  const long long steps = static_cast<long long>(std::floor((hi - lo) / mesh + 0.5));
  for (long long i = 1; i <= steps; ++i) {
    const double x = lo + static_cast<double>(i) * mesh;
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

namespace {

// Pooled coefficients of the two-grid-point full criterion:
//   obj = sum_g a_g log(gap_g) - b_g gap_g + const, gaps = (l1, l2, l2 - l1).
struct Grid2Coef {
  double a[3] = {0, 0, 0};
  double b[3] = {0, 0, 0};
  double constant = 0.0;
};

Grid2Coef grid2_coefficients(const pcm::Dataset& data, const Eigen::VectorXd& beta) {
  if (data.grid().size() != 2)
    throw std::invalid_argument("grid2 oracle needs exactly two pooled times");
  const double s1 = data.grid()[0];
  Grid2Coef co;
  for (const pcm::Subject& s : data.subjects()) {
    const double lin = beta.dot(s.z);
    const double w = std::exp(lin);
    double prev_t = 0.0;
    double prev_n = 0.0;
    for (int j = 0; j < s.k(); ++j) {
      const double dn = static_cast<double>(s.counts[j]) - prev_n;
      int g;
      if (prev_t == 0.0)
        g = s.times[j] == s1 ? 0 : 1;
      else
        g = 2;
      co.a[g] += dn;
      co.b[g] += w;
      co.constant += dn * lin;
      prev_t = s.times[j];
      prev_n = static_cast<double>(s.counts[j]);
    }
  }
  return co;
}

double grid2_objective(const Grid2Coef& co, double l1, double l2) {
  const double gaps[3] = {l1, l2, l2 - l1};
  double total = co.constant;
  for (int g = 0; g < 3; ++g) {
    if (co.a[g] > 0.0) {
      if (gaps[g] <= 0.0) return kNegInf;
      total += co.a[g] * std::log(gaps[g]);
    }
    total -= co.b[g] * gaps[g];
  }
  return total;
}

}  // namespace

namespace {

struct LatticePair {
  double value = kNegInf;
  long long i1 = 0;
  long long i2 = 0;
};

// Full scan of the nondecreasing lattice pairs: exhaustive in lambda1, with a
// coarse-plus-window pass over each lambda2 section (the section of a concave
// function is unimodal on the lattice, so the pass is exact up to ties).
LatticePair lattice_pair_max(const Grid2Coef& co, double mesh, long long n2) {
  const long long coarse = 64;
  LatticePair best;
  for (long long i1 = 0; i1 <= n2; ++i1) {
    const double l1 = static_cast<double>(i1) * mesh;
    long long best_j = i1;
    double best_sec = kNegInf;
    for (long long j = i1; j <= n2; j += coarse) {
      const double v = grid2_objective(co, l1, static_cast<double>(j) * mesh);
      if (v > best_sec) {
        best_sec = v;
        best_j = j;
      }
    }
    const long long lo_j = std::max(i1, best_j - coarse - 1);
    const long long hi_j = std::min(n2, best_j + coarse + 1);
    for (long long j = lo_j; j <= hi_j; ++j) {
      const double v = grid2_objective(co, l1, static_cast<double>(j) * mesh);
      if (v > best_sec) {
        best_sec = v;
        best_j = j;
      }
    }
    if (best_sec > best.value) best = LatticePair{best_sec, i1, best_j};
  }
  return best;
}

}  // namespace

double grid2_max_full_loglik(const pcm::Dataset& data, const Eigen::VectorXd& beta,
                             double mesh, double hi) {
  const Grid2Coef co = grid2_coefficients(data, beta);
  const long long n2 = static_cast<long long>(std::floor(hi / mesh + 0.5));
  return lattice_pair_max(co, mesh, n2).value;
}

double alternating_grid_max(const pcm::Dataset& data, double beta_range, double beta_mesh,
                            double lambda_hi, double lambda_mesh) {
  if (data.d() != 1 || data.grid().size() != 2)
    throw std::invalid_argument(
        "alternating grid oracle is for single-covariate two-point toys");
  const long long nb = static_cast<long long>(std::floor(2.0 * beta_range / beta_mesh + 0.5));
  const long long n2 = static_cast<long long>(std::floor(lambda_hi / lambda_mesh + 0.5));

  double best_overall = kNegInf;
  for (const double beta_start : {0.0, 1.0, -1.0}) {
    double beta = beta_start;
    std::vector<double> lam{lambda_hi / 3.0, 2.0 * lambda_hi / 3.0};
    double cur = kNegInf;
    for (int sweep = 0; sweep < 60; ++sweep) {
      const double before = cur;
      // full lambda-block scan at the current beta
      {
        const LatticePair p =
            lattice_pair_max(grid2_coefficients(data, vec({beta})), lambda_mesh, n2);
        lam[0] = static_cast<double>(p.i1) * lambda_mesh;
        lam[1] = static_cast<double>(p.i2) * lambda_mesh;
        cur = p.value;
      }
      // exhaustive beta scan at the current lambda
      for (long long i = 0; i <= nb; ++i) {
        const double b = -beta_range + static_cast<double>(i) * beta_mesh;
        const double v = grid2_objective(grid2_coefficients(data, vec({b})), lam[0], lam[1]);
        if (v > cur) {
          cur = v;
          beta = b;
        }
      }
      if (sweep > 0 && cur - before <= 1e-13 * std::abs(before)) break;
    }
    best_overall = std::max(best_overall, cur);
  }
  return best_overall;
}

namespace {

pcm::Subject toy_subject(pcm::SplitMix64& rng, int idx, bool force_two_times) {
  const double z = rng.uniform(-1.0, 1.0);
  const int pattern = force_two_times ? 2 : rng.uniform_int(0, 2);
  std::vector<double> times;
  std::vector<std::int64_t> counts;
  if (pattern == 0) {
    times = {1.0};
    counts = {rng.poisson(1.5)};
  } else if (pattern == 1) {
    times = {2.0};
    counts = {rng.poisson(2.5)};
  } else {
    times = {1.0, 2.0};
    const std::int64_t c1 = rng.poisson(1.5);
    counts = {c1, c1 + rng.poisson(1.5)};
  }
  return pcm::Subject("t" + std::to_string(idx), vec({z}), times, counts);
}

}  // namespace

pcm::Dataset random_grid2_toy(pcm::SplitMix64& rng, int n_subjects) {
  while (true) {
    std::vector<pcm::Subject> subjects;
    subjects.push_back(toy_subject(rng, 0, true)); // pin both grid points
    for (int i = 1; i < n_subjects; ++i) subjects.push_back(toy_subject(rng, i, false));
    std::int64_t total = 0;
    for (const pcm::Subject& s : subjects) total += s.counts.back();
    if (total == 0) continue;
    return pcm::Dataset(std::move(subjects));
  }
}

pcm::Dataset random_three_subject_toy(pcm::SplitMix64& rng) {
  // well-identified design: covariates spread across [-1, 1] and positive
  // increasing counts keep the maximizer interior to the oracle's scan box
  std::vector<pcm::Subject> subjects;
  const double centers[3] = {-0.8, 0.0, 0.8};
  for (int i = 0; i < 3; ++i) {
    const double z = centers[i] + rng.uniform(-0.15, 0.15);
    if (i == 2 && rng.bernoulli(0.35)) {
      subjects.push_back(
          pcm::Subject("t2", vec({z}), {2.0}, {1 + rng.poisson(1.0)}));
    } else {
      const std::int64_t c1 = 1 + rng.poisson(1.0);
      subjects.push_back(pcm::Subject("t" + std::to_string(i), vec({z}), {1.0, 2.0},
                                      {c1, c1 + 1 + rng.poisson(1.0)}));
    }
  }
  return pcm::Dataset(std::move(subjects));
}

double ks_uniform(std::vector<double> draws, double lo, double hi) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = (draws[i] - lo) / (hi - lo);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

}  // namespace oracle
