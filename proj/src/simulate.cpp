#include "pcmean/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pcmean/inference.hpp"
#include "pcmean/likelihood.hpp"
#include "parallel.hpp"

namespace pcm {

namespace {

double round2(double t) { return std::round(t * 100.0) / 100.0; }

Dataset gen_scenario(int n, const Eigen::VectorXd& beta0, SplitMix64& rng, double slope,
                     bool frailty, std::vector<double>* frailty_out) {
  if (n < 1) throw std::invalid_argument("generator needs n >= 1");
  if (beta0.size() != 3)
    throw std::invalid_argument("scenario generators use the 3-covariate law");
  if (!(slope > 0.0)) throw std::invalid_argument("baseline slope must be positive");

  if (frailty_out) frailty_out->clear();
  std::vector<Subject> subjects;
  subjects.reserve(n);
  Eigen::VectorXd z(3);
  for (int i = 0; i < n; ++i) {
    z << rng.uniform(), rng.normal(), rng.bernoulli(0.5) ? 1.0 : 0.0;
    double subject_slope = slope;
    if (frailty) {
      const double u = rng.uniform();
      const double alpha = u < 0.25 ? -0.4 : (u < 0.75 ? 0.0 : 0.4);
      subject_slope += alpha;
      if (frailty_out) frailty_out->push_back(alpha);
    }
    const int k = rng.uniform_int(1, 6);
    std::vector<double> times(k);
    for (double& t : times) t = round2(rng.uniform(1.0, 10.0));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    const double rate = subject_slope * std::exp(beta0.dot(z));
    std::vector<std::int64_t> counts(times.size());
    double prev = 0.0;
    std::int64_t cum = 0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      cum += rng.poisson(rate * (times[j] - prev));
      counts[j] = cum;
      prev = times[j];
    }
    subjects.emplace_back("s" + std::to_string(i + 1), z, std::move(times), std::move(counts));
  }
  return Dataset(std::move(subjects));
}

}  // namespace

Dataset gen_scenario1(int n, const Eigen::VectorXd& beta0, SplitMix64& rng, double slope) {
  return gen_scenario(n, beta0, rng, slope, false, nullptr);
}

Dataset gen_scenario2(int n, const Eigen::VectorXd& beta0, SplitMix64& rng, double slope,
                      std::vector<double>* frailty_out) {
  return gen_scenario(n, beta0, rng, slope, true, frailty_out);
}

namespace {

struct Replicate {
  bool ps_ok = false;
  bool ml_ok = false;
  Eigen::VectorXd ps_beta, ml_beta;
  MonotoneStepFunction ps_lambda, ml_lambda;
  double ps_d1 = 0.0, ml_d1 = 0.0;
  double ps_sec = 0.0, ml_sec = 0.0;
};

McSummary summarize(const std::vector<Replicate>& reps, bool mle,
                    const Eigen::VectorXd& beta0, const Eigen::VectorXd& ase) {
  const int d = static_cast<int>(beta0.size());
  McSummary out;
  out.coef.resize(d);
  double runtime = 0.0;
  std::vector<const Eigen::VectorXd*> kept;
  for (const Replicate& r : reps) {
    if (mle ? r.ml_ok : r.ps_ok) {
      kept.push_back(mle ? &r.ml_beta : &r.ps_beta);
      runtime += mle ? r.ml_sec : r.ps_sec;
    }
  }
  out.reps_used = static_cast<int>(kept.size());
  out.nonconverged = static_cast<int>(reps.size()) - out.reps_used;
  out.mean_runtime_sec = kept.empty() ? 0.0 : runtime / kept.size();
  for (int j = 0; j < d; ++j) {
    CoefSummary& c = out.coef[j];
    c.ase = ase[j];
    if (kept.empty()) continue;
    double mean = 0.0, mse = 0.0;
    for (const auto* b : kept) {
      mean += (*b)[j];
      const double dev = (*b)[j] - beta0[j];
      mse += dev * dev;
    }
    mean /= kept.size();
    c.bias = mean - beta0[j];
    c.mse = mse / kept.size();
    if (kept.size() >= 2) {
      double ss = 0.0;
      for (const auto* b : kept) {
        const double dev = (*b)[j] - mean;
        ss += dev * dev;
      }
      c.sd = std::sqrt(ss / (kept.size() - 1));
    }
  }
  return out;
}

}  // namespace

McResult monte_carlo(const ScenarioConfig& config) {
  if (config.scenario != 1 && config.scenario != 2)
    throw std::invalid_argument("scenario must be 1 or 2");
  if (config.n < 2 || config.reps < 1)
    throw std::invalid_argument("monte_carlo needs n >= 2 and reps >= 1");

  const ScenarioCov cov = config.scenario == 1 ? scenario1_cov(config.beta0)
                                               : scenario2_cov(config.beta0);
  const Eigen::VectorXd ase_ps = (cov.sigma_ps.diagonal() / config.n).cwiseSqrt();
  const Eigen::VectorXd ase_ml = (cov.sigma.diagonal() / config.n).cwiseSqrt();

  std::vector<Replicate> reps(config.reps);
  detail::parallel_for(config.reps, config.threads, [&](int r) {
    using clock = std::chrono::steady_clock;
    Replicate& rep = reps[r];
    SplitMix64 rng = SplitMix64::stream(config.seed, static_cast<std::uint64_t>(r));
    const Dataset data = config.scenario == 1
                             ? gen_scenario1(config.n, config.beta0, rng, config.lambda_slope)
                             : gen_scenario2(config.n, config.beta0, rng, config.lambda_slope);
    std::vector<double> truth_values(data.grid().size());
    for (std::size_t l = 0; l < data.grid().size(); ++l)
      truth_values[l] = config.lambda_slope * data.grid()[l];
    const Theta truth{config.beta0, MonotoneStepFunction(data.grid(), truth_values)};

    const auto t0 = clock::now();
    FitResult ps;
    try {
      ps = fit_mple(data, Eigen::VectorXd::Zero(data.d()), config.fit);
      rep.ps_ok = ps.converged;
    } catch (const std::exception&) {
      return; // the likelihood fit shares the warm start, so both fail
    }
    const auto t1 = clock::now();
    rep.ps_sec = std::chrono::duration<double>(t1 - t0).count();
    if (rep.ps_ok) {
      rep.ps_beta = ps.beta;
      rep.ps_lambda = ps.lambda;
      rep.ps_d1 = metric_d1(Theta{ps.beta, ps.lambda}, truth, data);
    }

    try {
      const FitResult ml = fit_mle_from(data, ps, config.fit);
      rep.ml_ok = ml.converged;
      if (rep.ml_ok) {
        rep.ml_beta = ml.beta;
        rep.ml_lambda = ml.lambda;
        rep.ml_d1 = metric_d1(Theta{ml.beta, ml.lambda}, truth, data);
      }
    } catch (const std::exception&) {
    }
    // the likelihood estimator's cost includes its pseudo-likelihood start
    rep.ml_sec = std::chrono::duration<double>(clock::now() - t0).count();
  });

  McResult out;
  out.mple = summarize(reps, false, config.beta0, ase_ps);
  out.mle = summarize(reps, true, config.beta0, ase_ml);
  const int worst = std::max(out.mple.nonconverged, out.mle.nonconverged);
  if (10 * worst > config.reps)
    throw SimulationError("more than 10% of Monte Carlo replicates failed (" +
                          std::to_string(worst) + " of " + std::to_string(config.reps) + ")");

  out.mple_betas.resize(out.mple.reps_used, config.beta0.size());
  out.mle_betas.resize(out.mle.reps_used, config.beta0.size());
  int ps_row = 0, ml_row = 0;
  for (const Replicate& r : reps) {
    if (r.ps_ok) {
      out.mple_betas.row(ps_row++) = r.ps_beta.transpose();
      out.mple_lambdas.push_back(r.ps_lambda);
      out.mple_d1.push_back(r.ps_d1);
    }
    if (r.ml_ok) {
      out.mle_betas.row(ml_row++) = r.ml_beta.transpose();
      out.mle_lambdas.push_back(r.ml_lambda);
      out.mle_d1.push_back(r.ml_d1);
    }
  }
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<EnvelopeRow> lambda_envelope(const std::vector<MonotoneStepFunction>& lambdas,
                                         const std::vector<double>& grid) {
  if (lambdas.empty()) throw std::invalid_argument("lambda_envelope: no replicates");
  std::vector<EnvelopeRow> rows;
  rows.reserve(grid.size());
  std::vector<double> vals(lambdas.size());
  for (double t : grid) {
    double sum = 0.0;
    for (std::size_t r = 0; r < lambdas.size(); ++r) {
      vals[r] = lambdas[r].eval(t);
      sum += vals[r];
    }
    std::sort(vals.begin(), vals.end());
    rows.push_back(EnvelopeRow{t, sum / lambdas.size(), quantile_sorted(vals, 0.025),
                               quantile_sorted(vals, 0.975)});
  }
  return rows;
}

std::vector<double> envelope_grid() {
  std::vector<double> grid(100);
  for (int i = 0; i < 100; ++i) grid[i] = 1.0 + 9.0 * i / 99.0;
  return grid;
}

}  // namespace pcm
