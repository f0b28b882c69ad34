#include "pcmean/fit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcmean/isotonic.hpp"
#include "pcmean/likelihood.hpp"

namespace pcm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinStepScale = 0x1.0p-30;

double rel_change(double next, double cur) {
  return std::abs(next - cur) / std::max(std::abs(cur), 1e-100);
}

void check_config(const FitConfig& cfg) {
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("fit config: eta must be positive");
  if (cfg.max_outer < 1 || cfg.max_inner < 1)
    throw std::invalid_argument("fit config: iteration caps must be at least 1");
  if (!(cfg.beta_box > 0.0))
    throw std::invalid_argument("fit config: beta_box must be positive");
  if (cfg.delta_floor < 0.0)
    throw std::invalid_argument("fit config: delta_floor must be nonnegative");
}

// Per-subject sufficient statistics for the beta step. The log terms of both
// criteria do not involve beta, so only the count totals and the matching
// Lambda (or Lambda-increment) totals enter the Newton iteration.
struct BetaStats {
  Eigen::VectorXd count; // pseudo: sum_j N_ij; full: N_iK (increments telescope)
  Eigen::VectorXd load;  // pseudo: sum_j Lambda(t_ij); full: Lambda(t_iK)
};

BetaStats beta_stats(const MonotoneStepFunction& lambda, const Dataset& data,
                     Criterion criterion) {
  BetaStats st{Eigen::VectorXd(data.n()), Eigen::VectorXd(data.n())};
  for (int i = 0; i < data.n(); ++i) {
    const Subject& s = data.subjects()[i];
    if (criterion == Criterion::Pseudo) {
      double a = 0.0, b = 0.0;
      for (int j = 0; j < s.k(); ++j) {
        a += static_cast<double>(s.counts[j]);
        b += lambda.eval(s.times[j]);
      }
      st.count[i] = a;
      st.load[i] = b;
    } else {
      st.count[i] = static_cast<double>(s.counts.back());
      st.load[i] = lambda.eval(s.times.back());
    }
  }
  return st;
}

double reduced_objective(const Eigen::VectorXd& beta, const Dataset& data,
                         const BetaStats& st) {
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double lin = beta.dot(data.subjects()[i].z);
    total += st.count[i] * lin - std::exp(lin) * st.load[i];
  }
  return total;
}

void require_identifiable(const Dataset& data) {
  std::int64_t total = 0;
  for (const Subject& s : data.subjects()) total += s.counts.back();
  if (total == 0)
    throw DivergenceError("all counts are zero: regression parameter not identified");
  if (data.n() < 2)
    throw DivergenceError(
        "covariates not identifiable: criterion is flat along a ridge (need n >= 2)");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(data.d());
  for (const Subject& s : data.subjects()) mean += s.z;
  mean /= data.n();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(data.d(), data.d());
  for (const Subject& s : data.subjects()) {
    const Eigen::VectorXd c = s.z - mean;
    cov += c * c.transpose();
  }
  cov /= data.n() - 1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 1e-12 * std::max(1.0, hi))
    throw DivergenceError(
        "covariates not identifiable: criterion is flat along a ridge "
        "(degenerate covariate sample covariance)");
}

Eigen::VectorXd resolve_start_beta(const Dataset& data, const Eigen::VectorXd& beta_init,
                                   const FitConfig& cfg) {
  const Eigen::VectorXd& beta = cfg.fixed_beta ? *cfg.fixed_beta : beta_init;
  if (beta.size() != data.d())
    throw std::invalid_argument("beta dimension does not match covariate dimension");
  if (beta.lpNorm<Eigen::Infinity>() > cfg.beta_box)
    throw std::invalid_argument("initial beta lies outside the admissible box");
  return beta;
}

}  // namespace

Eigen::VectorXd newton_beta(const MonotoneStepFunction& lambda, const Dataset& data,
                            Eigen::VectorXd beta, const FitConfig& cfg,
                            Criterion criterion) {
  check_config(cfg);
  if (beta.size() != data.d())
    throw std::invalid_argument("beta dimension does not match covariate dimension");
  const BetaStats st = beta_stats(lambda, data, criterion);
  const int d = data.d();
  double obj = reduced_objective(beta, data, st);

  for (int it = 0; it < cfg.max_inner; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd neg_hess = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < data.n(); ++i) {
      const Eigen::VectorXd& z = data.subjects()[i].z;
      const double wb = std::exp(beta.dot(z)) * st.load[i];
      grad += (st.count[i] - wb) * z;
      neg_hess.noalias() += wb * z * z.transpose();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(neg_hess);
    if (llt.info() != Eigen::Success)
      throw NumericalError("singular Hessian in Newton step (degenerate covariates)");
    const Eigen::VectorXd step = llt.solve(grad);
    if (!step.allFinite())
      throw NumericalError("nonfinite Newton step (near-singular Hessian)");

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd cand;
    double cand_obj = kNegInf;
    while (alpha >= kMinStepScale) {
      cand = beta + alpha * step;
      cand_obj = reduced_objective(cand, data, st);
      if (cand_obj >= obj) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return beta; // numerically stationary

    if (cand.lpNorm<Eigen::Infinity>() > cfg.beta_box)
      throw DivergenceError(
          "Newton iterate left the admissible beta region (flat or unbounded profile)");
    const double moved = (cand - beta).lpNorm<Eigen::Infinity>();
    beta = cand;
    obj = cand_obj;
    if (moved <= cfg.eta) break;
  }
  return beta;
}

namespace {

// One subject-level observation gap: grid indices of its endpoints (left = -1
// denotes the origin, where Lambda = 0), the count increment and exp(beta'z).
struct Increment {
  int left;
  int right;
  double dn;
  double w;
};

struct IcmWork {
  std::vector<Increment> inc;
  double const_term = 0.0; // sum of dn * beta'z over all increments
  int m = 0;
  double delta_floor = 0.0;
};

IcmWork build_icm_work(const Eigen::VectorXd& beta, const Dataset& data,
                       const FitConfig& cfg) {
  IcmWork wk;
  wk.m = static_cast<int>(data.grid().size());
  wk.delta_floor = cfg.delta_floor;
  wk.inc.reserve(data.total_observations());
  for (int i = 0; i < data.n(); ++i) {
    const Subject& s = data.subjects()[i];
    const double lin = beta.dot(s.z);
    const double w = std::exp(lin);
    const std::vector<int>& idx = data.grid_index(i);
    int prev_idx = -1;
    std::int64_t prev_count = 0;
    for (int j = 0; j < s.k(); ++j) {
      const double dn = static_cast<double>(s.counts[j] - prev_count);
      wk.inc.push_back(Increment{prev_idx, idx[j], dn, w});
      wk.const_term += dn * lin;
      prev_idx = idx[j];
      prev_count = s.counts[j];
    }
  }
  return wk;
}

double icm_objective(const std::vector<double>& lam, const IcmWork& wk) {
  double total = wk.const_term;
  for (const Increment& inc : wk.inc) {
    const double dl = lam[inc.right] - (inc.left < 0 ? 0.0 : lam[inc.left]);
    if (inc.dn > 0.0) {
      if (dl <= 0.0) return kNegInf;
      total += inc.dn * std::log(dl);
    }
    total -= inc.w * dl;
  }
  return total;
}

bool icm_feasible(const std::vector<double>& lam, const IcmWork& wk) {
  for (const Increment& inc : wk.inc) {
    if (inc.dn <= 0.0) continue;
    const double dl = lam[inc.right] - (inc.left < 0 ? 0.0 : lam[inc.left]);
    if (dl < wk.delta_floor) return false;
  }
  return true;
}

}  // namespace

MonotoneStepFunction icm_lambda(const Eigen::VectorXd& beta, const Dataset& data,
                                const MonotoneStepFunction& lambda_init,
                                const FitConfig& cfg) {
  check_config(cfg);
  if (beta.size() != data.d())
    throw std::invalid_argument("beta dimension does not match covariate dimension");
  const IcmWork wk = build_icm_work(beta, data, cfg);
  const std::vector<double>& grid = data.grid();
  const int m = wk.m;

  std::vector<double> lam(m);
  for (int l = 0; l < m; ++l) lam[l] = lambda_init.eval(grid[l]);
  double cur = icm_objective(lam, wk);
  if (cur == kNegInf || !icm_feasible(lam, wk))
    throw std::invalid_argument(
        "lambda_init infeasible: some increment with positive count is below delta_floor");

  std::vector<double> grad(m), curv(m), resp(m), x(m);
  for (int it = 0; it < cfg.max_inner; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(curv.begin(), curv.end(), 0.0);
    for (const Increment& inc : wk.inc) {
      double r = -inc.w, c = 0.0;
      if (inc.dn > 0.0) {
        const double dl = lam[inc.right] - (inc.left < 0 ? 0.0 : lam[inc.left]);
        r += inc.dn / dl;
        c = inc.dn / (dl * dl);
      }
      grad[inc.right] += r;
      curv[inc.right] += c;
      if (inc.left >= 0) {
        grad[inc.left] -= r;
        curv[inc.left] += c;
      }
    }
    // Zero-curvature points (no positive count incident) get a small ridge so
    // the isotonic projection weights stay positive.
    for (int l = 0; l < m; ++l) {
      if (curv[l] <= 0.0) curv[l] = 1e-8;
      resp[l] = lam[l] + grad[l] / curv[l];
    }
    std::vector<double> cand = pava(resp, curv);
    for (double& v : cand) v = std::max(v, 0.0);

    // Halving line search from the current iterate toward the minorant
    // maximizer, accepting the first feasible ascent point.
    double alpha = 1.0;
    bool accepted = false;
    double best = kNegInf;
    double accepted_obj = kNegInf;
    while (alpha >= kMinStepScale) {
      for (int l = 0; l < m; ++l) x[l] = lam[l] + alpha * (cand[l] - lam[l]);
      if (icm_feasible(x, wk)) {
        const double obj = icm_objective(x, wk);
        best = std::max(best, obj);
        if (obj > cur) {
          accepted = true;
          accepted_obj = obj;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (best > kNegInf && rel_change(best, cur) <= cfg.eta) break; // stationary
      std::ostringstream msg;
      msg << "ICM line search stagnated at iteration " << it << " (objective " << cur
          << ", best candidate " << best << ")";
      throw StagnationError(msg.str());
    }
    const double rel = rel_change(accepted_obj, cur);
    lam = x;
    cur = accepted_obj;
    if (rel <= cfg.eta) break;
  }
  return MonotoneStepFunction(grid, lam);
}

MonotoneStepFunction warm_start_lambda(const MonotoneStepFunction& pseudo_lambda,
                                       const Dataset& data, double delta_floor) {
  // Knots where the pseudo estimate strictly increases, anchored at the
  // origin; linear interpolation between knots makes the start increasing
  // wherever the estimate is, and the floor strictifies the rest.
  std::vector<double> kt{0.0}, kv{0.0};
  double prev = 0.0;
  for (std::size_t l = 0; l < pseudo_lambda.jumps.size(); ++l) {
    if (pseudo_lambda.values[l] > prev) {
      kt.push_back(pseudo_lambda.jumps[l]);
      kv.push_back(pseudo_lambda.values[l]);
      prev = pseudo_lambda.values[l];
    }
  }
  const std::vector<double>& grid = data.grid();
  std::vector<double> vals(grid.size());
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double t = grid[l];
    if (t >= kt.back()) {
      vals[l] = kv.back();
    } else {
      const auto it = std::upper_bound(kt.begin(), kt.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - kt.begin());
      const double frac = (t - kt[k - 1]) / (kt[k] - kt[k - 1]);
      vals[l] = kv[k - 1] + frac * (kv[k] - kv[k - 1]);
    }
  }
  if (kv.back() > 0.0) {
    vals[0] = std::max(vals[0], delta_floor);
    for (std::size_t l = 1; l < vals.size(); ++l) {
      vals[l] = std::max(vals[l], vals[l - 1] + delta_floor);
      // the addition can round below the floor at large magnitudes
      while (vals[l] - vals[l - 1] < delta_floor)
        vals[l] = std::nextafter(vals[l], std::numeric_limits<double>::infinity());
    }
  }
  return MonotoneStepFunction(grid, vals);
}

FitResult fit_mple(const Dataset& data, const Eigen::VectorXd& beta_init,
                   const FitConfig& cfg) {
  check_config(cfg);
  if (!cfg.fixed_beta) require_identifiable(data);
  Eigen::VectorXd beta = resolve_start_beta(data, beta_init, cfg);

  MonotoneStepFunction lambda = profile_lambda_pseudo(beta, data);
  double cur = loglik_pseudo(beta, lambda, data);
  FitResult res;
  res.trace.push_back(cur);
  for (int p = 1; p <= cfg.max_outer; ++p) {
    res.outer_iters = p;
    if (!cfg.fixed_beta) beta = newton_beta(lambda, data, beta, cfg, Criterion::Pseudo);
    lambda = profile_lambda_pseudo(beta, data);
    const double next = loglik_pseudo(beta, lambda, data);
    res.trace.push_back(next);
    const double rel = rel_change(next, cur);
    cur = next;
    if (rel <= cfg.eta) {
      res.converged = true;
      break;
    }
  }
  res.beta = std::move(beta);
  res.lambda = std::move(lambda);
  res.loglik = cur;
  return res;
}

FitResult fit_mle_from(const Dataset& data, const FitResult& mple, const FitConfig& cfg) {
  check_config(cfg);
  Eigen::VectorXd beta = cfg.fixed_beta ? *cfg.fixed_beta : mple.beta;
  MonotoneStepFunction lambda = warm_start_lambda(mple.lambda, data, cfg.delta_floor);
  double cur = loglik_full(beta, lambda, data);
  FitResult res;
  res.trace.push_back(cur);
  for (int p = 1; p <= cfg.max_outer; ++p) {
    res.outer_iters = p;
    lambda = icm_lambda(beta, data, lambda, cfg);
    if (!cfg.fixed_beta) beta = newton_beta(lambda, data, beta, cfg, Criterion::Full);
    const double next = loglik_full(beta, lambda, data);
    res.trace.push_back(next);
    const double rel = rel_change(next, cur);
    cur = next;
    if (rel <= cfg.eta) {
      res.converged = true;
      break;
    }
  }
  res.beta = std::move(beta);
  res.lambda = std::move(lambda);
  res.loglik = cur;
  return res;
}

FitResult fit_mle(const Dataset& data, const FitConfig& cfg) {
  const FitResult mple = fit_mple(data, Eigen::VectorXd::Zero(data.d()), cfg);
  return fit_mle_from(data, mple, cfg);
}

}  // namespace pcm
