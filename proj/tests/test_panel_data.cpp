#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pcmean/likelihood.hpp"
#include "pcmean/random.hpp"
#include "pcmean/types.hpp"

using namespace pcm;
using oracle::subject;
using oracle::vec;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Dataset toy_dataset() {
  std::vector<Subject> subjects;
  subjects.push_back(subject("a", {0.5}, {1.0, 2.0}, {1, 3}));
  subjects.push_back(subject("b", {-0.3}, {1.5, 3.0}, {0, 2}));
  return Dataset(std::move(subjects));
}

MonotoneStepFunction random_step(SplitMix64& rng, int m) {
  std::vector<double> jumps(m), values(m);
  double t = 0.0, v = 0.0;
  for (int l = 0; l < m; ++l) {
    t += rng.uniform(0.1, 2.0);
    v += rng.uniform(0.0, 1.0);
    jumps[l] = t;
    values[l] = v;
  }
  return MonotoneStepFunction(jumps, values);
}

}  // namespace

TEST_CASE("eval_step basic semantics") {
  const MonotoneStepFunction f({1.0, 2.0}, {3.0, 5.0});
  CHECK(eval_step(f, 0.5) == 0.0);
  CHECK(eval_step(f, 1.0) == 3.0);
  CHECK(eval_step(f, 1.7) == 3.0);
  CHECK(eval_step(f, 2.0) == 5.0);
  CHECK(eval_step(f, 99.0) == 5.0); // constant extension past the last jump
  CHECK(eval_step(f, 0.0) == 0.0);
  CHECK_THROWS_AS(eval_step(f, -0.1), std::domain_error);
}

TEST_CASE("eval_step is nondecreasing in t") {
  SplitMix64 rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const MonotoneStepFunction f = random_step(rng, 1 + rep % 8);
    double prev = 0.0;
    for (double t = 0.0; t < 20.0; t += 0.13) {
      const double v = f.eval(t);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("type invariants are validated") {
  CHECK_THROWS_AS(MonotoneStepFunction({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneStepFunction({-1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneStepFunction({1.0, 2.0}, {2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneStepFunction({1.0}, {-0.5}), std::invalid_argument);
  CHECK_THROWS_AS(subject("x", {0.0}, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(subject("x", {0.0}, {1.0, 1.0}, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(subject("x", {0.0}, {-1.0, 1.0}, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(subject("x", {0.0}, {1.0, 2.0}, {2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(subject("x", {0.0}, {1.0}, {-1}), std::invalid_argument);
  // covariate dimension must match across subjects
  std::vector<Subject> mixed;
  mixed.push_back(subject("a", {0.0}, {1.0}, {0}));
  mixed.push_back(subject("b", {0.0, 1.0}, {1.0}, {0}));
  CHECK_THROWS_AS(Dataset(std::move(mixed)), std::invalid_argument);
}

TEST_CASE("dataset grid pools distinct times") {
  const Dataset data = toy_dataset();
  CHECK(data.grid() == std::vector<double>{1.0, 1.5, 2.0, 3.0});
  CHECK(data.d() == 1);
  CHECK(data.total_observations() == 4);
  CHECK(data.grid_index(1) == std::vector<int>{1, 3});
}

TEST_CASE("loglik_pseudo worked examples") {
  {
    std::vector<Subject> s;
    s.push_back(subject("a", {0.0}, {1.0}, {0}));
    const Dataset data(std::move(s));
    const MonotoneStepFunction lam({1.0}, {1.0});
    CHECK(loglik_pseudo(vec({0.0}), lam, data) == doctest::Approx(-1.0).epsilon(1e-12));
  }
  {
    std::vector<Subject> s;
    s.push_back(subject("a", {1.0}, {1.0, 2.0}, {1, 3}));
    const Dataset data(std::move(s));
    const MonotoneStepFunction lam({1.0, 2.0}, {1.0, 2.0});
    const double expected = 7.0 * std::log(2.0) - 6.0; // sum of the three-term rows
    const double got = loglik_pseudo(vec({std::log(2.0)}), lam, data);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    // against the direct-summation oracle
    const double ref =
        oracle::pseudo_loglik(data, vec({std::log(2.0)}), [](double t) { return t; });
    CHECK(got == doctest::Approx(ref).epsilon(1e-14));
  }
  {
    std::vector<Subject> s;
    s.push_back(subject("a", {0.0}, {1.0, 2.0}, {2, 2}));
    const Dataset data(std::move(s));
    const MonotoneStepFunction lam({2.0}, {1.0}); // Lambda(1) = 0 with N(1) = 2
    CHECK(loglik_pseudo(vec({0.0}), lam, data) == -kInf);
  }
  CHECK_THROWS_AS(
      loglik_pseudo(vec({0.0, 1.0}), MonotoneStepFunction({1.0}, {1.0}), toy_dataset()),
      std::invalid_argument);
}

TEST_CASE("loglik_full worked examples") {
  {
    std::vector<Subject> s;
    s.push_back(subject("a", {0.0}, {1.0}, {0}));
    const Dataset data(std::move(s));
    CHECK(loglik_full(vec({0.0}), MonotoneStepFunction({1.0}, {1.0}), data) ==
          doctest::Approx(-1.0));
    CHECK(loglik_full(vec({0.0}), MonotoneStepFunction({1.0}, {2.5}), data) ==
          doctest::Approx(-2.5));
  }
  {
    std::vector<Subject> s;
    s.push_back(subject("a", {1.0}, {1.0, 2.0}, {1, 3}));
    const Dataset data(std::move(s));
    const MonotoneStepFunction lam({1.0, 2.0}, {1.0, 2.0});
    CHECK(loglik_full(vec({0.0}), lam, data) == doctest::Approx(-2.0).epsilon(1e-12));
    const double ref = oracle::full_loglik(data, vec({0.0}), [](double t) { return t; });
    CHECK(loglik_full(vec({0.0}), lam, data) == doctest::Approx(ref).epsilon(1e-14));
  }
  {
    // dN = 1 over a flat stretch of Lambda
    std::vector<Subject> s;
    s.push_back(subject("a", {0.0}, {1.0, 2.0}, {1, 2}));
    const Dataset data(std::move(s));
    const MonotoneStepFunction lam({1.0, 2.0}, {1.0, 1.0});
    CHECK(loglik_full(vec({0.0}), lam, data) == -kInf);
  }
}

TEST_CASE("likelihoods are invariant under subject relabeling") {
  SplitMix64 rng(7);
  std::vector<Subject> subjects;
  for (int i = 0; i < 6; ++i) {
    const double t1 = rng.uniform(0.5, 2.0);
    subjects.push_back(Subject("s" + std::to_string(i), vec({rng.uniform(-1.0, 1.0)}),
                               {t1, t1 + rng.uniform(0.5, 2.0)},
                               {rng.poisson(1.0), rng.poisson(1.0) + 2}));
  }
  std::vector<Subject> shuffled = subjects;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[1], shuffled[3]);
  const Dataset d1(subjects), d2(shuffled);
  const MonotoneStepFunction lam({0.5, 2.0, 4.0}, {0.3, 1.1, 2.0});
  const Eigen::VectorXd beta = vec({0.4});
  CHECK(loglik_pseudo(beta, lam, d1) ==
        doctest::Approx(loglik_pseudo(beta, lam, d2)).epsilon(1e-13));
  const double f1 = loglik_full(beta, lam, d1);
  const double f2 = loglik_full(beta, lam, d2);
  if (std::isfinite(f1))
    CHECK(f1 == doctest::Approx(f2).epsilon(1e-13));
  else
    CHECK(f1 == f2);
}

TEST_CASE("K=1 collapses the two criteria to the same value") {
  SplitMix64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Subject> subjects;
    for (int i = 0; i < 5; ++i)
      subjects.push_back(Subject("s" + std::to_string(i), vec({rng.uniform(-1.0, 1.0)}),
                                 {rng.uniform(0.5, 3.0)}, {rng.poisson(2.0)}));
    const Dataset data(std::move(subjects));
    const MonotoneStepFunction lam = random_step(rng, 4);
    const Eigen::VectorXd beta = vec({rng.uniform(-0.5, 0.5)});
    const double ps = loglik_pseudo(beta, lam, data);
    const double fl = loglik_full(beta, lam, data);
    if (std::isfinite(ps))
      CHECK(ps == doctest::Approx(fl).epsilon(1e-13));
    else
      CHECK(fl == ps);
  }
}

TEST_CASE("metric_d1 worked examples") {
  const Dataset data = toy_dataset();
  const MonotoneStepFunction lam({1.0, 2.0}, {1.0, 2.0});
  const Theta t0{vec({0.2}), lam};
  CHECK(metric_d1(t0, t0, data) == 0.0);

  // equal lambdas, beta gap of unit length
  const Theta a{vec({1.2}), lam};
  CHECK(metric_d1(a, t0, data) == doctest::Approx(1.0));

  // constant lambda gap of 0.5 at all four observation times
  std::vector<double> shifted;
  for (double v : lam.values) shifted.push_back(v + 0.5);
  const Theta b{vec({0.2}), MonotoneStepFunction(lam.jumps, shifted)};
  CHECK(metric_d1(b, t0, data) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("metric_d2 worked examples") {
  const Dataset data = toy_dataset();
  const MonotoneStepFunction lam({1.0, 2.0}, {1.0, 2.0});
  const Theta t0{vec({0.0}), lam};
  CHECK(metric_d2(t0, t0, data) == 0.0);
  const Theta a{vec({2.0}), lam};
  CHECK(metric_d2(a, t0, data) == doctest::Approx(2.0));

  // single increment gap of 0.3 among 3 increments
  std::vector<Subject> s;
  s.push_back(subject("a", {0.0}, {1.0, 2.0}, {1, 2}));
  s.push_back(subject("b", {0.0}, {1.0}, {1}));
  const Dataset data3(std::move(s));
  const MonotoneStepFunction l0({1.0, 2.0}, {1.0, 2.0});
  const MonotoneStepFunction l1({1.0, 2.0}, {1.0, 2.3}); // only the (1,2] increment differs
  CHECK(metric_d2(Theta{vec({0.0}), l1}, Theta{vec({0.0}), l0}, data3) ==
        doctest::Approx(std::sqrt(0.09 / 3.0)).epsilon(1e-12));
}

TEST_CASE("metric_d1 satisfies the triangle inequality") {
  const Dataset data = toy_dataset();
  SplitMix64 rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const Theta a{vec({rng.uniform(-1.0, 1.0)}), random_step(rng, 3)};
    const Theta b{vec({rng.uniform(-1.0, 1.0)}), random_step(rng, 3)};
    const Theta c{vec({rng.uniform(-1.0, 1.0)}), random_step(rng, 3)};
    CHECK(metric_d1(a, c, data) <= metric_d1(a, b, data) + metric_d1(b, c, data) + 1e-12);
  }
}

TEST_CASE("value gaps are controlled by increment gaps (bounded K)") {
  // per-subject telescoping bound: d1^2 - |dbeta|^2 <= k0^2 (d2^2 - |dbeta|^2)
  SplitMix64 rng(123);
  for (int rep = 0; rep < 60; ++rep) {
    std::vector<Subject> subjects;
    int k0 = 1;
    for (int i = 0; i < 4; ++i) {
      const int k = rng.uniform_int(1, 4);
      k0 = std::max(k0, k);
      std::vector<double> times;
      std::vector<std::int64_t> counts;
      double t = 0.0;
      std::int64_t c = 0;
      for (int j = 0; j < k; ++j) {
        t += rng.uniform(0.2, 1.5);
        c += rng.poisson(1.0);
        times.push_back(t);
        counts.push_back(c);
      }
      subjects.push_back(Subject("s" + std::to_string(i), vec({0.0}), times, counts));
    }
    const Dataset data(std::move(subjects));
    const Theta a{vec({0.0}), random_step(rng, 5)};
    const Theta b{vec({0.0}), random_step(rng, 5)};
    const double d1 = metric_d1(a, b, data);
    const double d2 = metric_d2(a, b, data);
    CHECK(d1 * d1 <= static_cast<double>(k0) * k0 * d2 * d2 + 1e-12);
  }
}
