#include "pcmean/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pcmean/csv_io.hpp"
#include "pcmean/inference.hpp"
#include "pcmean/simulate.hpp"

namespace pcm {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
  f << text;
}

void print_matrix(std::ostringstream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << (c ? " " : "") << fmt("%.6f", m(r, c));
    os << "\n";
  }
}

void print_summary(std::ostringstream& os, const char* name, const McSummary& s) {
  os << "estimator " << name << "\n";
  os << "reps_used " << s.reps_used << "\n";
  os << "nonconverged " << s.nonconverged << "\n";
  for (std::size_t j = 0; j < s.coef.size(); ++j) {
    const CoefSummary& c = s.coef[j];
    os << "coef " << (j + 1) << " bias " << fmt("%.9g", c.bias) << " sd "
       << (c.sd ? fmt("%.9g", *c.sd) : std::string("NA")) << " mse " << fmt("%.9g", c.mse)
       << " ase " << fmt("%.9g", c.ase) << "\n";
  }
}

void print_envelope(std::ostringstream& os, const char* name,
                    const std::vector<MonotoneStepFunction>& lambdas) {
  const std::vector<double> grid = envelope_grid();
  for (const EnvelopeRow& row : lambda_envelope(lambdas, grid))
    os << "envelope " << name << " " << fmt("%.9g", row.t) << " " << fmt("%.9g", row.mean)
       << " " << fmt("%.9g", row.lo) << " " << fmt("%.9g", row.hi) << "\n";
}

int run_fit(const std::string& csv_path, const std::string& method, double eta, int bootstrap_b,
            std::uint64_t seed, bool increments, int threads, const std::string& out_path,
            std::ostream& out) {
  std::ifstream f(csv_path);
  if (!f) throw std::runtime_error("cannot open file '" + csv_path + "'");
  const Dataset data = parse_csv(f, increments);

  FitConfig cfg;
  cfg.eta = eta;
  const FitResult result = method == "mple"
                               ? fit_mple(data, Eigen::VectorXd::Zero(data.d()), cfg)
                               : fit_mle(data, cfg);
  std::ostringstream os;
  os << "method " << method << "\n";
  os << "n_subjects " << data.n() << "\n";
  if (bootstrap_b > 0) {
    const BootstrapResult boot =
        bootstrap_se(data, method == "mple" ? Method::Mple : Method::Mle, bootstrap_b, seed,
                     cfg, threads);
    os << write_fit(result, &boot);
  } else {
    os << write_fit(result);
  }
  emit(os.str(), out_path, out);
  return 0;
}

int run_simulate(const ScenarioConfig& config, const std::string& method,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
  const McResult mc = monte_carlo(config);
  // wall-clock timings go to the diagnostic stream so the result document is
  // byte-identical across reruns
  err << "mean_runtime_sec mple " << fmt("%.3g", mc.mple.mean_runtime_sec) << " mle "
      << fmt("%.3g", mc.mle.mean_runtime_sec) << "\n";
  std::ostringstream os;
  os << "scenario " << config.scenario << "\n";
  os << "n " << config.n << "\n";
  os << "reps " << config.reps << "\n";
  os << "seed " << config.seed << "\n";
  os << "beta0";
  for (Eigen::Index j = 0; j < config.beta0.size(); ++j)
    os << " " << fmt("%.9g", config.beta0[j]);
  os << "\n";
  if (method != "mle") print_summary(os, "mple", mc.mple);
  if (method != "mple") print_summary(os, "mle", mc.mle);
  if (method != "mle") print_envelope(os, "mple", mc.mple_lambdas);
  if (method != "mple") print_envelope(os, "mle", mc.mle_lambdas);
  emit(os.str(), out_path, out);
  return 0;
}

int run_asymcov(int scenario, const std::vector<double>& beta, std::ostream& out) {
  Eigen::VectorXd beta0(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) beta0[j] = beta[j];
  const ScenarioCov cov = scenario == 1 ? scenario1_cov(beta0) : scenario2_cov(beta0);
  std::ostringstream os;
  os << "scenario " << scenario << "\n";
  os << "beta";
  for (double b : beta) os << " " << fmt("%.9g", b);
  os << "\n";
  os << "Sigma_ps\n";
  print_matrix(os, cov.sigma_ps);
  os << "Sigma\n";
  print_matrix(os, cov.sigma);
  out << os.str();
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semiparametric estimation of the proportional mean model for panel count data"};
  app.require_subcommand(1);

  // fit
  std::string csv_path, fit_method = "mple", fit_out;
  double fit_eta = 1e-10;
  int bootstrap_b = 0, fit_threads = 0;
  std::uint64_t fit_seed = 0;
  bool increments = false;
  CLI::App* fit = app.add_subcommand("fit", "fit the model to a panel-count CSV file");
  fit->add_option("csv", csv_path, "input CSV (subject_id,time,count,z1,...,zd)")->required();
  fit->add_option("--method", fit_method, "estimator: mple or mle")
      ->check(CLI::IsMember({"mple", "mle"}));
  fit->add_option("--eta", fit_eta, "relative-change convergence tolerance");
  fit->add_option("--bootstrap", bootstrap_b, "bootstrap replicates for SEs (paper uses 200)");
  fit->add_option("--seed", fit_seed, "bootstrap resampling seed");
  fit->add_option("--threads", fit_threads, "worker threads (0 = hardware)");
  fit->add_option("--out", fit_out, "write the report to a file instead of stdout");
  fit->add_flag("--increments", increments, "count column holds per-interval counts");

  // simulate
  ScenarioConfig config;
  std::string sim_method = "both", sim_out;
  std::vector<double> sim_beta0{-1.0, 0.5, 1.5};
  CLI::App* sim = app.add_subcommand("simulate", "run a Monte Carlo study for a scenario");
  sim->add_option("--scenario", config.scenario, "1 = conditional Poisson, 2 = mixed Poisson")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  sim->add_option("--n", config.n, "subjects per replicate");
  sim->add_option("--reps", config.reps, "replicate count");
  sim->add_option("--seed", config.seed, "master seed");
  sim->add_option("--eta", config.fit.eta, "fit tolerance (Monte Carlo default 1e-6)");
  sim->add_option("--threads", config.threads, "worker threads (0 = hardware)");
  sim->add_option("--method", sim_method, "which summaries to print")
      ->check(CLI::IsMember({"mple", "mle", "both"}));
  sim->add_option("--beta", sim_beta0, "true beta, comma separated")->delimiter(',');
  sim->add_option("--out", sim_out, "write the report to a file instead of stdout");

  // asymcov
  int cov_scenario = 1;
  std::vector<double> cov_beta{-1.0, 0.5, 1.5};
  CLI::App* cov = app.add_subcommand("asymcov", "print the analytic asymptotic covariances");
  cov->add_option("--scenario", cov_scenario, "1 or 2")->check(CLI::IsMember({1, 2}));
  cov->add_option("--beta", cov_beta, "beta at which to evaluate, comma separated")
      ->delimiter(',');

  std::vector<const char*> argv;
  argv.push_back("pcmean");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (fit->parsed())
      return run_fit(csv_path, fit_method, fit_eta, bootstrap_b, fit_seed, increments,
                     fit_threads, fit_out, out);
    if (sim->parsed()) {
      if (sim_beta0.size() != 3) throw std::invalid_argument("--beta needs three components");
      config.beta0.resize(3);
      for (int j = 0; j < 3; ++j) config.beta0[j] = sim_beta0[j];
      return run_simulate(config, sim_method, sim_out, out, err);
    }
    return run_asymcov(cov_scenario, cov_beta, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pcm
