#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "bgmm/config_json.hpp"
#include "bgmm/errors.hpp"
#include "bgmm/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitChainFailure = 3;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw bgmm::InputError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

std::string sidecar_path(const std::string& csv_path) {
  const auto dot = csv_path.find_last_of('.');
  const auto slash = csv_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return csv_path + ".json";
  }
  return csv_path.substr(0, dot) + ".json";
}

std::string format_cell(std::optional<double> v) {
  if (!v) return "–";  // en dash for missing values, like the tables
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

int run_simulate(const std::string& config_path, const std::string& out_path, int parallelism) {
  const auto specs = bgmm::experiments_from_json_file(config_path);
  const auto rows = bgmm::run_grid(specs, parallelism,
                                   [](const std::string& msg) { std::cerr << msg << "\n"; });
  bgmm::write_results_csv(rows, out_path);
  std::printf("%4s  %-9s %-11s %-8s %-8s %-8s %-10s\n", "K", "estimator", "strategy", "fail",
              "mse", "mae", "time[s]");
  for (const auto& row : rows) {
    std::printf("%4d  %-9s %-11s %3d/%-4d %-8s %-8s %-10.3f\n", row.k, row.estimator.c_str(),
                row.strategy.c_str(), row.fail_count, row.total, format_cell(row.mse).c_str(),
                format_cell(row.mae).c_str(), row.mean_time);
  }
  return kExitOk;
}

int run_dgp(const std::string& config_path, const std::string& out_path) {
  const bgmm::DgpConfig cfg = bgmm::dgp_config_from_json_file(config_path);
  const bgmm::DgpDraw draw = bgmm::generate_dataset(cfg);
  bgmm::save_dataset_csv(draw.data, out_path);
  const std::string sidecar = sidecar_path(out_path);
  write_text(sidecar, bgmm::ground_truth_to_json(draw));
  std::printf("wrote %s (N=%d, K=%d) and ground truth %s\n", out_path.c_str(), cfg.n, cfg.k,
              sidecar.c_str());
  return kExitOk;
}

int run_estimate(const std::string& data_path, const std::string& out_path,
                 const std::string& estimator, const std::string& strategy, int n_star,
                 int n_permutations, long draws, long warmup, std::uint64_t seed,
                 const std::string& trace_path, double true_gamma, bool have_true_gamma) {
  bgmm::EstimateRequest request;
  request.weighting.kind = bgmm::weighting_kind_from_name(estimator);
  request.weighting.n_star = n_star;
  request.weighting.n_permutations = n_permutations;
  request.j_total = draws;
  request.j_warmup = warmup;
  request.seed = seed;

  if (strategy == "oracle") {
    if (!have_true_gamma) {
      throw bgmm::InputError("--strategy oracle requires --true-gamma");
    }
    bgmm::OracleStrategy oracle;
    oracle.theta_true = Eigen::VectorXd::Constant(1, true_gamma);
    request.strategy = oracle;
  } else if (strategy == "concurrent") {
    request.strategy = bgmm::ConcurrentStrategy{};
  } else if (strategy == "stochastic") {
    request.strategy = bgmm::StochasticStrategy{};
  } else if (strategy == "continuous") {
    request.strategy = bgmm::ContinuousStrategy{};
  } else if (strategy == "random") {
    request.strategy = bgmm::RandomStrategy{};
  } else {
    throw bgmm::InputError("unknown strategy `" + strategy + "`");
  }

  const bgmm::EstimateReport report = bgmm::estimate_from_csv(data_path, request);
  if (!trace_path.empty()) bgmm::write_trace_csv(report.chain, trace_path);
  write_text(out_path, bgmm::estimate_report_to_json(report, request, data_path));

  if (report.failed) {
    std::printf("chain FAILED (%s); accept rate %.3f, %ld adaptations, %.2fs\n",
                bgmm::failure_reason_name(report.reason), report.accept_rate,
                report.n_adaptations, report.wall_time);
    return kExitChainFailure;
  }
  std::printf("posterior mean %.6f  sd %.6f  IQR %.6f\n", report.post_mean, report.post_sd,
              report.iqr);
  std::printf("accept rate %.3f, %ld weighting adaptations, %.2fs\n", report.accept_rate,
              report.n_adaptations, report.wall_time);
  std::printf("report written to %s\n", out_path.c_str());
  return kExitOk;
}

int run_profile(const std::string& config_path, const std::string& out_path, int n_permutations,
                std::uint64_t seed) {
  const bgmm::DgpConfig cfg = bgmm::dgp_config_from_json_file(config_path);
  const auto grid = bgmm::fine_profile_grid(cfg.n);
  bgmm::Rng rng(seed);
  const auto rows = bgmm::criterion_profile(cfg, grid, n_permutations, rng);
  bgmm::write_profile_csv(rows, out_path);
  std::printf("wrote %zu profile rows to %s\n", rows.size(), out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Bayesian GMM with adaptively tuned weighting matrices"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment grid");
  std::string sim_config, sim_out;
  int parallelism = static_cast<int>(std::thread::hardware_concurrency());
  if (parallelism < 1) parallelism = 1;
  simulate->add_option("--config", sim_config, "experiment JSON")->required();
  simulate->add_option("--out", sim_out, "summary CSV path")->required();
  simulate->add_option("--parallelism", parallelism, "worker threads");

  // dgp
  auto* dgp = app.add_subcommand("dgp", "Generate one synthetic dataset");
  std::string dgp_config, dgp_out;
  dgp->add_option("--config", dgp_config, "DGP JSON")->required();
  dgp->add_option("--out", dgp_out, "dataset CSV path")->required();

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate gamma from a CSV dataset");
  std::string est_data, est_out, est_trace;
  std::string estimator = "ner";
  std::string strategy = "random";
  int n_star = 0;
  int n_permutations = 50;
  long draws = 30000;
  long warmup = 10000;
  std::uint64_t seed = 0;
  double true_gamma = 0.0;
  estimate->add_option("--data", est_data, "input CSV (header y,x,z1..zK)")->required();
  estimate->add_option("--out", est_out, "report JSON path")->required();
  estimate->add_option("--estimator", estimator, "standard|pinv|ner");
  estimate->add_option("--strategy", strategy, "oracle|concurrent|stochastic|continuous|random");
  estimate->add_option("--n-star", n_star, "NER split location (default 0.6N)");
  estimate->add_option("--perms", n_permutations, "NER permutations per build");
  estimate->add_option("--draws", draws, "total MCMC draws");
  estimate->add_option("--warmup", warmup, "warmup draws");
  estimate->add_option("--seed", seed, "chain seed");
  estimate->add_option("--trace", est_trace, "per-iteration trace CSV");
  auto* tg = estimate->add_option("--true-gamma", true_gamma, "true coefficient (oracle only)");

  // ner-profile
  auto* profile = app.add_subcommand("ner-profile", "Split-criterion profile over a fine grid");
  std::string prof_config, prof_out;
  int prof_perms = 100;
  std::uint64_t prof_seed = 0;
  profile->add_option("--config", prof_config, "DGP JSON")->required();
  profile->add_option("--out", prof_out, "profile CSV path")->required();
  profile->add_option("--perms", prof_perms, "criterion draws per grid point");
  profile->add_option("--seed", prof_seed, "permutation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim_config, sim_out, parallelism);
    if (dgp->parsed()) return run_dgp(dgp_config, dgp_out);
    if (estimate->parsed()) {
      return run_estimate(est_data, est_out, estimator, strategy, n_star, n_permutations, draws,
                          warmup, seed, est_trace, true_gamma, tg->count() > 0);
    }
    if (profile->parsed()) return run_profile(prof_config, prof_out, prof_perms, prof_seed);
  } catch (const bgmm::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
