#include "bgmm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "bgmm/errors.hpp"
#include "bgmm/moment_model.hpp"

namespace bgmm {

void ExperimentSpec::validate() const {
  dgp.validate();
  if (replications < 1) throw InputError("need at least one replication");
  if (!(j_warmup > 0 && j_warmup < j_total)) throw InputError("need 0 < j_warmup < j_total");
}

const char* failure_reason_name(FailureReason reason) {
  switch (reason) {
    case FailureReason::kNone:
      return "none";
    case FailureReason::kIqrHigh:
      return "iqr_high";
    case FailureReason::kIqrLow:
      return "iqr_low";
    case FailureReason::kNumerical:
      return "numerical";
  }
  return "?";
}

namespace {

double sample_sd(const Eigen::VectorXd& values) {
  const double mean = values.mean();
  if (values.size() < 2) return 0.0;
  return std::sqrt((values.array() - mean).square().sum() /
                   static_cast<double>(values.size() - 1));
}

ReplicationResult summarize_chain(const ChainOutput& chain, long j_warmup,
                                  const FailureRule& rule) {
  ReplicationResult res;
  res.wall_time = chain.wall_time;
  res.accept_rate = chain.accept_rate;
  res.n_adaptations = static_cast<long>(chain.adaptation_times.size());
  if (chain.failed) {
    res.failed = true;
    res.reason = FailureReason::kNumerical;
    return res;
  }
  const Eigen::VectorXd draws = chain.post_warmup_draws(j_warmup);
  res.post_mean = draws.mean();
  res.post_sd = sample_sd(draws);
  res.iqr = interquantile_range(draws, rule.q_lo, rule.q_hi);
  if (rule.failed_high(res.iqr)) {
    res.failed = true;
    res.reason = FailureReason::kIqrHigh;
  } else if (rule.failed_low(res.iqr)) {
    res.failed = true;
    res.reason = FailureReason::kIqrLow;
  }
  return res;
}

}  // namespace

ReplicationResult run_replication(const ExperimentSpec& spec, int replication) {
  spec.validate();
  ReplicationResult res;
  res.replication = replication;
  try {
    DgpConfig dgp_cfg = spec.dgp;
    dgp_cfg.seed = mix_seed(spec.master_seed, 2 * static_cast<std::uint64_t>(replication));
    const DgpDraw draw = generate_dataset(dgp_cfg);

    LinearIVModel model(dgp_cfg.k);
    QuasiPosterior posterior(model, draw.data);

    ChainConfig chain_cfg;
    chain_cfg.j_total = spec.j_total;
    chain_cfg.j_warmup = spec.j_warmup;
    chain_cfg.seed = mix_seed(spec.master_seed, 2 * static_cast<std::uint64_t>(replication) + 1);
    chain_cfg.weighting = spec.weighting;
    chain_cfg.proposal = spec.proposal;
    chain_cfg.strategy = spec.strategy;
    if (auto* oracle = std::get_if<OracleStrategy>(&chain_cfg.strategy);
        oracle != nullptr && oracle->theta_true.size() == 0) {
      oracle->theta_true = Eigen::VectorXd::Constant(1, draw.gamma_true);
    }
    chain_cfg.theta_init = model.initial_guess(draw.data);

    const ChainOutput chain = run_chain(posterior, chain_cfg);
    ReplicationResult summarized = summarize_chain(chain, spec.j_warmup, spec.failure);
    summarized.replication = replication;
    return summarized;
  } catch (const std::exception&) {
    res.failed = true;
    res.reason = FailureReason::kNumerical;
    return res;
  }
}

SummaryRow aggregate(const std::vector<ReplicationResult>& results, double gamma_true) {
  if (results.empty()) throw InputError("cannot aggregate zero replications");
  SummaryRow row;
  row.total = static_cast<int>(results.size());
  double sq_sum = 0.0;
  double abs_sum = 0.0;
  double time_sum = 0.0;
  int ok = 0;
  for (const auto& r : results) {
    time_sum += r.wall_time;
    if (r.failed) {
      ++row.fail_count;
      continue;
    }
    const double err = r.post_mean - gamma_true;
    sq_sum += err * err;
    abs_sum += std::abs(err);
    ++ok;
  }
  row.mean_time = time_sum / static_cast<double>(row.total);
  if (ok > 0) {
    row.mse = sq_sum / static_cast<double>(ok);
    row.mae = abs_sum / static_cast<double>(ok);
  }
  return row;
}

std::vector<ReplicationResult> run_experiment(const ExperimentSpec& spec, int parallelism,
                                              const ProgressFn& progress) {
  spec.validate();
  const int total = spec.replications;
  std::vector<ReplicationResult> results(static_cast<std::size_t>(total));
  const int workers = std::max(1, std::min(parallelism, total));

  if (workers == 1) {
    for (int r = 0; r < total; ++r) {
      results[static_cast<std::size_t>(r)] = run_replication(spec, r);
    }
  } else {
    std::atomic<int> next{0};
    auto work = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= total) return;
        try {
          results[static_cast<std::size_t>(r)] = run_replication(spec, r);
        } catch (...) {
          ReplicationResult failed;
          failed.replication = r;
          failed.failed = true;
          failed.reason = FailureReason::kNumerical;
          results[static_cast<std::size_t>(r)] = failed;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (progress) {
    int failed = 0;
    for (const auto& r : results) failed += r.failed ? 1 : 0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: %d/%d replications done, %d failed",
                  spec.label.empty() ? "cell" : spec.label.c_str(), total, total, failed);
    progress(buf);
  }
  return results;
}

std::vector<SummaryRow> run_grid(const std::vector<ExperimentSpec>& specs, int parallelism,
                                 const ProgressFn& progress) {
  if (specs.empty()) throw InputError("experiment grid is empty");
  std::vector<SummaryRow> rows;
  rows.reserve(specs.size());
  for (const auto& spec : specs) {
    const auto results = run_experiment(spec, parallelism, progress);
    SummaryRow row = aggregate(results, spec.dgp.gamma);
    row.k = spec.dgp.k;
    row.estimator = weighting_kind_name(spec.weighting.kind);
    row.strategy = strategy_name(spec.strategy);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double nearest_rank(std::vector<double>& values, double p) {
  std::sort(values.begin(), values.end());
  auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size())));
  idx = std::clamp<std::size_t>(idx, 1, values.size());
  return values[idx - 1];
}

}  // namespace

std::vector<ProfileRow> criterion_profile(const DgpConfig& cfg, const std::vector<int>& grid,
                                          int n_permutations, Rng& rng) {
  if (grid.empty()) throw InputError("profile grid is empty");
  if (n_permutations < 1) throw InputError("n_permutations must be >= 1");
  const DgpDraw draw = generate_dataset(cfg);
  LinearIVModel model(cfg.k);
  const Eigen::VectorXd theta_true = Eigen::VectorXd::Constant(1, draw.gamma_true);
  const Eigen::MatrixXd moments = model.moment_matrix(draw.data, theta_true);

  std::vector<ProfileRow> rows;
  rows.reserve(grid.size());
  for (int n_star : grid) {
    if (n_star < 2 || n_star > cfg.n - 2) {
      throw InputError("profile grid entry " + std::to_string(n_star) + " outside [2, N-2]");
    }
    std::vector<double> values(static_cast<std::size_t>(n_permutations));
    for (auto& g : values) {
      g = split_criterion_with_permutations(moments, n_star,
                                            {rng.permutation(cfg.n)});
    }
    ProfileRow row;
    row.n_star = n_star;
    row.median = nearest_rank(values, 0.5);
    row.p05 = nearest_rank(values, 0.05);
    row.p95 = nearest_rank(values, 0.95);
    rows.push_back(row);
  }
  return rows;
}

std::vector<int> fine_profile_grid(int n_rows) {
  std::vector<int> grid;
  for (int step = 2; step <= 18; ++step) {
    const int v = static_cast<int>(std::lround(0.05 * step * n_rows));
    if (v >= 2 && v <= n_rows - 2 &&
        std::find(grid.begin(), grid.end(), v) == grid.end()) {
      grid.push_back(v);
    }
  }
  return grid;
}

EstimateReport estimate_dataset(const Dataset& data, const EstimateRequest& request) {
  data.validate();
  LinearIVModel model(static_cast<int>(data.n_instruments()));
  QuasiPosterior posterior(model, data);

  ChainConfig cfg;
  cfg.j_total = request.j_total;
  cfg.j_warmup = request.j_warmup;
  cfg.seed = request.seed;
  cfg.weighting = request.weighting;
  cfg.strategy = request.strategy;
  cfg.proposal = request.proposal;
  cfg.theta_init = model.initial_guess(data);

  EstimateReport report;
  report.chain = run_chain(posterior, cfg);
  ReplicationResult summary = summarize_chain(report.chain, request.j_warmup, request.failure);
  report.post_mean = summary.post_mean;
  report.post_sd = summary.post_sd;
  report.iqr = summary.iqr;
  report.failed = summary.failed;
  report.reason = summary.reason;
  report.accept_rate = summary.accept_rate;
  report.n_adaptations = summary.n_adaptations;
  report.wall_time = summary.wall_time;
  return report;
}

EstimateReport estimate_from_csv(const std::string& csv_path, const EstimateRequest& request) {
  return estimate_dataset(load_dataset_csv(csv_path), request);
}

void write_trace_csv(const ChainOutput& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  const Eigen::Index dim = chain.draws.cols();
  out << "iteration";
  for (Eigen::Index c = 0; c < dim; ++c) out << ",theta" << (c + 1);
  out << ",accepted,adapted\n";
  std::vector<std::uint8_t> adapted(static_cast<std::size_t>(chain.draws.rows()), 0);
  for (long t : chain.adaptation_times) {
    if (t >= 0 && t < chain.draws.rows()) adapted[static_cast<std::size_t>(t)] = 1;
  }
  char buf[32];
  for (long j = 0; j < chain.completed; ++j) {
    out << j;
    for (Eigen::Index c = 0; c < dim; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", chain.draws(j, c));
      out << ',' << buf;
    }
    out << ',' << static_cast<int>(chain.accepted[static_cast<std::size_t>(j)]) << ','
        << static_cast<int>(adapted[static_cast<std::size_t>(j)]) << "\n";
  }
}

void write_results_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "K,estimator,strategy,fail,total,mse,mae,mean_time_s\n";
  char buf[32];
  auto put = [&](std::optional<double> v) {
    if (v) {
      std::snprintf(buf, sizeof(buf), "%.17g", *v);
      out << buf;
    }
  };
  for (const auto& row : rows) {
    out << row.k << ',' << row.estimator << ',' << row.strategy << ',' << row.fail_count << ','
        << row.total << ',';
    put(row.mse);
    out << ',';
    put(row.mae);
    std::snprintf(buf, sizeof(buf), "%.6f", row.mean_time);
    out << ',' << buf << "\n";
  }
}

void write_profile_csv(const std::vector<ProfileRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "n_star,median_g,p05_g,p95_g\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const auto& row : rows) {
    out << row.n_star << ',';
    put(row.median);
    out << ',';
    put(row.p05);
    out << ',';
    put(row.p95);
    out << "\n";
  }
}

}  // namespace bgmm
