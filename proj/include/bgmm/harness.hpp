#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bgmm/dgp.hpp"
#include "bgmm/sampler.hpp"

namespace bgmm {

// A run fails when the post-warmup spread is implausibly large or degenerate
// (strict inequalities on both sides).
struct FailureRule {
  double q_lo = 0.25;
  double q_hi = 0.75;
  double min_iqr = 0.01;
  double max_iqr = 1.0;

  bool failed_high(double iqr) const { return iqr > max_iqr; }
  bool failed_low(double iqr) const { return iqr < min_iqr; }
};

// One Monte Carlo cell: DGP scenario x estimator x adaptation strategy.
struct ExperimentSpec {
  DgpConfig dgp;
  WeightingSpec weighting;
  AdaptationStrategy strategy = RandomStrategy{};
  long j_total = 30000;
  long j_warmup = 10000;
  RamConfig proposal;
  FailureRule failure;
  int replications = 500;
  std::uint64_t master_seed = 0;
  std::string label;

  void validate() const;
};

enum class FailureReason { kNone, kIqrHigh, kIqrLow, kNumerical };

const char* failure_reason_name(FailureReason reason);

struct ReplicationResult {
  int replication = 0;
  bool failed = false;
  FailureReason reason = FailureReason::kNone;
  double post_mean = 0.0;
  double post_sd = 0.0;
  double iqr = 0.0;
  double wall_time = 0.0;
  double accept_rate = 0.0;
  long n_adaptations = 0;
};

struct SummaryRow {
  int k = 0;
  std::string estimator;
  std::string strategy;
  int fail_count = 0;
  int total = 0;
  std::optional<double> mse;  // empty when every run failed
  std::optional<double> mae;
  double mean_time = 0.0;  // over all runs, failed included
};

// Dataset and chain seeds are derived from (master_seed, replication), so a
// replication is reproducible in isolation. Numerical failures are recorded,
// never thrown. Wall time covers the chain only.
ReplicationResult run_replication(const ExperimentSpec& spec, int replication);

// Fail count, MSE/MAE over non-failed runs, mean time over all runs.
SummaryRow aggregate(const std::vector<ReplicationResult>& results, double gamma_true);

using ProgressFn = std::function<void(const std::string&)>;

// All replications of one cell, optionally across a worker pool. Results are
// identical to serial execution regardless of parallelism.
std::vector<ReplicationResult> run_experiment(const ExperimentSpec& spec, int parallelism,
                                              const ProgressFn& progress = nullptr);

// Cells are processed in order; errors in a worker are isolated to its
// replication (counted as numerical failures). Throws on an empty grid.
std::vector<SummaryRow> run_grid(const std::vector<ExperimentSpec>& specs, int parallelism,
                                 const ProgressFn& progress = nullptr);

struct ProfileRow {
  int n_star = 0;
  double median = 0.0;
  double p05 = 0.0;
  double p95 = 0.0;
};

// Distribution of the single-permutation split criterion at the true
// parameter: per grid point, n_permutations independent realizations of
// ||Sigma_NER - Sigma_2||_F^2, summarized by median and 5th/95th percentiles.
std::vector<ProfileRow> criterion_profile(const DgpConfig& cfg, const std::vector<int>& grid,
                                          int n_permutations, Rng& rng);

// Fine grid {0.1N, 0.15N, ..., 0.9N}, rounded to nearest integers.
std::vector<int> fine_profile_grid(int n_rows);

struct EstimateRequest {
  WeightingSpec weighting;
  AdaptationStrategy strategy = RandomStrategy{};
  long j_total = 30000;
  long j_warmup = 10000;
  RamConfig proposal;
  FailureRule failure;
  std::uint64_t seed = 0;
};

struct EstimateReport {
  double post_mean = 0.0;
  double post_sd = 0.0;
  double iqr = 0.0;
  bool failed = false;
  FailureReason reason = FailureReason::kNone;
  double accept_rate = 0.0;
  long n_adaptations = 0;
  double wall_time = 0.0;
  ChainOutput chain;  // kept for traces
};

// Single estimation on a loaded dataset; the chain is initialized at the
// 2SLS estimate (0 when degenerate).
EstimateReport estimate_dataset(const Dataset& data, const EstimateRequest& request);

// CSV front end; schema errors surface as InputError naming the column.
EstimateReport estimate_from_csv(const std::string& csv_path, const EstimateRequest& request);

// Per-chain trace: iteration, theta components, accepted flag, adapted flag.
void write_trace_csv(const ChainOutput& chain, const std::string& path);

void write_results_csv(const std::vector<SummaryRow>& rows, const std::string& path);
void write_profile_csv(const std::vector<ProfileRow>& rows, const std::string& path);

}  // namespace bgmm
