#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bgmm/quasi_posterior.hpp"
#include "bgmm/ram.hpp"
#include "bgmm/weighting.hpp"

namespace bgmm {

// When and from which parameter value the weighting matrix is rebuilt.
struct OracleStrategy {
  Eigen::VectorXd theta_true;  // empty = filled in by the harness with the DGP truth
};
struct ConcurrentStrategy {};
struct StochasticStrategy {};
struct ContinuousStrategy {};
struct RandomStrategy {
  double alpha0 = -1.0;
  // Decay rate of the adaptation probability; default -10 / j_warmup.
  std::optional<double> alpha1;
};

using AdaptationStrategy = std::variant<OracleStrategy, ConcurrentStrategy, StochasticStrategy,
                                        ContinuousStrategy, RandomStrategy>;

const char* strategy_name(const AdaptationStrategy& strategy);

struct ChainConfig {
  long j_total = 30000;
  long j_warmup = 10000;
  std::uint64_t seed = 0;
  // Default: the model's initial guess (2SLS for linear IV).
  std::optional<Eigen::VectorXd> theta_init;
  // Default: identity.
  std::optional<WeightingMatrix> w_init;
  WeightingSpec weighting;
  AdaptationStrategy strategy = RandomStrategy{};
  RamConfig proposal;

  void validate(int param_dim, Eigen::Index n_rows) const;
};

struct ChainOutput {
  Eigen::MatrixXd draws;            // j_total x L
  Eigen::MatrixXd recursive_means;  // running mean of draws up to each iteration
  std::vector<long> adaptation_times;
  std::vector<std::uint8_t> accepted;  // per iteration; any coordinate for sweeps
  double accept_rate = 0.0;
  double wall_time = 0.0;  // seconds, chain loop only
  bool failed = false;
  std::string failure_reason;
  long completed = 0;  // iterations finished (== j_total unless failed)

  Eigen::VectorXd post_warmup_draws(long j_warmup, int component = 0) const;
};

// s(j) = exp(alpha0 + alpha1 j), clamped to <= 1.
double adaptation_probability(long j, double alpha0, double alpha1);

// Adaptation coin for the random strategy. Consumes exactly one uniform
// draw during warmup; after warmup returns false without touching the rng.
bool should_adapt(long j, long j_warmup, const RandomStrategy& strategy, Rng& rng);

// mean_j = mean_{j-1} + (theta_j - mean_{j-1}) / j, j >= 1.
Eigen::VectorXd update_recursive_mean(const Eigen::VectorXd& previous_mean,
                                      const Eigen::VectorXd& theta, long j);

// Nearest-rank quantile spread of scalar draws; needs at least 2 draws.
double interquantile_range(const Eigen::VectorXd& draws, double lo, double hi);

ChainOutput run_chain(const QuasiPosterior& posterior, const ChainConfig& cfg);

}  // namespace bgmm
