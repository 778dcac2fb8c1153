#include "bgmm/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "bgmm/errors.hpp"

namespace bgmm {

const char* strategy_name(const AdaptationStrategy& strategy) {
  struct Visitor {
    const char* operator()(const OracleStrategy&) const { return "oracle"; }
    const char* operator()(const ConcurrentStrategy&) const { return "concurrent"; }
    const char* operator()(const StochasticStrategy&) const { return "stochastic"; }
    const char* operator()(const ContinuousStrategy&) const { return "continuous"; }
    const char* operator()(const RandomStrategy&) const { return "random"; }
  };
  return std::visit(Visitor{}, strategy);
}

void ChainConfig::validate(int param_dim, Eigen::Index n_rows) const {
  if (!(j_warmup > 0 && j_warmup < j_total)) {
    throw InputError("need 0 < j_warmup < j_total");
  }
  proposal.validate(param_dim);
  weighting.validate(n_rows);
  if (theta_init && theta_init->size() != param_dim) {
    throw InputError("theta_init has the wrong length");
  }
  if (const auto* random = std::get_if<RandomStrategy>(&strategy)) {
    const double alpha1 = random->alpha1.value_or(-10.0 / static_cast<double>(j_warmup));
    if (alpha1 > 0.0) {
      throw InputError("random strategy needs alpha1 <= 0 so adaptation diminishes");
    }
  }
}

double adaptation_probability(long j, double alpha0, double alpha1) {
  if (j < 0) throw InputError("iteration index must be >= 0");
  return std::min(1.0, std::exp(alpha0 + alpha1 * static_cast<double>(j)));
}

bool should_adapt(long j, long j_warmup, const RandomStrategy& strategy, Rng& rng) {
  if (j >= j_warmup) return false;
  const double alpha1 = strategy.alpha1.value_or(-10.0 / static_cast<double>(j_warmup));
  return rng.uniform() < adaptation_probability(j, strategy.alpha0, alpha1);
}

Eigen::VectorXd update_recursive_mean(const Eigen::VectorXd& previous_mean,
                                      const Eigen::VectorXd& theta, long j) {
  if (j < 1) throw InputError("recursive mean needs j >= 1");
  return previous_mean + (theta - previous_mean) / static_cast<double>(j);
}

double interquantile_range(const Eigen::VectorXd& draws, double lo, double hi) {
  if (draws.size() < 2) throw InputError("interquantile range needs at least 2 draws");
  if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
    throw InputError("quantiles must satisfy 0 < lo < hi < 1");
  }
  std::vector<double> sorted(draws.data(), draws.data() + draws.size());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  auto nearest_rank = [&](double p) {
    auto idx = static_cast<std::size_t>(std::ceil(p * n));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size());
    return sorted[idx - 1];
  };
  return nearest_rank(hi) - nearest_rank(lo);
}

Eigen::VectorXd ChainOutput::post_warmup_draws(long j_warmup, int component) const {
  return draws.col(component).segment(j_warmup, draws.rows() - j_warmup);
}

ChainOutput run_chain(const QuasiPosterior& posterior, const ChainConfig& cfg) {
  const int dim = posterior.param_dim();
  const Eigen::Index k = posterior.moment_dim();
  const double n = static_cast<double>(posterior.sample_size());
  cfg.validate(dim, posterior.sample_size());

  ChainOutput out;
  out.draws = Eigen::MatrixXd::Zero(cfg.j_total, dim);
  out.recursive_means = Eigen::MatrixXd::Zero(cfg.j_total, dim);
  out.accepted.assign(static_cast<std::size_t>(cfg.j_total), 0);

  // Independent sub-streams keep proposal randomness aligned across
  // strategies regardless of how often adaptation coins or permutations
  // are consumed.
  Rng proposal_rng(mix_seed(cfg.seed, 1));
  Rng adaptation_rng(mix_seed(cfg.seed, 2));
  Rng weighting_rng(mix_seed(cfg.seed, 3));

  const bool is_concurrent = std::holds_alternative<ConcurrentStrategy>(cfg.strategy);
  const bool is_stochastic = std::holds_alternative<StochasticStrategy>(cfg.strategy);
  const bool is_continuous = std::holds_alternative<ContinuousStrategy>(cfg.strategy);
  const auto* random_strategy = std::get_if<RandomStrategy>(&cfg.strategy);

  long accept_events = 0;
  long decisions = 0;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Eigen::VectorXd theta =
        cfg.theta_init ? *cfg.theta_init : posterior.model().initial_guess(posterior.data());
    WeightingMatrix w = cfg.w_init ? *cfg.w_init : identity_weighting(k);
    if (w.mat.rows() != k || w.mat.cols() != k) {
      throw InputError("w_init dimension does not match the moment dimension");
    }

    auto rebuild = [&](const Eigen::VectorXd& at, long j) {
      w = build_weighting(posterior.model().moment_matrix(posterior.data(), at), cfg.weighting,
                          weighting_rng);
      out.adaptation_times.push_back(j);
    };

    if (const auto* oracle = std::get_if<OracleStrategy>(&cfg.strategy)) {
      if (oracle->theta_true.size() != dim) {
        throw InputError("oracle strategy needs theta_true of the model's dimension");
      }
      rebuild(oracle->theta_true, 0);
    }

    Eigen::VectorXd mbar = posterior.moment_mean_at(theta);
    double q_cur = QuasiPosterior::quadratic_form(mbar, w);
    double lp_cur = posterior.log_prior(theta);

    Eigen::MatrixXd scale = cfg.proposal.resolved_initial_scale(dim);
    Eigen::VectorXd coord_scales = scale.diagonal();
    Eigen::VectorXd rmean = Eigen::VectorXd::Zero(dim);

    for (long j = 0; j < cfg.j_total; ++j) {
      const bool warm = j < cfg.j_warmup;
      const Eigen::VectorXd mean_point = (j == 0) ? theta : rmean;

      if (random_strategy != nullptr && warm) {
        if (should_adapt(j, cfg.j_warmup, *random_strategy, adaptation_rng)) {
          rebuild(mean_point, j);
          q_cur = QuasiPosterior::quadratic_form(mbar, w);
        }
      } else if (is_continuous) {
        rebuild(mean_point, j);
        q_cur = QuasiPosterior::quadratic_form(mbar, w);
      }

      bool any_accept = false;
      if (is_stochastic) {
        for (int l = 0; l < dim; ++l) {
          rebuild(theta, j);
          q_cur = QuasiPosterior::quadratic_form(mbar, w);
          const double innovation = proposal_rng.normal();
          Eigen::VectorXd proposed = theta;
          proposed(l) += coord_scales(l) * innovation;
          const Eigen::VectorXd mbar_prop = posterior.moment_mean_at(proposed);
          const double q_prop = QuasiPosterior::quadratic_form(mbar_prop, w);
          const double lp_prop = posterior.log_prior(proposed);
          const double log_r = -0.5 * n * (q_prop - q_cur) + (lp_prop - lp_cur);
          const double alpha = std::isnan(log_r) ? 0.0 : std::min(1.0, std::exp(log_r));
          const double u_accept = proposal_rng.uniform();
          ++decisions;
          if (std::log(u_accept) < log_r) {
            theta = proposed;
            mbar = mbar_prop;
            q_cur = q_prop;
            lp_cur = lp_prop;
            ++accept_events;
            any_accept = true;
          }
          if (warm) {
            const double eta = ram_step_size(1, j + 1, cfg.proposal.decay_exponent);
            coord_scales(l) *= std::sqrt(1.0 + eta * (alpha - cfg.proposal.target_accept));
          }
        }
      } else {
        auto [proposed, innovation] = ram_propose(theta, scale, proposal_rng);
        const Eigen::VectorXd mbar_prop = posterior.moment_mean_at(proposed);
        const double lp_prop = posterior.log_prior(proposed);
        double q_prop;
        double log_r;
        WeightingMatrix w_prop;
        if (is_concurrent) {
          w_prop = build_weighting(posterior.model().moment_matrix(posterior.data(), proposed),
                                   cfg.weighting, weighting_rng);
          out.adaptation_times.push_back(j);
          if (!w.log_det || !w_prop.log_det) {
            throw NumericalError("concurrent strategy needs defined log-determinants");
          }
          q_prop = QuasiPosterior::quadratic_form(mbar_prop, w_prop);
          log_r = 0.5 * (*w_prop.log_det - *w.log_det) - 0.5 * n * (q_prop - q_cur) +
                  (lp_prop - lp_cur);
        } else {
          q_prop = QuasiPosterior::quadratic_form(mbar_prop, w);
          log_r = -0.5 * n * (q_prop - q_cur) + (lp_prop - lp_cur);
        }
        const double alpha = std::isnan(log_r) ? 0.0 : std::min(1.0, std::exp(log_r));
        const double u_accept = proposal_rng.uniform();
        ++decisions;
        if (std::log(u_accept) < log_r) {
          theta = std::move(proposed);
          mbar = mbar_prop;
          q_cur = q_prop;
          lp_cur = lp_prop;
          if (is_concurrent) w = std::move(w_prop);
          ++accept_events;
          any_accept = true;
        }
        if (warm && innovation.squaredNorm() > 0.0) {
          scale = ram_adapt(scale, innovation, alpha, j + 1, cfg.proposal);
        }
      }

      out.draws.row(j) = theta.transpose();
      rmean = update_recursive_mean(rmean, theta, j + 1);
      out.recursive_means.row(j) = rmean.transpose();
      out.accepted[static_cast<std::size_t>(j)] = any_accept ? 1 : 0;
      out.completed = j + 1;
    }
  } catch (const NumericalError& e) {
    out.failed = true;
    out.failure_reason = e.what();
  }
  out.accept_rate =
      decisions > 0 ? static_cast<double>(accept_events) / static_cast<double>(decisions) : 0.0;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace bgmm
