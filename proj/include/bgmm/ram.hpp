#pragma once

#include <Eigen/Dense>
#include <utility>

#include "bgmm/rng.hpp"

namespace bgmm {

// Robust adaptive Metropolis proposal settings. The scale factor is the
// lower-triangular Cholesky factor of the proposal covariance.
struct RamConfig {
  double target_accept = 0.234;
  double decay_exponent = 2.0 / 3.0;  // in (0.5, 1]
  Eigen::MatrixXd initial_scale;      // L x L lower-triangular; empty = identity

  Eigen::MatrixXd resolved_initial_scale(int dim) const;
  void validate(int dim) const;
};

// In-place rank-one Cholesky update: lower <- chol(lower lower' + u u').
void chol_update(Eigen::MatrixXd& lower, Eigen::VectorXd u);

// Rank-one downdate: lower <- chol(lower lower' - u u'). Returns false and
// leaves `lower` unspecified when the result would not be positive definite;
// callers work on a copy.
bool chol_downdate(Eigen::MatrixXd& lower, Eigen::VectorXd u);

// Adaptation step size min(1, dim * iteration^{-decay}); iteration >= 1.
double ram_step_size(int dim, long iteration, double decay_exponent);

// theta' = theta + S u with u iid standard normal; returns (theta', u).
std::pair<Eigen::VectorXd, Eigen::VectorXd> ram_propose(const Eigen::VectorXd& theta,
                                                        const Eigen::MatrixXd& scale_lower,
                                                        Rng& rng);

// Rank-one update of the scale so that S'S'' = S (I + eta (alpha - target)
// u u' / |u|^2) S'. A failed downdate keeps the previous scale and sets
// *skipped when provided.
Eigen::MatrixXd ram_adapt(const Eigen::MatrixXd& scale_lower, const Eigen::VectorXd& u,
                          double accept_prob, long iteration, const RamConfig& cfg,
                          bool* skipped = nullptr);

}  // namespace bgmm
