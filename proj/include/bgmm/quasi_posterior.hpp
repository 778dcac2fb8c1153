#pragma once

#include <Eigen/Dense>
#include <functional>

#include "bgmm/dataset.hpp"
#include "bgmm/moment_model.hpp"
#include "bgmm/weighting.hpp"

namespace bgmm {

// Log prior density up to a constant; the default flat prior returns 0.
using LogPrior = std::function<double(const Eigen::VectorXd&)>;

// GMM quasi-likelihood of a moment model on a dataset, plus the
// Metropolis-Hastings log-ratios used by the adaptation strategies.
// Non-owning views; pure and reentrant.
class QuasiPosterior {
 public:
  QuasiPosterior(const MomentModel& model, const Dataset& data, LogPrior prior = nullptr);

  const MomentModel& model() const { return *model_; }
  const Dataset& data() const { return *data_; }
  Eigen::Index sample_size() const { return data_->n_rows(); }
  int param_dim() const { return model_->param_dim(); }
  int moment_dim() const { return model_->moment_dim(); }

  Eigen::VectorXd moment_mean_at(const Eigen::VectorXd& theta) const;
  double log_prior(const Eigen::VectorXd& theta) const;

  // Q(theta, W) = mbar' W mbar.
  double gmm_quadratic(const Eigen::VectorXd& theta, const WeightingMatrix& w) const;

  // -(K/2) log(2 pi / N) + (1/2) log det W - (N/2) Q. Needs a defined log_det.
  double log_quasi_likelihood(const Eigen::VectorXd& theta, const WeightingMatrix& w) const;

  // -(N/2) [Q(proposed) - Q(current)] + log p(proposed) - log p(current);
  // determinant terms cancel because W is common to both states.
  double log_mh_ratio_fixed_w(const Eigen::VectorXd& proposed, const Eigen::VectorXd& current,
                              const WeightingMatrix& w) const;

  // Concurrent update: both states carry their own W, so the determinant
  // terms survive. Throws NumericalError when either log_det is undefined.
  double log_mh_ratio_concurrent(const Eigen::VectorXd& proposed, const Eigen::VectorXd& current,
                                 const WeightingMatrix& w_proposed,
                                 const WeightingMatrix& w_current) const;

  // Single-coordinate update with W held at the pre-update state; same
  // formula as the fixed-W ratio. The states may differ in one coordinate.
  double log_mh_ratio_stochastic(const Eigen::VectorXd& proposed, const Eigen::VectorXd& current,
                                 const WeightingMatrix& w_current) const;

  static double quadratic_form(const Eigen::VectorXd& mbar, const WeightingMatrix& w);

 private:
  const MomentModel* model_;
  const Dataset* data_;
  LogPrior prior_;
};

}  // namespace bgmm
