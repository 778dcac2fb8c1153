#include "bgmm/quasi_posterior.hpp"

#include <cmath>
#include <numbers>

#include "bgmm/errors.hpp"

namespace bgmm {

QuasiPosterior::QuasiPosterior(const MomentModel& model, const Dataset& data, LogPrior prior)
    : model_(&model), data_(&data), prior_(std::move(prior)) {
  data.validate();
}

Eigen::VectorXd QuasiPosterior::moment_mean_at(const Eigen::VectorXd& theta) const {
  return moment_mean(model_->moment_matrix(*data_, theta));
}

double QuasiPosterior::log_prior(const Eigen::VectorXd& theta) const {
  return prior_ ? prior_(theta) : 0.0;
}

double QuasiPosterior::quadratic_form(const Eigen::VectorXd& mbar, const WeightingMatrix& w) {
  if (w.mat.rows() != mbar.size() || w.mat.cols() != mbar.size()) {
    throw InputError("weighting matrix dimension does not match the moment dimension");
  }
  return mbar.dot(w.mat * mbar);
}

double QuasiPosterior::gmm_quadratic(const Eigen::VectorXd& theta,
                                     const WeightingMatrix& w) const {
  return quadratic_form(moment_mean_at(theta), w);
}

double QuasiPosterior::log_quasi_likelihood(const Eigen::VectorXd& theta,
                                            const WeightingMatrix& w) const {
  if (!w.log_det) {
    throw NumericalError("log quasi-likelihood needs a defined log-determinant");
  }
  const double n = static_cast<double>(sample_size());
  const double k = static_cast<double>(moment_dim());
  return -0.5 * k * std::log(2.0 * std::numbers::pi / n) + 0.5 * *w.log_det -
         0.5 * n * gmm_quadratic(theta, w);
}

double QuasiPosterior::log_mh_ratio_fixed_w(const Eigen::VectorXd& proposed,
                                            const Eigen::VectorXd& current,
                                            const WeightingMatrix& w) const {
  const double n = static_cast<double>(sample_size());
  return -0.5 * n * (gmm_quadratic(proposed, w) - gmm_quadratic(current, w)) +
         (log_prior(proposed) - log_prior(current));
}

double QuasiPosterior::log_mh_ratio_concurrent(const Eigen::VectorXd& proposed,
                                               const Eigen::VectorXd& current,
                                               const WeightingMatrix& w_proposed,
                                               const WeightingMatrix& w_current) const {
  if (!w_proposed.log_det || !w_current.log_det) {
    throw NumericalError("concurrent MH ratio needs defined log-determinants");
  }
  const double n = static_cast<double>(sample_size());
  return 0.5 * (*w_proposed.log_det - *w_current.log_det) -
         0.5 * n * (gmm_quadratic(proposed, w_proposed) - gmm_quadratic(current, w_current)) +
         (log_prior(proposed) - log_prior(current));
}

double QuasiPosterior::log_mh_ratio_stochastic(const Eigen::VectorXd& proposed,
                                               const Eigen::VectorXd& current,
                                               const WeightingMatrix& w_current) const {
  if (proposed.size() != current.size()) {
    throw InputError("state dimensions differ");
  }
  int n_diff = 0;
  for (Eigen::Index i = 0; i < proposed.size(); ++i) {
    if (proposed(i) != current(i)) ++n_diff;
  }
  if (n_diff > 1) {
    throw InputError("stochastic MH ratio expects states differing in one coordinate");
  }
  return log_mh_ratio_fixed_w(proposed, current, w_current);
}

}  // namespace bgmm
