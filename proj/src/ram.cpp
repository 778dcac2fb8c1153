#include "bgmm/ram.hpp"

#include <cmath>
#include <string>

#include "bgmm/errors.hpp"

namespace bgmm {

Eigen::MatrixXd RamConfig::resolved_initial_scale(int dim) const {
  if (initial_scale.size() == 0) return Eigen::MatrixXd::Identity(dim, dim);
  return initial_scale;
}

void RamConfig::validate(int dim) const {
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw InputError("target_accept must lie in (0,1)");
  }
  if (!(decay_exponent > 0.5 && decay_exponent <= 1.0)) {
    throw InputError("decay_exponent must lie in (0.5, 1]");
  }
  const Eigen::MatrixXd s = resolved_initial_scale(dim);
  if (s.rows() != dim || s.cols() != dim) {
    throw InputError("initial_scale must be " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    if (!(s(i, i) > 0.0)) throw InputError("initial_scale needs a positive diagonal");
    for (Eigen::Index j = i + 1; j < s.cols(); ++j) {
      if (s(i, j) != 0.0) throw InputError("initial_scale must be lower-triangular");
    }
  }
}

void chol_update(Eigen::MatrixXd& lower, Eigen::VectorXd u) {
  const Eigen::Index n = lower.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::hypot(lower(i, i), u(i));
    const double c = r / lower(i, i);
    const double s = u(i) / lower(i, i);
    lower(i, i) = r;
    if (i + 1 < n) {
      lower.col(i).tail(n - i - 1) = (lower.col(i).tail(n - i - 1) + s * u.tail(n - i - 1)) / c;
      u.tail(n - i - 1) = c * u.tail(n - i - 1) - s * lower.col(i).tail(n - i - 1);
    }
  }
}

bool chol_downdate(Eigen::MatrixXd& lower, Eigen::VectorXd u) {
  const Eigen::Index n = lower.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r2 = lower(i, i) * lower(i, i) - u(i) * u(i);
    if (!(r2 > 0.0)) return false;
    const double r = std::sqrt(r2);
    const double c = r / lower(i, i);
    const double s = u(i) / lower(i, i);
    lower(i, i) = r;
    if (i + 1 < n) {
      lower.col(i).tail(n - i - 1) = (lower.col(i).tail(n - i - 1) - s * u.tail(n - i - 1)) / c;
      u.tail(n - i - 1) = c * u.tail(n - i - 1) - s * lower.col(i).tail(n - i - 1);
    }
  }
  return true;
}

double ram_step_size(int dim, long iteration, double decay_exponent) {
  return std::min(1.0, static_cast<double>(dim) *
                           std::pow(static_cast<double>(iteration), -decay_exponent));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ram_propose(const Eigen::VectorXd& theta,
                                                        const Eigen::MatrixXd& scale_lower,
                                                        Rng& rng) {
  Eigen::VectorXd u(theta.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.normal();
  return {theta + scale_lower * u, u};
}

Eigen::MatrixXd ram_adapt(const Eigen::MatrixXd& scale_lower, const Eigen::VectorXd& u,
                          double accept_prob, long iteration, const RamConfig& cfg,
                          bool* skipped) {
  if (skipped) *skipped = false;
  const double norm2 = u.squaredNorm();
  if (norm2 == 0.0) throw InputError("RAM adaptation needs a nonzero innovation");
  const double eta = ram_step_size(static_cast<int>(u.size()), iteration, cfg.decay_exponent);
  const double c = eta * (accept_prob - cfg.target_accept);
  if (c == 0.0) return scale_lower;
  const Eigen::VectorXd v = scale_lower * u * std::sqrt(std::abs(c) / norm2);
  Eigen::MatrixXd next = scale_lower;
  if (c > 0.0) {
    chol_update(next, v);
    return next;
  }
  if (!chol_downdate(next, v)) {
    if (skipped) *skipped = true;
    return scale_lower;
  }
  return next;
}

}  // namespace bgmm
