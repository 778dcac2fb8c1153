#pragma once

#include <Eigen/Dense>

#include "bgmm/dataset.hpp"

namespace bgmm {

// A statistical model expressed through K moment conditions
// E[m_n(theta)] = 0, theta of dimension L.
class MomentModel {
 public:
  virtual ~MomentModel() = default;

  virtual int param_dim() const = 0;
  virtual int moment_dim() const = 0;

  // N-by-K matrix whose row n is m_n(theta). Checks the parameter shape and
  // that every entry of the result is finite.
  Eigen::MatrixXd moment_matrix(const Dataset& data, const Eigen::VectorXd& theta) const;

  // Row n of the moment matrix, with the same checks.
  Eigen::VectorXd moment_row(const Dataset& data, Eigen::Index n,
                             const Eigen::VectorXd& theta) const;

  // Starting point for samplers; zeros unless a model can do better.
  virtual Eigen::VectorXd initial_guess(const Dataset& data) const;

 protected:
  virtual Eigen::VectorXd eval_row(const Dataset& data, Eigen::Index n,
                                   const Eigen::VectorXd& theta) const = 0;
  // Default loops over eval_row; concrete models can vectorize.
  virtual Eigen::MatrixXd eval_matrix(const Dataset& data, const Eigen::VectorXd& theta) const;
};

// Linear IV regression: m_n(gamma) = (y_n - gamma * x_n) * z_n, L = 1.
class LinearIVModel : public MomentModel {
 public:
  explicit LinearIVModel(int n_instruments) : k_(n_instruments) {}

  int param_dim() const override { return 1; }
  int moment_dim() const override { return k_; }

  // 2SLS, falling back to 0 when the projected regressor is degenerate.
  Eigen::VectorXd initial_guess(const Dataset& data) const override;

 protected:
  Eigen::VectorXd eval_row(const Dataset& data, Eigen::Index n,
                           const Eigen::VectorXd& theta) const override;
  Eigen::MatrixXd eval_matrix(const Dataset& data, const Eigen::VectorXd& theta) const override;

 private:
  int k_;
};

// Column means of a moment matrix. Errors on an empty matrix.
Eigen::VectorXd moment_mean(const Eigen::MatrixXd& moments);

// Two-stage least squares: project x on col(Z) (minimum-norm least squares,
// so rank-deficient Z is fine), then regress y on the projection. Throws
// InitializerError when the projected regressor is numerically zero.
double tsls_estimate(const Dataset& data);

}  // namespace bgmm
