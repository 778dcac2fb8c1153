#include "bgmm/moment_model.hpp"

#include <string>

#include "bgmm/errors.hpp"

namespace bgmm {

namespace {

void check_theta(const Eigen::VectorXd& theta, int param_dim) {
  if (theta.size() != param_dim) {
    throw InputError("parameter has length " + std::to_string(theta.size()) +
                     ", model expects " + std::to_string(param_dim));
  }
  if (!theta.allFinite()) {
    throw InputError("parameter vector contains non-finite entries");
  }
}

}  // namespace

Eigen::MatrixXd MomentModel::moment_matrix(const Dataset& data,
                                           const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim());
  Eigen::MatrixXd m = eval_matrix(data, theta);
  if (m.rows() != data.n_rows() || m.cols() != moment_dim()) {
    throw InputError("moment evaluation shape does not match the model's dimensions");
  }
  if (!m.allFinite()) {
    throw NumericalError("moment evaluation produced non-finite values");
  }
  return m;
}

Eigen::VectorXd MomentModel::moment_row(const Dataset& data, Eigen::Index n,
                                        const Eigen::VectorXd& theta) const {
  check_theta(theta, param_dim());
  if (n < 0 || n >= data.n_rows()) {
    throw InputError("row index out of range");
  }
  Eigen::VectorXd m = eval_row(data, n, theta);
  if (m.size() != moment_dim()) {
    throw NumericalError("moment evaluator returned a misshaped row");
  }
  if (!m.allFinite()) {
    throw NumericalError("moment evaluation produced non-finite values");
  }
  return m;
}

Eigen::MatrixXd MomentModel::eval_matrix(const Dataset& data,
                                         const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd m(data.n_rows(), moment_dim());
  for (Eigen::Index n = 0; n < data.n_rows(); ++n) {
    m.row(n) = eval_row(data, n, theta).transpose();
  }
  return m;
}

Eigen::VectorXd MomentModel::initial_guess(const Dataset&) const {
  return Eigen::VectorXd::Zero(param_dim());
}

Eigen::VectorXd LinearIVModel::eval_row(const Dataset& data, Eigen::Index n,
                                        const Eigen::VectorXd& theta) const {
  return (data.y(n) - theta(0) * data.x(n)) * data.z.row(n).transpose();
}

Eigen::MatrixXd LinearIVModel::eval_matrix(const Dataset& data,
                                           const Eigen::VectorXd& theta) const {
  return (data.y - theta(0) * data.x).asDiagonal() * data.z;
}

Eigen::VectorXd LinearIVModel::initial_guess(const Dataset& data) const {
  Eigen::VectorXd theta(1);
  try {
    theta(0) = tsls_estimate(data);
  } catch (const InitializerError&) {
    theta(0) = 0.0;
  }
  return theta;
}

Eigen::VectorXd moment_mean(const Eigen::MatrixXd& moments) {
  if (moments.rows() == 0 || moments.cols() == 0) {
    throw InputError("moment matrix is empty");
  }
  return moments.colwise().mean().transpose();
}

double tsls_estimate(const Dataset& data) {
  data.validate();
  // Minimum-norm least squares handles rank-deficient Z (K > N included).
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(data.z);
  const Eigen::VectorXd xhat = data.z * cod.solve(data.x);
  const double denom = xhat.squaredNorm();
  if (!(denom > 1e-20 * std::max(1.0, data.x.squaredNorm()))) {
    throw InitializerError("projected regressor is numerically zero");
  }
  return xhat.dot(data.y) / denom;
}

}  // namespace bgmm
