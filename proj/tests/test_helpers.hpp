#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "bgmm/dataset.hpp"
#include "bgmm/dgp.hpp"
#include "bgmm/moment_model.hpp"

namespace bgmm::testing {

inline Dataset small_dataset(int n, int k, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.y.resize(n);
  data.x.resize(n);
  data.z.resize(n, k);
  for (int i = 0; i < n; ++i) {
    data.x(i) = rng.normal();
    data.y(i) = 0.5 * data.x(i) + 0.3 * rng.normal();
    for (int j = 0; j < k; ++j) data.z(i, j) = rng.normal();
  }
  return data;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

inline bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a.data()[i] != b.data()[i]) return false;
  }
  return true;
}

// Cyclic Jacobi eigensolver for symmetric matrices; deliberately written
// from scratch so eigen-based code paths can be checked against it.
inline void jacobi_eigen(Eigen::MatrixXd a, Eigen::MatrixXd& vectors, Eigen::VectorXd& values) {
  const Eigen::Index n = a.rows();
  vectors = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-28) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n, n);
        rot(p, p) = c;
        rot(q, q) = c;
        rot(p, q) = s;
        rot(q, p) = -s;
        a = (rot.transpose() * a * rot).eval();
        vectors = (vectors * rot).eval();
      }
    }
  }
  values = a.diagonal();
}

}  // namespace bgmm::testing
