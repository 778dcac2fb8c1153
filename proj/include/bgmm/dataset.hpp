#pragma once

#include <Eigen/Dense>
#include <string>

namespace bgmm {

// One IV regression sample: response y, endogenous covariate x, and an
// N-by-K instrument matrix Z. All rows aligned.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::VectorXd x;
  Eigen::MatrixXd z;

  Eigen::Index n_rows() const { return y.size(); }
  Eigen::Index n_instruments() const { return z.cols(); }

  // Throws InputError on shape mismatch, N < 2, K < 1, or non-finite entries.
  void validate() const;
};

// CSV schema: header `y,x,z1,...,zK`, decimal point '.', no thousands
// separators. Values are written with 17 significant digits so that a
// dump/load cycle reproduces the doubles exactly.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& data, const std::string& path);

}  // namespace bgmm
