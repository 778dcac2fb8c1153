#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "bgmm/dataset.hpp"
#include "bgmm/rng.hpp"

namespace bgmm {

// Factor-structure IV design: K instruments loading S common factors,
// endogenous regressor x = z'delta + w, response y = gamma x + phi w + u.
struct DgpConfig {
  int n = 200;
  int k = 50;
  int s = 3;
  double gamma = 0.5;
  double phi = 0.2;
  double varsigma_x = 2.0;
  double varsigma_y = 2.0;  // accepted for completeness; no formula uses it
  std::uint64_t seed = 0;

  void validate() const;
};

struct DgpStructure {
  Eigen::MatrixXd loadings;     // B, K x S with U(0,1) entries
  Eigen::VectorXd psi;          // idiosyncratic scales, U(2,4)
  Eigen::VectorXd eta;          // factor weights, U(0,1)
  Eigen::MatrixXd projection;   // A = B' (BB' + Psi^2)^{-1}, S x K
  Eigen::VectorXd coefficients; // delta = A' eta

  // BB' + Psi^2, the instrument covariance.
  Eigen::MatrixXd instrument_covariance() const;
};

struct DgpDraw {
  Dataset data;
  DgpStructure structure;
  double sigma2_x = 0.0;
  double sigma2_y = 0.0;
  double gamma_true = 0.0;
};

// Deterministic part of the structure given the raw uniform draws.
DgpStructure build_structure(Eigen::MatrixXd loadings, Eigen::VectorXd psi, Eigen::VectorXd eta);

// Draws B, psi, eta from rng and completes the projection and coefficients.
DgpStructure generate_structure(const DgpConfig& cfg, Rng& rng);

// sigma_x^2 = delta' (BB' + Psi^2) delta and
// sigma_y^2 = [gamma^2 (1 + varsigma_x^2) + phi^2 varsigma_x^2] sigma_x^2.
std::pair<double, double> noise_variances(const DgpConfig& cfg, const DgpStructure& structure);

// Assembles x and y from given instruments and noise; test seam for the
// noiseless reductions.
DgpDraw assemble_dataset(const DgpConfig& cfg, DgpStructure structure, Eigen::MatrixXd z,
                         const Eigen::VectorXd& w, const Eigen::VectorXd& u);

// One full draw. Instruments come from the factor representation
// z_n = B f_n + Psi e_n, equal in distribution to N(0, BB' + Psi^2).
// Degenerate structures (sigma_x^2 ~ 0) are redrawn a bounded number of
// times. Deterministic given the rng state.
DgpDraw generate_dataset(const DgpConfig& cfg, Rng& rng);
DgpDraw generate_dataset(const DgpConfig& cfg);  // seeds Rng with cfg.seed

}  // namespace bgmm
