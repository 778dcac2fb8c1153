#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "bgmm/rng.hpp"

namespace bgmm {

enum class WeightingKind { kStandard, kPseudoInverse, kNer };

const char* weighting_kind_name(WeightingKind kind);
WeightingKind weighting_kind_from_name(const std::string& name);

// Choice of precision estimator for the K x K weighting matrix.
struct WeightingSpec {
  WeightingKind kind = WeightingKind::kNer;
  // Split location N* for the NER estimator; 0 selects round(0.6 N).
  int n_star = 0;
  // Number of random-permutation splits averaged per NER estimate.
  int n_permutations = 50;
  // Relative floor for near-zero diagonal entries before inversion.
  double eigen_floor = 1e-10;

  int resolved_n_star(Eigen::Index n_rows) const;
  void validate(Eigen::Index n_rows) const;
};

// Symmetric PSD weighting matrix; log_det is empty when the matrix is
// singular (rank-deficient pseudo-inverse).
struct WeightingMatrix {
  Eigen::MatrixXd mat;
  std::optional<double> log_det;
};

WeightingMatrix identity_weighting(Eigen::Index k);

// Uncentered second-moment matrix M'M / N.
Eigen::MatrixXd second_moment(const Eigen::MatrixXd& moments);

// W = [M'M / N]^{-1}. Throws SingularMatrixError when the second-moment
// matrix is singular or its condition estimate exceeds 1e12.
WeightingMatrix standard_precision(const Eigen::MatrixXd& moments);

// Moore-Penrose pseudo-inverse of M'M / N; total on finite input.
WeightingMatrix pseudo_precision(const Eigen::MatrixXd& moments);

// Uncentered covariances of the first n_star rows and the remaining rows.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> subsample_covariances(const Eigen::MatrixXd& moments,
                                                                  int n_star);

// Eigenvalue-regularized precision from one split of an (already permuted)
// moment matrix: eigenbasis P1 of the first sub-sample covariance, diagonal
// quadratic forms of the second, inverted with a relative floor.
//
// When the first covariance has repeated eigenvalues the eigenbasis is not
// unique and the result depends on the eigensolver's choice within the tied
// subspace; per-eigenvector sign flips do not matter.
WeightingMatrix ner_single_split(const Eigen::MatrixXd& moments_permuted, int n_star,
                                 double eigen_floor);

// Average of ner_single_split over explicit row permutations.
WeightingMatrix ner_precision_with_permutations(const Eigen::MatrixXd& moments,
                                                const WeightingSpec& spec,
                                                const std::vector<std::vector<int>>& permutations);

// Average over spec.n_permutations Fisher-Yates permutations from rng.
WeightingMatrix ner_precision(const Eigen::MatrixXd& moments, const WeightingSpec& spec, Rng& rng);

// Split-location criterion || sum_m (Sigma_NER^(m) - Sigma_2^(m)) ||_F^2,
// accumulated over the given permutations (covariance form, no floor).
double split_criterion_with_permutations(const Eigen::MatrixXd& moments, int n_star,
                                         const std::vector<std::vector<int>>& permutations);
double split_criterion(const Eigen::MatrixXd& moments, int n_star, int n_permutations, Rng& rng);

// Candidate split locations {2 sqrt(N), 0.2N, 0.4N, 0.6N, 0.8N,
// N - 2.5 sqrt(N), N - 1.5 sqrt(N)}: the sqrt-based entries are floored,
// the proportional ones rounded to nearest, all clipped to [2, N-2],
// duplicates dropped keeping first occurrence. Requires N >= 16.
std::vector<int> candidate_grid(int n_rows);

// Dispatch on spec.kind; the single estimator entry point used by samplers.
WeightingMatrix build_weighting(const Eigen::MatrixXd& moments, const WeightingSpec& spec,
                                Rng& rng);

}  // namespace bgmm
