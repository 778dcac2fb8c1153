#include "bgmm/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bgmm/errors.hpp"

namespace bgmm {

const char* weighting_kind_name(WeightingKind kind) {
  switch (kind) {
    case WeightingKind::kStandard:
      return "standard";
    case WeightingKind::kPseudoInverse:
      return "pinv";
    case WeightingKind::kNer:
      return "ner";
  }
  return "?";
}

WeightingKind weighting_kind_from_name(const std::string& name) {
  if (name == "standard") return WeightingKind::kStandard;
  if (name == "pinv") return WeightingKind::kPseudoInverse;
  if (name == "ner") return WeightingKind::kNer;
  throw InputError("unknown estimator `" + name + "` (expected standard|pinv|ner)");
}

int WeightingSpec::resolved_n_star(Eigen::Index n_rows) const {
  if (n_star > 0) return n_star;
  return static_cast<int>(std::lround(0.6 * static_cast<double>(n_rows)));
}

void WeightingSpec::validate(Eigen::Index n_rows) const {
  if (n_permutations < 1) throw InputError("n_permutations must be >= 1");
  if (eigen_floor < 0.0) throw InputError("eigen_floor must be >= 0");
  if (kind == WeightingKind::kNer) {
    const int ns = resolved_n_star(n_rows);
    if (ns < 2 || ns > n_rows - 2) {
      throw InputError("NER split n_star=" + std::to_string(ns) +
                       " must lie in [2, N-2] for N=" + std::to_string(n_rows));
    }
  }
}

WeightingMatrix identity_weighting(Eigen::Index k) {
  return {Eigen::MatrixXd::Identity(k, k), 0.0};
}

Eigen::MatrixXd second_moment(const Eigen::MatrixXd& moments) {
  if (moments.rows() < 1) throw InputError("moment matrix is empty");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(moments.cols(), moments.cols());
  s.selfadjointView<Eigen::Lower>().rankUpdate(moments.transpose(),
                                               1.0 / static_cast<double>(moments.rows()));
  return s.selfadjointView<Eigen::Lower>();
}

namespace {

void symmetrize(Eigen::MatrixXd& m) { m = ((m + m.transpose()) * 0.5).eval(); }

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolve(const Eigen::MatrixXd& s,
                                                          const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) {
    throw NumericalError(std::string("eigendecomposition failed in ") + what);
  }
  return es;
}

// Eigenbasis of cov1 (columns in descending eigenvalue order) and the raw
// diagonal of P1' cov2 P1.
struct NerSplitBasis {
  Eigen::MatrixXd basis;
  Eigen::VectorXd diag;
};

NerSplitBasis ner_split_basis(const Eigen::MatrixXd& cov1, const Eigen::MatrixXd& cov2) {
  const auto es = eigensolve(cov1, "NER split");
  NerSplitBasis out;
  out.basis = es.eigenvectors().rowwise().reverse();
  out.diag = (cov2.selfadjointView<Eigen::Lower>() * out.basis)
                 .cwiseProduct(out.basis)
                 .colwise()
                 .sum()
                 .transpose();
  return out;
}

Eigen::VectorXd floored_diag(const Eigen::VectorXd& diag, const Eigen::MatrixXd& cov2,
                             double eigen_floor) {
  const double floor_value =
      eigen_floor * cov2.trace() / static_cast<double>(cov2.cols());
  Eigen::VectorXd d = diag.cwiseMax(floor_value);
  if (!(d.minCoeff() > 0.0) || !d.allFinite()) {
    throw NumericalError("NER diagonal is not positive; moment second moments degenerate");
  }
  return d;
}

void check_split(Eigen::Index n_rows, int n_star) {
  if (n_star < 1 || n_star > n_rows - 1) {
    throw InputError("split location " + std::to_string(n_star) + " out of range for N=" +
                     std::to_string(n_rows));
  }
}

// Gram matrix of the rows selected by the first n_star entries of perm.
Eigen::MatrixXd subset_gram(const Eigen::MatrixXd& moments, const std::vector<int>& perm,
                            int n_star) {
  Eigen::MatrixXd sel(n_star, moments.cols());
  for (int i = 0; i < n_star; ++i) sel.row(i) = moments.row(perm[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(moments.cols(), moments.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(sel.transpose(), 1.0);
  return g.selfadjointView<Eigen::Lower>();
}

double log_det_from_llt(const Eigen::MatrixXd& w) {
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("averaged NER precision is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

WeightingMatrix standard_precision(const Eigen::MatrixXd& moments) {
  const Eigen::MatrixXd s = second_moment(moments);
  const auto es = eigensolve(s, "standard precision");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lambda_max = ev(ev.size() - 1);
  const double lambda_min = ev(0);
  if (!(lambda_min > 0.0) || lambda_max / lambda_min > 1e12) {
    throw SingularMatrixError("second-moment matrix is singular or near-singular");
  }
  WeightingMatrix out;
  out.mat = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  symmetrize(out.mat);
  out.log_det = -ev.array().log().sum();
  return out;
}

WeightingMatrix pseudo_precision(const Eigen::MatrixXd& moments) {
  const Eigen::MatrixXd s = second_moment(moments);
  const auto es = eigensolve(s, "pseudo-inverse precision");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lambda_max = std::max(ev(ev.size() - 1), 0.0);
  const double tol =
      static_cast<double>(s.cols()) * std::numeric_limits<double>::epsilon() * lambda_max;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol) {
      inv(i) = 1.0 / ev(i);
      ++rank;
    }
  }
  WeightingMatrix out;
  out.mat = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  symmetrize(out.mat);
  if (rank == ev.size()) {
    out.log_det = -ev.array().log().sum();
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> subsample_covariances(const Eigen::MatrixXd& moments,
                                                                  int n_star) {
  check_split(moments.rows(), n_star);
  return {second_moment(moments.topRows(n_star)),
          second_moment(moments.bottomRows(moments.rows() - n_star))};
}

WeightingMatrix ner_single_split(const Eigen::MatrixXd& moments_permuted, int n_star,
                                 double eigen_floor) {
  const auto [cov1, cov2] = subsample_covariances(moments_permuted, n_star);
  const auto split = ner_split_basis(cov1, cov2);
  const Eigen::VectorXd d = floored_diag(split.diag, cov2, eigen_floor);
  WeightingMatrix out;
  out.mat = split.basis * d.cwiseInverse().asDiagonal() * split.basis.transpose();
  symmetrize(out.mat);
  out.log_det = -d.array().log().sum();
  return out;
}

WeightingMatrix ner_precision_with_permutations(const Eigen::MatrixXd& moments,
                                                const WeightingSpec& spec,
                                                const std::vector<std::vector<int>>& permutations) {
  const Eigen::Index n = moments.rows();
  const Eigen::Index k = moments.cols();
  spec.validate(n);
  if (permutations.empty()) throw InputError("need at least one permutation");
  const int n_star = spec.resolved_n_star(n);
  const double n2 = static_cast<double>(n - n_star);

  // M'M is permutation-invariant, so only the first sub-sample's Gram matrix
  // is recomputed per permutation.
  const Eigen::MatrixXd gram = second_moment(moments) * static_cast<double>(n);

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
  double single_log_det = 0.0;
  for (const auto& perm : permutations) {
    if (perm.size() != static_cast<std::size_t>(n)) {
      throw InputError("permutation length does not match the moment matrix");
    }
    const Eigen::MatrixXd g1 = subset_gram(moments, perm, n_star);
    const Eigen::MatrixXd cov1 = g1 / static_cast<double>(n_star);
    const Eigen::MatrixXd cov2 = (gram - g1) / n2;
    const auto split = ner_split_basis(cov1, cov2);
    const Eigen::VectorXd d = floored_diag(split.diag, cov2, spec.eigen_floor);
    single_log_det = -d.array().log().sum();
    const Eigen::MatrixXd scaled = split.basis * d.cwiseSqrt().cwiseInverse().asDiagonal();
    acc.selfadjointView<Eigen::Lower>().rankUpdate(scaled, 1.0);
  }

  WeightingMatrix out;
  out.mat = acc.selfadjointView<Eigen::Lower>();
  out.mat /= static_cast<double>(permutations.size());
  out.log_det =
      permutations.size() == 1 ? single_log_det : log_det_from_llt(out.mat);
  return out;
}

WeightingMatrix ner_precision(const Eigen::MatrixXd& moments, const WeightingSpec& spec,
                              Rng& rng) {
  spec.validate(moments.rows());
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(spec.n_permutations));
  for (auto& p : perms) p = rng.permutation(static_cast<int>(moments.rows()));
  return ner_precision_with_permutations(moments, spec, perms);
}

double split_criterion_with_permutations(const Eigen::MatrixXd& moments, int n_star,
                                         const std::vector<std::vector<int>>& permutations) {
  const Eigen::Index n = moments.rows();
  const Eigen::Index k = moments.cols();
  check_split(n, n_star);
  if (permutations.empty()) throw InputError("need at least one permutation");
  const double n2 = static_cast<double>(n - n_star);
  const Eigen::MatrixXd gram = second_moment(moments) * static_cast<double>(n);

  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(k, k);
  for (const auto& perm : permutations) {
    if (perm.size() != static_cast<std::size_t>(n)) {
      throw InputError("permutation length does not match the moment matrix");
    }
    const Eigen::MatrixXd g1 = subset_gram(moments, perm, n_star);
    const Eigen::MatrixXd cov1 = g1 / static_cast<double>(n_star);
    const Eigen::MatrixXd cov2 = (gram - g1) / n2;
    const auto split = ner_split_basis(cov1, cov2);
    diff += split.basis * split.diag.asDiagonal() * split.basis.transpose() - cov2;
  }
  return diff.squaredNorm();
}

double split_criterion(const Eigen::MatrixXd& moments, int n_star, int n_permutations,
                       Rng& rng) {
  if (n_permutations < 1) throw InputError("n_permutations must be >= 1");
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(n_permutations));
  for (auto& p : perms) p = rng.permutation(static_cast<int>(moments.rows()));
  return split_criterion_with_permutations(moments, n_star, perms);
}

std::vector<int> candidate_grid(int n_rows) {
  if (n_rows < 16) throw InputError("candidate grid needs N >= 16");
  const double n = static_cast<double>(n_rows);
  const double root = std::sqrt(n);
  const double entries[7] = {std::floor(2.0 * root),
                             std::round(0.2 * n),
                             std::round(0.4 * n),
                             std::round(0.6 * n),
                             std::round(0.8 * n),
                             std::floor(n - 2.5 * root),
                             std::floor(n - 1.5 * root)};
  std::vector<int> grid;
  for (double e : entries) {
    const int v = std::clamp(static_cast<int>(e), 2, n_rows - 2);
    if (std::find(grid.begin(), grid.end(), v) == grid.end()) grid.push_back(v);
  }
  return grid;
}

WeightingMatrix build_weighting(const Eigen::MatrixXd& moments, const WeightingSpec& spec,
                                Rng& rng) {
  switch (spec.kind) {
    case WeightingKind::kStandard:
      return standard_precision(moments);
    case WeightingKind::kPseudoInverse:
      return pseudo_precision(moments);
    case WeightingKind::kNer:
      return ner_precision(moments, spec, rng);
  }
  throw InputError("unknown weighting kind");
}

}  // namespace bgmm
