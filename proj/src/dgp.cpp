#include "bgmm/dgp.hpp"

#include <cmath>
#include <string>

#include "bgmm/errors.hpp"

namespace bgmm {

void DgpConfig::validate() const {
  if (n < 2) throw InputError("DGP needs n >= 2");
  if (k < 1) throw InputError("DGP needs k >= 1");
  if (s < 1) throw InputError("DGP needs s >= 1");
  if (!(varsigma_x > 0.0) || !(varsigma_y > 0.0)) {
    throw InputError("signal-to-noise controls must be positive");
  }
}

Eigen::MatrixXd DgpStructure::instrument_covariance() const {
  Eigen::MatrixXd cov = loadings * loadings.transpose();
  cov.diagonal() += psi.array().square().matrix();
  return cov;
}

DgpStructure build_structure(Eigen::MatrixXd loadings, Eigen::VectorXd psi,
                             Eigen::VectorXd eta) {
  DgpStructure st;
  st.loadings = std::move(loadings);
  st.psi = std::move(psi);
  st.eta = std::move(eta);
  const Eigen::MatrixXd cov = st.instrument_covariance();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    // Cannot happen with psi in [2,4] (diagonal dominated by psi^2 >= 4).
    throw NumericalError("instrument covariance is not positive definite");
  }
  st.projection = llt.solve(st.loadings).transpose();
  st.coefficients = st.projection.transpose() * st.eta;
  return st;
}

DgpStructure generate_structure(const DgpConfig& cfg, Rng& rng) {
  cfg.validate();
  Eigen::MatrixXd loadings(cfg.k, cfg.s);
  for (int k = 0; k < cfg.k; ++k) {
    for (int s = 0; s < cfg.s; ++s) loadings(k, s) = rng.uniform();
  }
  Eigen::VectorXd psi(cfg.k);
  for (int k = 0; k < cfg.k; ++k) psi(k) = rng.uniform(2.0, 4.0);
  Eigen::VectorXd eta(cfg.s);
  for (int s = 0; s < cfg.s; ++s) eta(s) = rng.uniform();
  return build_structure(std::move(loadings), std::move(psi), std::move(eta));
}

std::pair<double, double> noise_variances(const DgpConfig& cfg, const DgpStructure& structure) {
  const Eigen::VectorXd& delta = structure.coefficients;
  const double sigma2_x = delta.dot(structure.instrument_covariance() * delta);
  const double vx2 = cfg.varsigma_x * cfg.varsigma_x;
  const double sigma2_y =
      (cfg.gamma * cfg.gamma * (1.0 + vx2) + cfg.phi * cfg.phi * vx2) * sigma2_x;
  return {sigma2_x, sigma2_y};
}

DgpDraw assemble_dataset(const DgpConfig& cfg, DgpStructure structure, Eigen::MatrixXd z,
                         const Eigen::VectorXd& w, const Eigen::VectorXd& u) {
  DgpDraw draw;
  const auto [sigma2_x, sigma2_y] = noise_variances(cfg, structure);
  draw.sigma2_x = sigma2_x;
  draw.sigma2_y = sigma2_y;
  draw.gamma_true = cfg.gamma;
  draw.structure = std::move(structure);
  draw.data.z = std::move(z);
  const Eigen::VectorXd signal = draw.data.z * draw.structure.coefficients;
  draw.data.x = signal + w;
  draw.data.y = cfg.gamma * draw.data.x + cfg.phi * (draw.data.x - signal) + u;
  return draw;
}

DgpDraw generate_dataset(const DgpConfig& cfg, Rng& rng) {
  cfg.validate();
  constexpr int kMaxRetries = 100;
  DgpStructure structure;
  double sigma2_x = 0.0;
  double sigma2_y = 0.0;
  int attempt = 0;
  for (;; ++attempt) {
    if (attempt >= kMaxRetries) {
      throw NumericalError("could not draw a non-degenerate DGP structure");
    }
    structure = generate_structure(cfg, rng);
    std::tie(sigma2_x, sigma2_y) = noise_variances(cfg, structure);
    if (sigma2_x > 1e-12) break;
  }

  const double sigma_x = std::sqrt(sigma2_x);
  const double sigma_y = std::sqrt(sigma2_y);
  Eigen::MatrixXd z(cfg.n, cfg.k);
  Eigen::VectorXd factors(cfg.s);
  Eigen::VectorXd idiosyncratic(cfg.k);
  for (int row = 0; row < cfg.n; ++row) {
    for (int s = 0; s < cfg.s; ++s) factors(s) = rng.normal();
    for (int k = 0; k < cfg.k; ++k) idiosyncratic(k) = rng.normal();
    z.row(row) = (structure.loadings * factors +
                  structure.psi.cwiseProduct(idiosyncratic))
                     .transpose();
  }
  Eigen::VectorXd w(cfg.n);
  for (int row = 0; row < cfg.n; ++row) w(row) = sigma_x * rng.normal();
  Eigen::VectorXd u(cfg.n);
  for (int row = 0; row < cfg.n; ++row) u(row) = sigma_y * rng.normal();

  return assemble_dataset(cfg, std::move(structure), std::move(z), w, u);
}

DgpDraw generate_dataset(const DgpConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_dataset(cfg, rng);
}

}  // namespace bgmm
