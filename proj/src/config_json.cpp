#include "bgmm/config_json.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bgmm/errors.hpp"

namespace bgmm {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("field `") + key + "` has the wrong type");
  }
}

DgpConfig dgp_from(const json& j) {
  DgpConfig cfg;
  cfg.n = field_or(j, "n", cfg.n);
  cfg.k = field_or(j, "k", cfg.k);
  cfg.s = field_or(j, "s", cfg.s);
  cfg.gamma = field_or(j, "gamma", cfg.gamma);
  cfg.phi = field_or(j, "phi", cfg.phi);
  cfg.varsigma_x = field_or(j, "varsigma_x", cfg.varsigma_x);
  cfg.varsigma_y = field_or(j, "varsigma_y", cfg.varsigma_y);
  cfg.seed = field_or(j, "seed", cfg.seed);
  cfg.validate();
  return cfg;
}

WeightingSpec weighting_from(const json& j) {
  WeightingSpec spec;
  spec.kind = weighting_kind_from_name(field_or<std::string>(j, "kind", "ner"));
  spec.n_star = field_or(j, "n_star", spec.n_star);
  spec.n_permutations = field_or(j, "n_permutations", spec.n_permutations);
  spec.eigen_floor = field_or(j, "eigen_floor", spec.eigen_floor);
  return spec;
}

AdaptationStrategy strategy_from(const json& j) {
  const auto kind = field_or<std::string>(j, "kind", "random");
  if (kind == "oracle") {
    OracleStrategy s;
    if (j.contains("theta_true")) {
      const auto values = j.at("theta_true").get<std::vector<double>>();
      s.theta_true = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                       static_cast<Eigen::Index>(values.size()));
    }
    return s;
  }
  if (kind == "concurrent") return ConcurrentStrategy{};
  if (kind == "stochastic") return StochasticStrategy{};
  if (kind == "continuous") return ContinuousStrategy{};
  if (kind == "random") {
    RandomStrategy s;
    s.alpha0 = field_or(j, "alpha0", s.alpha0);
    if (j.contains("alpha1")) s.alpha1 = j.at("alpha1").get<double>();
    return s;
  }
  throw InputError("unknown strategy `" + kind +
                   "` (expected oracle|concurrent|stochastic|continuous|random)");
}

ExperimentSpec experiment_from(const json& j) {
  ExperimentSpec spec;
  if (j.contains("dgp")) spec.dgp = dgp_from(j.at("dgp"));
  if (j.contains("weighting")) spec.weighting = weighting_from(j.at("weighting"));
  if (j.contains("strategy")) spec.strategy = strategy_from(j.at("strategy"));
  if (j.contains("chain")) {
    const json& chain = j.at("chain");
    spec.j_total = field_or<long>(chain, "draws", spec.j_total);
    spec.j_warmup = field_or<long>(chain, "warmup", spec.j_warmup);
  }
  spec.replications = field_or(j, "replications", spec.replications);
  spec.master_seed = field_or(j, "master_seed", spec.master_seed);
  spec.label = field_or<std::string>(j, "label", "");
  spec.validate();
  return spec;
}

}  // namespace

DgpConfig dgp_config_from_json_text(const std::string& text) { return dgp_from(parse(text)); }

DgpConfig dgp_config_from_json_file(const std::string& path) {
  return dgp_config_from_json_text(slurp(path));
}

std::vector<ExperimentSpec> experiments_from_json_text(const std::string& text) {
  const json j = parse(text);
  std::vector<ExperimentSpec> specs;
  if (j.is_array()) {
    for (const auto& cell : j) specs.push_back(experiment_from(cell));
  } else if (j.contains("experiments")) {
    for (const auto& cell : j.at("experiments")) specs.push_back(experiment_from(cell));
  } else {
    specs.push_back(experiment_from(j));
  }
  if (specs.empty()) throw InputError("config contains no experiments");
  return specs;
}

std::vector<ExperimentSpec> experiments_from_json_file(const std::string& path) {
  return experiments_from_json_text(slurp(path));
}

std::string estimate_report_to_json(const EstimateReport& report, const EstimateRequest& request,
                                    const std::string& data_path) {
  json echo;
  echo["data"] = data_path;
  echo["estimator"] = weighting_kind_name(request.weighting.kind);
  echo["n_star"] = request.weighting.n_star;
  echo["n_permutations"] = request.weighting.n_permutations;
  echo["strategy"] = strategy_name(request.strategy);
  echo["draws"] = request.j_total;
  echo["warmup"] = request.j_warmup;
  echo["seed"] = request.seed;

  json j;
  j["post_mean"] = report.post_mean;
  j["post_sd"] = report.post_sd;
  j["iqr"] = report.iqr;
  j["failed"] = report.failed;
  j["failure_reason"] = failure_reason_name(report.reason);
  j["accept_rate"] = report.accept_rate;
  j["n_adaptations"] = report.n_adaptations;
  j["wall_time_s"] = report.wall_time;
  j["config_echo"] = echo;
  return j.dump(2);
}

std::string ground_truth_to_json(const DgpDraw& draw) {
  json j;
  j["gamma_true"] = draw.gamma_true;
  j["sigma2_x"] = draw.sigma2_x;
  j["sigma2_y"] = draw.sigma2_y;
  return j.dump(2);
}

}  // namespace bgmm
