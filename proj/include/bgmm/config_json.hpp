#pragma once

#include <string>
#include <vector>

#include "bgmm/harness.hpp"

namespace bgmm {

// JSON mirrors the config structs field-for-field; see README for the schema.
DgpConfig dgp_config_from_json_text(const std::string& text);
DgpConfig dgp_config_from_json_file(const std::string& path);

// Accepts one experiment object, an array of them, or {"experiments": [...]}.
std::vector<ExperimentSpec> experiments_from_json_text(const std::string& text);
std::vector<ExperimentSpec> experiments_from_json_file(const std::string& path);

std::string estimate_report_to_json(const EstimateReport& report, const EstimateRequest& request,
                                    const std::string& data_path);

std::string ground_truth_to_json(const DgpDraw& draw);

}  // namespace bgmm
