#include "bgmm/dataset.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "bgmm/errors.hpp"

namespace bgmm {

void Dataset::validate() const {
  if (y.size() != x.size() || y.size() != z.rows()) {
    throw InputError("dataset columns disagree on row count");
  }
  if (n_rows() < 2) {
    throw InputError("dataset needs at least 2 rows");
  }
  if (n_instruments() < 1) {
    throw InputError("dataset needs at least 1 instrument column");
  }
  if (!y.allFinite() || !x.allFinite() || !z.allFinite()) {
    throw InputError("dataset contains non-finite entries");
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_field(const std::string& field, const std::string& column, std::size_t row) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw InputError("column `" + column + "`, data row " + std::to_string(row) +
                     ": cannot parse value \"" + field + "\"");
  }
  return v;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  const auto header = split_line(line);
  if (header.empty() || header[0] != "y") {
    throw InputError(path + ": first header column must be `y`");
  }
  if (header.size() < 2 || header[1] != "x") {
    throw InputError(path + ": second header column must be `x`");
  }
  const std::size_t k = header.size() - 2;
  if (k < 1) throw InputError(path + ": expected at least one `z` column");
  for (std::size_t j = 0; j < k; ++j) {
    const std::string want = "z" + std::to_string(j + 1);
    if (header[j + 2] != want) {
      throw InputError(path + ": header column " + std::to_string(j + 3) +
                       " must be `" + want + "`, got `" + header[j + 2] + "`");
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw InputError(path + ": data row " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      row[j] = parse_field(fields[j], header[j], line_no);
    }
    rows.push_back(std::move(row));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Dataset data;
  data.y.resize(n);
  data.x.resize(n);
  data.z.resize(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    data.y(i) = row[0];
    data.x(i) = row[1];
    for (std::size_t j = 0; j < k; ++j) data.z(i, static_cast<Eigen::Index>(j)) = row[j + 2];
  }
  data.validate();
  return data;
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "y,x";
  for (Eigen::Index j = 0; j < data.n_instruments(); ++j) out << ",z" << (j + 1);
  out << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
    put(data.y(i));
    out << ',';
    put(data.x(i));
    for (Eigen::Index j = 0; j < data.n_instruments(); ++j) {
      out << ',';
      put(data.z(i, j));
    }
    out << "\n";
  }
  if (!out) throw InputError("write failed for " + path);
}

}  // namespace bgmm
