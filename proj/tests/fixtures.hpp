#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "claimrate/dataset.hpp"

namespace claimrate::testing {

/// Portfolio over the given features with claims/exposure per row.
struct RowSpec {
  std::vector<std::string> values;
  double claims;
  double exposure;
};

inline Portfolio make_portfolio(const std::vector<FeatureSpec>& features, const std::vector<RowSpec>& rows) {
  Portfolio p;
  p.schema.features = features;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    PolicyRecord r;
    r.id = "P" + std::to_string(i + 1);
    r.values = rows[i].values;
    r.total_claims = rows[i].claims;
    r.exposure_years = rows[i].exposure;
    r.claim_rate = r.total_claims / r.exposure_years;
    p.records.push_back(std::move(r));
  }
  return p;
}

/// One record per claim rate (exposure 1), single categorical feature.
inline Portfolio rates_portfolio(const std::string& feature, const std::vector<std::string>& values,
                                 const std::vector<double>& rates) {
  std::vector<RowSpec> rows;
  for (std::size_t i = 0; i < rates.size(); ++i) rows.push_back({{values[i]}, rates[i], 1.0});
  return make_portfolio({{feature, FeatureKind::categorical}}, rows);
}

inline double relative_error(double actual, double expected) {
  const double scale = std::max(std::abs(expected), 1e-300);
  return std::abs(actual - expected) / scale;
}

inline std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::path(CLAIMRATE_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace claimrate::testing
