#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "claimrate/predictor.hpp"

namespace claimrate {

/// Prediction from the model restricted to one feature: the kernel average
/// with distances |C(f, value) - C(f, X_sf)| (scaled like the full model).
double single_feature_prediction(const KernelModel& model, std::size_t feature, std::string_view value, double kappa);
double single_feature_prediction(const KernelModel& model, std::string_view feature, std::string_view value,
                                 double kappa);

struct ImpactRow {
  std::string feature;
  std::string value;
  double c_tilde = 0.0;
  double impact = 0.0;  // c_tilde / cbar
};

/// Independent one-feature views of a single prediction; the impacts are
/// not an additive or multiplicative decomposition of `predicted`.
struct ImpactReport {
  std::string record_id;
  std::string subset_label;
  double kappa = 0.0;
  double cbar = 0.0;
  std::vector<ImpactRow> rows;
  double predicted = 0.0;        // full-model rate, gamma excluded
  double predicted_ratio = 0.0;  // predicted / cbar
};

/// `values` are in the model's feature order.
ImpactReport explain(const KernelModel& model, std::span<const std::string> values, double kappa,
                     std::string record_id = {}, std::string subset_label = {});
ImpactReport explain(const KernelModel& model, const PolicyRecord& record, const FeatureSchema& schema, double kappa,
                     std::string subset_label = {});

/// CSV rows (feature, value, c_tilde, impact) followed by an overall CLR row.
void write_impact_report(std::ostream& out, const ImpactReport& report);

}  // namespace claimrate
