#include "claimrate/explain.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "claimrate/csv.hpp"
#include "claimrate/error.hpp"

namespace claimrate {

double single_feature_prediction(const KernelModel& model, std::size_t feature, std::string_view value, double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw Error("kappa must be a finite value >= 0");
  const auto& stats = model.stats();
  if (feature >= stats.dimension()) throw Error("feature index out of range");
  const double coordinate = stats.tables()[feature].encode(value, stats.cbar());
  const double scale = model.distance_scale();

  const auto& support = model.support();
  std::vector<double> log1p_distance;
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  log1p_distance.reserve(support.size());
  sums.reserve(support.size());
  counts.reserve(support.size());
  for (const auto& point : support) {
    log1p_distance.push_back(std::log1p(std::abs(coordinate - point.coords[feature]) / scale));
    sums.push_back(point.rate_sum);
    counts.push_back(point.count);
  }
  const double raw = kernel_average(log1p_distance, sums, counts, kappa, model.training_mean());
  return std::clamp(raw, model.min_rate(), model.max_rate());
}

double single_feature_prediction(const KernelModel& model, std::string_view feature, std::string_view value,
                                 double kappa) {
  const auto& tables = model.stats().tables();
  for (std::size_t f = 0; f < tables.size(); ++f)
    if (tables[f].name() == feature) return single_feature_prediction(model, f, value, kappa);
  throw Error("feature '" + std::string(feature) + "' is not part of the model");
}

ImpactReport explain(const KernelModel& model, std::span<const std::string> values, double kappa,
                     std::string record_id, std::string subset_label) {
  const auto& stats = model.stats();
  if (values.size() != stats.dimension()) throw Error("explain: value count does not match the model's features");
  if (!(stats.cbar() > 0.0)) throw DegenerateError("mean training claim rate is not positive; impacts are undefined");

  ImpactReport report;
  report.record_id = std::move(record_id);
  report.subset_label = std::move(subset_label);
  report.kappa = kappa;
  report.cbar = stats.cbar();
  for (std::size_t f = 0; f < values.size(); ++f) {
    const double c_tilde = single_feature_prediction(model, f, values[f], kappa);
    report.rows.push_back({stats.tables()[f].name(), values[f], c_tilde, c_tilde / report.cbar});
  }
  const double grid[] = {kappa};
  report.predicted = model.raw_predict_grid(stats.encode(values), grid).front();
  report.predicted_ratio = report.predicted / report.cbar;
  return report;
}

ImpactReport explain(const KernelModel& model, const PolicyRecord& record, const FeatureSchema& schema, double kappa,
                     std::string subset_label) {
  std::vector<std::string> values;
  for (std::size_t col : model.stats().bind(schema)) values.push_back(record.values.at(col));
  return explain(model, values, kappa, record.id, std::move(subset_label));
}

void write_impact_report(std::ostream& out, const ImpactReport& report) {
  out << "feature,value,c_tilde,impact\n";
  for (const auto& r : report.rows)
    out << csv::join({r.feature, r.value, csv::format_double(r.c_tilde), csv::format_double(r.impact)}) << '\n';
  out << csv::join({"CLR", report.subset_label, csv::format_double(report.predicted),
                    csv::format_double(report.predicted_ratio)})
      << '\n';
}

}  // namespace claimrate
