#include "claimrate/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "claimrate/csv.hpp"
#include "claimrate/error.hpp"
#include "claimrate/parallel.hpp"

namespace claimrate {

double normalized_mae(std::span<const double> predictions, std::span<const double> actuals, double cbar) {
  if (predictions.size() != actuals.size()) throw Error("predictions and actuals differ in length");
  if (predictions.empty()) throw Error("normalized MAE needs at least one test sample");
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t t = 0; t < actuals.size(); ++t) {
    numerator += std::abs(predictions[t] - actuals[t]);
    denominator += std::abs(cbar - actuals[t]);
  }
  if (!(denominator > 0.0))
    throw DegenerateError("degenerate test set: every actual claim rate equals the baseline mean");
  return numerator / denominator;
}

std::vector<double> default_kappa_grid() { return parse_kappa_grid("0:20:0.5"); }

std::vector<double> parse_kappa_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  double lo = 0.0, hi = 0.0, step = 0.0;
  if (second == std::string::npos || !csv::parse_double(text.substr(0, first), lo) ||
      !csv::parse_double(text.substr(first + 1, second - first - 1), hi) ||
      !csv::parse_double(text.substr(second + 1), step))
    throw Error("kappa grid must look like lo:hi:step, got '" + text + "'");
  if (lo < 0.0 || hi < lo || !(step > 0.0)) throw Error("kappa grid needs 0 <= lo <= hi and step > 0");
  std::vector<double> grid;
  const double slack = step * 1e-9;
  for (std::size_t i = 0;; ++i) {
    const double k = lo + static_cast<double>(i) * step;
    if (k > hi + slack) break;
    grid.push_back(k);
    if (grid.size() > 1000000) throw Error("kappa grid is too large");
  }
  return grid;
}

double optimize_kappa(std::span<const double> grid, std::span<const double> curve) {
  if (grid.empty() || grid.size() != curve.size()) throw Error("kappa grid and error curve must be non-empty and aligned");
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i] < curve[best] || (curve[i] == curve[best] && grid[i] < grid[best])) best = i;
  }
  return grid[best];
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error("kappa grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) throw Error("kappa grid values must be finite and >= 0");
    if (i && !(grid[i] > grid[i - 1])) throw Error("kappa grid must be strictly ascending");
  }
}

struct FoldSums {
  std::vector<double> numerator;  // per grid point
  double denominator = 0.0;
};

FoldSums score_fold(const Portfolio& portfolio, std::span<const std::string> features, std::span<const double> grid,
                    const FoldAssignment& folds, int fold, const EvaluationOptions& options) {
  const auto train_rows = folds.fold_complement(fold);
  const auto test_rows = folds.fold_members(fold);

  TargetStats stats = TargetStats::fit(portfolio, features, train_rows);
  const auto binding = stats.bind(portfolio.schema);
  std::vector<EncodedVector> train_encoded;
  std::vector<double> train_rates;
  train_encoded.reserve(train_rows.size());
  train_rates.reserve(train_rows.size());
  for (std::size_t row : train_rows) {
    train_encoded.push_back(stats.encode(portfolio.records[row], binding));
    train_rates.push_back(portfolio.records[row].claim_rate);
  }
  const double cbar = stats.cbar();
  const KernelModel model(std::move(stats), train_encoded, train_rates, 0.0, 1.0, options.normalize_distance);

  // Identical test vectors share one prediction curve.
  std::map<EncodedVector, std::size_t> unique_index;
  std::vector<const EncodedVector*> unique;
  std::vector<std::size_t> slot(test_rows.size());
  std::vector<EncodedVector> test_encoded;
  test_encoded.reserve(test_rows.size());
  for (std::size_t t = 0; t < test_rows.size(); ++t) test_encoded.push_back(model.stats().encode(portfolio.records[test_rows[t]], binding));
  for (std::size_t t = 0; t < test_rows.size(); ++t) {
    auto [it, inserted] = unique_index.try_emplace(test_encoded[t], unique.size());
    if (inserted) unique.push_back(&test_encoded[t]);
    slot[t] = it->second;
  }
  std::vector<std::vector<double>> curves(unique.size());
  parallel_for(unique.size(), options.threads, [&](std::size_t u) { curves[u] = model.raw_predict_grid(*unique[u], grid); });

  FoldSums sums{std::vector<double>(grid.size(), 0.0), 0.0};
  for (std::size_t t = 0; t < test_rows.size(); ++t) {
    const double actual = portfolio.records[test_rows[t]].claim_rate;
    const auto& curve = curves[slot[t]];
    for (std::size_t i = 0; i < grid.size(); ++i) sums.numerator[i] += std::abs(curve[i] - actual);
    sums.denominator += std::abs(cbar - actual);
  }
  if (!(sums.denominator > 0.0))
    throw DegenerateError("degenerate test set: every actual claim rate equals the training mean");
  return sums;
}

}  // namespace

EvaluationReport evaluate_kappa_curve(const Portfolio& portfolio, std::span<const std::string> features,
                                      std::span<const double> grid, const EvaluationOptions& options) {
  check_grid(grid);
  if (features.empty()) throw Error("evaluation needs at least one feature");
  const FoldAssignment folds = split_folds(portfolio, options.folds, options.seed);

  EvaluationReport report;
  report.grid.assign(grid.begin(), grid.end());
  std::vector<double> pooled_numerator(grid.size(), 0.0);
  double pooled_denominator = 0.0;
  for (int fold = 0; fold < options.folds; ++fold) {
    FoldSums sums;
    try {
      sums = score_fold(portfolio, features, grid, folds, fold, options);
    } catch (const DegenerateError& e) {
      throw DegenerateError("fold " + std::to_string(fold) + ": " + e.what());
    }
    std::vector<double> fold_curve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      fold_curve[i] = sums.numerator[i] / sums.denominator;
      pooled_numerator[i] += sums.numerator[i];
    }
    pooled_denominator += sums.denominator;
    report.per_fold.push_back(std::move(fold_curve));
  }
  report.e_curve.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) report.e_curve[i] = pooled_numerator[i] / pooled_denominator;
  report.kappa_star = optimize_kappa(report.grid, report.e_curve);
  const auto star = std::find(report.grid.begin(), report.grid.end(), report.kappa_star) - report.grid.begin();
  report.e_at_star = report.e_curve[static_cast<std::size_t>(star)];
  return report;
}

void write_kappa_curve(std::ostream& out, const EvaluationReport& report) {
  csv::Row header{"kappa", "E_pooled"};
  for (std::size_t f = 0; f < report.per_fold.size(); ++f) header.push_back("E_fold_" + std::to_string(f));
  out << csv::join(header) << '\n';
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    csv::Row row{csv::format_double(report.grid[i]), csv::format_double(report.e_curve[i])};
    for (const auto& fold : report.per_fold) row.push_back(csv::format_double(fold[i]));
    out << csv::join(row) << '\n';
  }
}

Calibration calibrate(const KernelModel& model, const Portfolio& holdout, std::string period, unsigned threads) {
  if (holdout.empty()) throw Error("calibration needs a non-empty holdout");
  const auto binding = model.stats().bind(holdout.schema);
  std::vector<EncodedVector> encoded;
  encoded.reserve(holdout.size());
  for (const auto& r : holdout.records) encoded.push_back(model.stats().encode(r, binding));
  const auto predictions = predict_batch(encoded, model, threads);

  Calibration cal;
  cal.period = std::move(period);
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    const auto& r = holdout.records[i];
    if (!std::isfinite(r.total_claims) || !std::isfinite(r.exposure_years))
      throw Error("holdout record '" + r.id + "' lacks claims or exposure");
    cal.actual_total += r.total_claims;
    cal.predicted_total += predictions[i].value * r.exposure_years;
  }
  if (!(cal.predicted_total > 0.0)) throw DegenerateError("total predicted claims over the holdout is not positive");
  if (!(cal.actual_total > 0.0))
    throw DegenerateError("total actual claims over the holdout is not positive; gamma must be > 0");
  cal.gamma = cal.actual_total / cal.predicted_total;
  return cal;
}

KernelModel apply_calibration(const KernelModel& model, const Calibration& calibration) {
  return model.with_gamma(model.gamma() * calibration.gamma);
}

void write_calibration(std::ostream& out, const Calibration& calibration) {
  out << "period,gamma,actual_total,predicted_total\n";
  out << csv::join({calibration.period, csv::format_double(calibration.gamma),
                    csv::format_double(calibration.actual_total), csv::format_double(calibration.predicted_total)})
      << '\n';
}

}  // namespace claimrate
