#include "claimrate/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "claimrate/error.hpp"
#include "claimrate/parallel.hpp"

namespace claimrate {

KernelModel::KernelModel(TargetStats stats, std::span<const EncodedVector> training, std::span<const double> claim_rates,
                         double kappa, double gamma, bool normalize_distance)
    : stats_(std::move(stats)), kappa_(kappa), gamma_(gamma), normalize_(normalize_distance) {
  if (!(kappa_ >= 0.0) || !std::isfinite(kappa_)) throw Error("kappa must be a finite value >= 0");
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw Error("calibration factor gamma must be > 0");
  if (training.empty()) throw Error("kernel model needs at least one training sample");
  if (training.size() != claim_rates.size()) throw Error("training vectors and claim rates differ in length");
  if (normalize_ && !(stats_.cbar() > 0.0))
    throw DegenerateError("mean training claim rate is not positive; distances cannot be normalized");

  std::map<EncodedVector, std::size_t> index_of;
  double total = 0.0;
  min_rate_ = std::numeric_limits<double>::infinity();
  max_rate_ = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < training.size(); ++s) {
    const double rate = claim_rates[s];
    if (!std::isfinite(rate)) throw Error("training claim rate is not finite");
    if (training[s].size() != stats_.dimension()) throw Error("training vector length does not match the model");
    auto [it, inserted] = index_of.try_emplace(training[s], support_.size());
    if (inserted) support_.push_back({training[s], 0.0, 0});
    auto& point = support_[it->second];
    point.rate_sum += rate;
    ++point.count;
    total += rate;
    min_rate_ = std::min(min_rate_, rate);
    max_rate_ = std::max(max_rate_, rate);
  }
  training_count_ = training.size();
  training_mean_ = total / static_cast<double>(training.size());
}

KernelModel KernelModel::fit(const Portfolio& training, std::span<const std::string> features, double kappa,
                             double gamma, bool normalize_distance) {
  TargetStats stats = TargetStats::fit(training, features);
  const auto binding = stats.bind(training.schema);
  std::vector<EncodedVector> encoded;
  encoded.reserve(training.size());
  for (const auto& r : training.records) encoded.push_back(stats.encode(r, binding));
  const auto rates = training.claim_rates();
  return KernelModel(std::move(stats), encoded, rates, kappa, gamma, normalize_distance);
}

KernelModel KernelModel::with_kappa(double kappa) const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw Error("kappa must be a finite value >= 0");
  KernelModel copy = *this;
  copy.kappa_ = kappa;
  return copy;
}

KernelModel KernelModel::with_gamma(double gamma) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("calibration factor gamma must be > 0");
  KernelModel copy = *this;
  copy.gamma_ = gamma;
  return copy;
}

double kernel_average(std::span<const double> log1p_distance, std::span<const double> rate_sums,
                      std::span<const std::size_t> counts, double kappa, double mean_at_zero) {
  if (kappa == 0.0) return mean_at_zero;
  const double shift = *std::min_element(log1p_distance.begin(), log1p_distance.end());
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t g = 0; g < log1p_distance.size(); ++g) {
    const double w = std::exp(-kappa * (log1p_distance[g] - shift));
    numerator += w * rate_sums[g];
    denominator += w * static_cast<double>(counts[g]);
  }
  return numerator / denominator;
}

namespace {

struct SupportColumns {
  std::vector<double> log1p_distance;
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  double nearest = std::numeric_limits<double>::infinity();
};

SupportColumns distances_to(std::span<const double> query, const KernelModel& model) {
  if (query.size() != model.stats().dimension())
    throw Error("query has " + std::to_string(query.size()) + " coordinates, model expects " +
                std::to_string(model.stats().dimension()));
  const double scale = model.distance_scale();
  const auto& support = model.support();
  SupportColumns cols;
  cols.log1p_distance.reserve(support.size());
  cols.sums.reserve(support.size());
  cols.counts.reserve(support.size());
  for (const auto& point : support) {
    const double d = raw_distance(query, point.coords) / scale;
    cols.nearest = std::min(cols.nearest, d);
    cols.log1p_distance.push_back(std::log1p(d));
    cols.sums.push_back(point.rate_sum);
    cols.counts.push_back(point.count);
  }
  return cols;
}

}  // namespace

std::vector<double> KernelModel::raw_predict_grid(std::span<const double> query, std::span<const double> kappas) const {
  const auto cols = distances_to(query, *this);
  std::vector<double> out;
  out.reserve(kappas.size());
  for (double kappa : kappas) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw Error("kappa must be a finite value >= 0");
    const double raw = kernel_average(cols.log1p_distance, cols.sums, cols.counts, kappa, training_mean_);
    out.push_back(std::clamp(raw, min_rate_, max_rate_));
  }
  return out;
}

Prediction predict(std::span<const double> query, const KernelModel& model) {
  const auto cols = distances_to(query, model);
  const double raw =
      kernel_average(cols.log1p_distance, cols.sums, cols.counts, model.kappa(), model.training_mean());
  const double bounded = std::clamp(raw, model.min_rate(), model.max_rate());
  return Prediction{model.gamma() * bounded, model.kappa(), model.gamma(), cols.nearest};
}

std::vector<Prediction> predict_batch(std::span<const EncodedVector> queries, const KernelModel& model,
                                      unsigned threads) {
  std::vector<Prediction> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) { out[i] = predict(queries[i], model); });
  return out;
}

}  // namespace claimrate
