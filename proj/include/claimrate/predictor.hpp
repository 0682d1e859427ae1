#pragma once

#include <span>
#include <vector>

#include "claimrate/encoder.hpp"

namespace claimrate {

struct Prediction {
  double value = 0.0;
  double kappa_used = 0.0;
  double gamma_used = 1.0;
  /// Distance to the closest training sample.
  double nearest_distance = 0.0;
};

/// Training samples that share an encoded vector get the same kernel
/// weight, so they are stored once with their summed claim rate and count.
/// Points keep first-appearance order; sums run in training order.
struct SupportPoint {
  EncodedVector coords;
  double rate_sum = 0.0;
  std::size_t count = 0;
};

/// Kernel-weighted claim-rate predictor:
///
///   value = gamma * sum_s c_s (1 + d_s)^-kappa / sum_s (1 + d_s)^-kappa
///
/// with d_s the distance from the query to training sample s in encoded
/// space, divided by the training mean unless normalization is disabled.
class KernelModel {
 public:
  KernelModel(TargetStats stats, std::span<const EncodedVector> training, std::span<const double> claim_rates,
              double kappa, double gamma = 1.0, bool normalize_distance = true);

  /// Fits target statistics on `training` and encodes every record.
  static KernelModel fit(const Portfolio& training, std::span<const std::string> features, double kappa,
                         double gamma = 1.0, bool normalize_distance = true);

  const TargetStats& stats() const noexcept { return stats_; }
  const std::vector<SupportPoint>& support() const noexcept { return support_; }
  double kappa() const noexcept { return kappa_; }
  double gamma() const noexcept { return gamma_; }
  bool normalizes_distance() const noexcept { return normalize_; }
  std::size_t training_count() const noexcept { return training_count_; }
  /// Unweighted mean of the training claim rates, summed in training order.
  double training_mean() const noexcept { return training_mean_; }
  double min_rate() const noexcept { return min_rate_; }
  double max_rate() const noexcept { return max_rate_; }

  KernelModel with_kappa(double kappa) const;
  KernelModel with_gamma(double gamma) const;

  /// Distance scale: cbar when normalizing, otherwise 1.
  double distance_scale() const noexcept { return normalize_ ? stats_.cbar() : 1.0; }

  /// Raw (gamma-free) predictions for each kappa, computing distances once.
  std::vector<double> raw_predict_grid(std::span<const double> query, std::span<const double> kappas) const;

 private:
  TargetStats stats_;
  std::vector<SupportPoint> support_;
  double kappa_;
  double gamma_;
  bool normalize_;
  std::size_t training_count_ = 0;
  double training_mean_ = 0.0;
  double min_rate_ = 0.0;
  double max_rate_ = 0.0;
};

Prediction predict(std::span<const double> query, const KernelModel& model);
std::vector<Prediction> predict_batch(std::span<const EncodedVector> queries, const KernelModel& model,
                                      unsigned threads = 1);

/// Kernel average over weighted groups given log(1 + d) per group.
/// Weights are shifted by the smallest distance before exponentiation,
/// exp(-kappa * (log1p(d_g) - log1p(d_min))), so the closest group always
/// has weight 1 and large kappa cannot underflow the denominator. kappa = 0
/// is exactly the plain average and returns `mean_at_zero`.
double kernel_average(std::span<const double> log1p_distance, std::span<const double> rate_sums,
                      std::span<const std::size_t> counts, double kappa, double mean_at_zero);

}  // namespace claimrate
