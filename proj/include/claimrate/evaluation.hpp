#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "claimrate/dataset.hpp"
#include "claimrate/predictor.hpp"

namespace claimrate {

/// sum_t |pred_t - actual_t| / sum_t |cbar - actual_t|.
/// Throws DegenerateError when the denominator is zero.
double normalized_mae(std::span<const double> predictions, std::span<const double> actuals, double cbar);

struct EvaluationOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool normalize_distance = true;
};

struct EvaluationReport {
  std::vector<double> grid;
  /// Pooled E per grid point: fold numerators and denominators are summed
  /// before dividing.
  std::vector<double> e_curve;
  /// per_fold[fold][i] is the fold's own E at grid[i].
  std::vector<std::vector<double>> per_fold;
  double kappa_star = 0.0;
  double e_at_star = 0.0;
};

/// Default grid: 0 to 20 in steps of 0.5.
std::vector<double> default_kappa_grid();
/// Parses "lo:hi:step" (inclusive of hi up to rounding).
std::vector<double> parse_kappa_grid(const std::string& text);

/// Cross-validated E(kappa). Each fold fits target statistics on the other
/// folds, predicts its own records for the whole grid from one distance
/// pass, and scores against the training-fold mean.
EvaluationReport evaluate_kappa_curve(const Portfolio& portfolio, std::span<const std::string> features,
                                      std::span<const double> grid, const EvaluationOptions& options = {});

/// Grid argmin; ties go to the smaller kappa.
double optimize_kappa(std::span<const double> grid, std::span<const double> curve);

void write_kappa_curve(std::ostream& out, const EvaluationReport& report);

struct Calibration {
  /// Multiplier that makes total predicted claims equal total actual claims.
  double gamma = 1.0;
  std::string period;
  double actual_total = 0.0;
  double predicted_total = 0.0;
};

/// Compares total actual claims against total predicted claims (predicted
/// rate times exposure, with the model's current gamma applied) over the
/// holdout. Throws DegenerateError when either total is not positive.
Calibration calibrate(const KernelModel& model, const Portfolio& holdout, std::string period = {},
                      unsigned threads = 1);
/// Folds the correction into the model's gamma.
KernelModel apply_calibration(const KernelModel& model, const Calibration& calibration);

void write_calibration(std::ostream& out, const Calibration& calibration);

}  // namespace claimrate
