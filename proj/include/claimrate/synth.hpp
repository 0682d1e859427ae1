#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "claimrate/dataset.hpp"
#include "claimrate/encoder.hpp"

namespace claimrate::synth {

/// A feature whose categories multiply the claim frequency. Categorical
/// signals use labels c0, c1, ...; numeric signals use the values 0, 1, ...
struct SignalFeature {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;
  std::vector<double> factors;
};

/// A feature drawn independently of the claims process.
struct NoiseFeature {
  std::string name;
  std::size_t categories = 4;
};

struct SynthConfig {
  std::size_t n = 5000;
  std::uint64_t seed = 0;
  std::vector<SignalFeature> signals{{"SIG_A", FeatureKind::categorical, {1.0, 3.0}},
                                     {"SIG_B", FeatureKind::categorical, {1.0, 3.0}}};
  std::vector<NoiseFeature> noise{{"NOISE_A", 4}, {"NOISE_B", 4}, {"NOISE_C", 4}};
  /// Expected claims per exposure year before signal factors.
  double base_frequency = 0.5;
  /// Per-claim cost is lognormal with this mean and log-scale sigma.
  double severity_mean = 1000.0;
  double severity_sigma = 1.0;
  double exposure_min = 0.5;
  double exposure_max = 5.0;
  /// When positive, adds a TOC policy-type feature (TP/CM) and a SIV sum
  /// insured feature that is 0 for third-party policies.
  double third_party_share = 0.0;

  void validate() const;
  FeatureSchema schema() const;
  std::vector<std::string> signal_names() const;
  std::vector<std::string> noise_names() const;
};

struct SynthPortfolio {
  Portfolio portfolio;
  /// Ground-truth expected claim rate (frequency times mean severity),
  /// aligned with portfolio.records.
  std::vector<double> expected_rate;
};

/// Deterministic per seed; each record draws from its own stream, so
/// record i does not depend on n.
SynthPortfolio generate(const SynthConfig& config);

void write_ground_truth(std::ostream& out, const SynthPortfolio& synth);

/// Literal evaluation of the kernel-weighted average with pow(), no log
/// space and no shift; for cross-checking the predictor in tests.
double oracle_predict(std::span<const double> query, std::span<const EncodedVector> training,
                      std::span<const double> claim_rates, double cbar, double kappa);

}  // namespace claimrate::synth
