#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "claimrate/dataset.hpp"

namespace claimrate {

/// One coordinate per fitted feature, in claim-rate units.
using EncodedVector = std::vector<double>;

struct CategoryStat {
  double mean = 0.0;
  std::size_t count = 0;
};

/// Per-category mean claim rates C(f, v) for one feature.
///
/// Categorical values are keyed by their exact text. Numeric values are
/// keyed by their parsed value, so "30" and "30.0" are the same category;
/// an unseen numeric value is linearly interpolated between its two nearest
/// observed neighbours and clamped to the observed range. Any other unseen
/// value (including unparseable numeric text) encodes to the global mean.
class FeatureTable {
 public:
  explicit FeatureTable(FeatureSpec spec) : spec_(std::move(spec)) {}

  const FeatureSpec& spec() const noexcept { return spec_; }
  const std::string& name() const noexcept { return spec_.name; }
  FeatureKind kind() const noexcept { return spec_.kind; }

  const std::map<std::string, CategoryStat>& labels() const noexcept { return labels_; }
  const std::map<double, CategoryStat>& numbers() const noexcept { return numbers_; }
  std::size_t category_count() const noexcept { return labels_.size() + numbers_.size(); }

  /// Exact-match lookup; nullptr when the value was not seen in training.
  const CategoryStat* find(std::string_view value) const;
  double encode(std::string_view value, double cbar) const;

  /// Installs a category mean directly (deserialization, hand-built tables).
  void set(std::string_view value, CategoryStat stat);

 private:
  friend class TargetStats;

  FeatureSpec spec_;
  std::map<std::string, CategoryStat> labels_;
  std::map<double, CategoryStat> numbers_;
};

/// Fitted target statistics: the global mean claim rate and the category
/// means for each selected feature. Immutable once built.
class TargetStats {
 public:
  TargetStats(double cbar, std::size_t training_count, std::vector<FeatureTable> tables);

  /// Fits on all records of `training`.
  static TargetStats fit(const Portfolio& training, std::span<const std::string> features);
  /// Fits on the records at `rows`, summing in the order given.
  static TargetStats fit(const Portfolio& training, std::span<const std::string> features,
                         std::span<const std::size_t> rows);

  double cbar() const noexcept { return cbar_; }
  std::size_t training_count() const noexcept { return training_count_; }
  std::size_t dimension() const noexcept { return tables_.size(); }
  const std::vector<FeatureTable>& tables() const noexcept { return tables_; }
  const FeatureTable& table(std::string_view feature) const;
  std::vector<std::string> feature_names() const;

  /// Positions of this model's features among the schema's features.
  std::vector<std::size_t> bind(const FeatureSchema& schema) const;

  /// `values` in this model's feature order.
  EncodedVector encode(std::span<const std::string> values) const;
  EncodedVector encode(const PolicyRecord& record, std::span<const std::size_t> binding) const;
  EncodedVector encode(const PolicyRecord& record, const FeatureSchema& schema) const;

 private:
  double cbar_;
  std::size_t training_count_;
  std::vector<FeatureTable> tables_;
};

/// sqrt(sum_f (a_f - b_f)^2) / cbar. Throws DegenerateError when cbar <= 0
/// and Error on a length mismatch.
double distance(std::span<const double> a, std::span<const double> b, double cbar);
/// The same Euclidean distance without the division by the mean.
double raw_distance(std::span<const double> a, std::span<const double> b);

/// Flat CSV artifact:
///
///   cbar,training_count,features
///   <cbar>,<n>,NAME:kind;NAME:kind
///   feature,value,mean,count
///   NAME,VALUE,<mean>,<count>
///   ...
void write_target_stats(std::ostream& out, const TargetStats& stats);
TargetStats read_target_stats(std::istream& in);
TargetStats load_target_stats(const std::string& path);

}  // namespace claimrate
