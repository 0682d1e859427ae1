#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace claimrate {

/// Numeric features keep their exact value and are grouped by it; the
/// numeric kind only matters when an unseen value has to be encoded.
enum class FeatureKind { categorical, numeric };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Third-party policies carry no sum insured; records violating that are
/// rejected by cleaning.
struct ThirdPartyRule {
  std::string policy_type_feature;
  std::string third_party_value;
  std::string sum_insured_feature;

  friend bool operator==(const ThirdPartyRule&, const ThirdPartyRule&) = default;
};

struct FeatureSchema {
  std::vector<FeatureSpec> features;
  std::string id_column = "POL";
  std::string claims_column = "TOTAL_CLAIMS";
  std::string exposure_column = "EXPOSURE";
  std::optional<std::string> age_feature;
  std::optional<ThirdPartyRule> third_party;

  /// Throws SchemaError on duplicate or empty feature lists and on role
  /// declarations that reference undeclared features.
  void validate() const;

  std::optional<std::size_t> find(std::string_view feature) const;
  std::size_t index_of(std::string_view feature) const;  // throws SchemaError
  std::vector<std::string> feature_names() const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

/// Line-oriented schema text:
///
///   # comment
///   id POL
///   claims TOTAL_CLAIMS
///   exposure EXPOSURE
///   feature AGE numeric
///   feature SEX categorical
///   age AGE
///   third-party TOC TP SIV
FeatureSchema parse_schema(std::istream& in);
FeatureSchema load_schema(const std::string& path);
std::string format_schema(const FeatureSchema& schema);

struct PolicyRecord {
  std::string id;
  /// Raw cell text aligned with FeatureSchema::features; empty = missing.
  std::vector<std::string> values;
  double total_claims = 0.0;
  double exposure_years = 0.0;
  /// total_claims / exposure_years; NaN when either input is missing or
  /// the exposure is not positive (such records never survive clean()).
  double claim_rate = 0.0;

  friend bool operator==(const PolicyRecord&, const PolicyRecord&) = default;
};

struct Portfolio {
  FeatureSchema schema;
  std::vector<PolicyRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  std::vector<double> claim_rates() const;
  /// Portfolio restricted to the given record positions, in that order.
  Portfolio subset(const std::vector<std::size_t>& rows) const;
};

struct LoadOptions {
  /// When false, missing claims/exposure columns are allowed and read as
  /// missing (query files for new policies).
  bool require_target = true;
};

Portfolio load_portfolio(const std::string& path, const FeatureSchema& schema, const LoadOptions& options = {});
Portfolio parse_portfolio(std::istream& in, const FeatureSchema& schema, const LoadOptions& options = {});
/// Writes the columns load_portfolio consumes: id, features, claims, exposure.
void write_portfolio(std::ostream& out, const Portfolio& portfolio);

struct CleaningRules {
  double max_driver_age = 85.0;
  double min_exposure_years = 30.0 / 365.0;
};

struct Rejection {
  std::string id;
  std::string reason;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct CleanResult {
  Portfolio portfolio;
  std::vector<Rejection> rejections;
};

/// Drops (never edits) records with missing cells, drivers older than the
/// age limit, exposure below the minimum, negative claims, or a third-party
/// policy with a nonzero sum insured. The first failing rule is logged.
CleanResult clean(const Portfolio& portfolio, const CleaningRules& rules = {});
void write_rejections(std::ostream& out, const std::vector<Rejection>& rejections);

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  /// Fold index per record, aligned with the portfolio's record order.
  std::vector<int> fold_of;

  std::vector<std::size_t> fold_members(int fold) const;
  std::vector<std::size_t> fold_complement(int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Seeded uniform shuffle followed by round-robin dealing.
FoldAssignment split_folds(const Portfolio& portfolio, int k, std::uint64_t seed);

}  // namespace claimrate
