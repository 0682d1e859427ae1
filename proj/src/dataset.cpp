#include "claimrate/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "claimrate/csv.hpp"
#include "claimrate/error.hpp"
#include "claimrate/random.hpp"

namespace claimrate {

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::numeric ? "numeric" : "categorical";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "numeric") return FeatureKind::numeric;
  if (text == "categorical") return FeatureKind::categorical;
  throw SchemaError("unknown feature kind '" + std::string(text) + "' (expected categorical or numeric)");
}

void FeatureSchema::validate() const {
  if (features.empty()) throw SchemaError("schema declares no features");
  std::set<std::string_view> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw SchemaError("schema has an empty feature name");
    if (!seen.insert(f.name).second) throw SchemaError("duplicate feature '" + f.name + "'");
  }
  for (const auto* column : {&id_column, &claims_column, &exposure_column}) {
    if (column->empty()) throw SchemaError("schema is missing an id, claims, or exposure column");
    if (seen.count(*column)) throw SchemaError("column '" + *column + "' declared both as a feature and a role");
  }
  if (age_feature && !find(*age_feature)) throw SchemaError("age feature '" + *age_feature + "' is not a declared feature");
  if (third_party) {
    if (!find(third_party->policy_type_feature))
      throw SchemaError("policy type feature '" + third_party->policy_type_feature + "' is not a declared feature");
    if (!find(third_party->sum_insured_feature))
      throw SchemaError("sum insured feature '" + third_party->sum_insured_feature + "' is not a declared feature");
  }
}

std::optional<std::size_t> FeatureSchema::find(std::string_view feature) const {
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].name == feature) return i;
  return std::nullopt;
}

std::size_t FeatureSchema::index_of(std::string_view feature) const {
  if (auto i = find(feature)) return *i;
  throw SchemaError("unknown feature '" + std::string(feature) + "'");
}

std::vector<std::string> FeatureSchema::feature_names() const {
  std::vector<std::string> names;
  names.reserve(features.size());
  for (const auto& f : features) names.push_back(f.name);
  return names;
}

FeatureSchema parse_schema(std::istream& in) {
  FeatureSchema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (tokens.empty()) continue;

    const auto expect = [&](std::size_t n) {
      if (tokens.size() != n)
        throw SchemaError("schema line " + std::to_string(line_no) + ": '" + tokens[0] + "' takes " +
                          std::to_string(n - 1) + " argument(s)");
    };
    const std::string& key = tokens[0];
    if (key == "id") {
      expect(2);
      schema.id_column = tokens[1];
    } else if (key == "claims") {
      expect(2);
      schema.claims_column = tokens[1];
    } else if (key == "exposure") {
      expect(2);
      schema.exposure_column = tokens[1];
    } else if (key == "feature") {
      expect(3);
      schema.features.push_back({tokens[1], parse_feature_kind(tokens[2])});
    } else if (key == "age") {
      expect(2);
      schema.age_feature = tokens[1];
    } else if (key == "third-party") {
      expect(4);
      schema.third_party = ThirdPartyRule{tokens[1], tokens[2], tokens[3]};
    } else {
      throw SchemaError("schema line " + std::to_string(line_no) + ": unknown directive '" + key + "'");
    }
  }
  schema.validate();
  return schema;
}

FeatureSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file: " + path);
  return parse_schema(in);
}

std::string format_schema(const FeatureSchema& schema) {
  std::ostringstream out;
  out << "id " << schema.id_column << '\n';
  out << "claims " << schema.claims_column << '\n';
  out << "exposure " << schema.exposure_column << '\n';
  for (const auto& f : schema.features) out << "feature " << f.name << ' ' << to_string(f.kind) << '\n';
  if (schema.age_feature) out << "age " << *schema.age_feature << '\n';
  if (schema.third_party)
    out << "third-party " << schema.third_party->policy_type_feature << ' ' << schema.third_party->third_party_value
        << ' ' << schema.third_party->sum_insured_feature << '\n';
  return out.str();
}

std::vector<double> Portfolio::claim_rates() const {
  std::vector<double> rates;
  rates.reserve(records.size());
  for (const auto& r : records) rates.push_back(r.claim_rate);
  return rates;
}

Portfolio Portfolio::subset(const std::vector<std::size_t>& rows) const {
  Portfolio out{schema, {}};
  out.records.reserve(rows.size());
  for (std::size_t i : rows) out.records.push_back(records.at(i));
  return out;
}

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

double parse_amount(const std::string& cell, std::size_t row, const std::string& column) {
  if (blank(cell)) return kMissing;
  double value = 0.0;
  if (!csv::parse_double(cell, value))
    throw RowError(row, "cannot parse numeric value '" + cell + "' in column '" + column + "'");
  return value;
}

}  // namespace

Portfolio parse_portfolio(std::istream& in, const FeatureSchema& schema, const LoadOptions& options) {
  schema.validate();
  const auto rows = csv::read(in);
  if (rows.empty()) throw SchemaError("input has no header row");

  const auto& header = rows.front();
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = header[i];
    if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);  // UTF-8 BOM
    column_of.emplace(name, i);
  }
  const auto column = [&](const std::string& name) {
    auto it = column_of.find(name);
    if (it == column_of.end()) throw SchemaError("missing column '" + name + "'");
    return it->second;
  };

  const std::size_t id_col = column(schema.id_column);
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  const auto optional_column = [&](const std::string& name) {
    if (!options.require_target && !column_of.count(name)) return kAbsent;
    return column(name);
  };
  const std::size_t claims_col = optional_column(schema.claims_column);
  const std::size_t exposure_col = optional_column(schema.exposure_column);
  std::vector<std::size_t> feature_cols;
  for (const auto& f : schema.features) feature_cols.push_back(column(f.name));

  Portfolio portfolio{schema, {}};
  portfolio.records.reserve(rows.size() - 1);
  std::unordered_set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t row_no = r + 1;
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw RowError(row_no, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(row.size()));

    PolicyRecord rec;
    rec.id = row[id_col];
    if (blank(rec.id)) throw RowError(row_no, "empty policy id");
    if (!ids.insert(rec.id).second) throw RowError(row_no, "duplicate policy id '" + rec.id + "'");

    rec.values.reserve(feature_cols.size());
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      const std::string& cell = row[feature_cols[f]];
      if (blank(cell)) {
        rec.values.emplace_back();
        continue;
      }
      if (schema.features[f].kind == FeatureKind::numeric) {
        double unused = 0.0;
        if (!csv::parse_double(cell, unused))
          throw RowError(row_no, "cannot parse numeric value '" + cell + "' in column '" + schema.features[f].name + "'");
      }
      rec.values.push_back(cell);
    }
    rec.total_claims = claims_col == kAbsent ? kMissing : parse_amount(row[claims_col], row_no, schema.claims_column);
    rec.exposure_years =
        exposure_col == kAbsent ? kMissing : parse_amount(row[exposure_col], row_no, schema.exposure_column);
    rec.claim_rate = rec.exposure_years > 0.0 ? rec.total_claims / rec.exposure_years : kMissing;
    portfolio.records.push_back(std::move(rec));
  }
  return portfolio;
}

Portfolio load_portfolio(const std::string& path, const FeatureSchema& schema, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file: " + path);
  return parse_portfolio(in, schema, options);
}

void write_portfolio(std::ostream& out, const Portfolio& portfolio) {
  const auto& schema = portfolio.schema;
  csv::Row header{schema.id_column};
  for (const auto& f : schema.features) header.push_back(f.name);
  header.push_back(schema.claims_column);
  header.push_back(schema.exposure_column);
  out << csv::join(header) << '\n';
  for (const auto& r : portfolio.records) {
    csv::Row row{r.id};
    row.insert(row.end(), r.values.begin(), r.values.end());
    row.push_back(std::isnan(r.total_claims) ? "" : csv::format_double(r.total_claims));
    row.push_back(std::isnan(r.exposure_years) ? "" : csv::format_double(r.exposure_years));
    out << csv::join(row) << '\n';
  }
}

namespace {

std::optional<std::string> rejection_reason(const PolicyRecord& r, const FeatureSchema& schema,
                                            const CleaningRules& rules) {
  for (std::size_t f = 0; f < r.values.size(); ++f)
    if (blank(r.values[f])) return "missing value in " + schema.features[f].name;
  if (std::isnan(r.total_claims)) return "missing value in " + schema.claims_column;
  if (std::isnan(r.exposure_years)) return "missing value in " + schema.exposure_column;

  if (schema.age_feature) {
    double age = 0.0;
    const auto& cell = r.values[schema.index_of(*schema.age_feature)];
    if (!csv::parse_double(cell, age)) return "unparseable age";
    if (age > rules.max_driver_age) return "age > " + csv::format_double(rules.max_driver_age);
  }
  if (!(r.exposure_years >= rules.min_exposure_years) || !(r.exposure_years > 0.0)) return "exposure below minimum";
  if (r.total_claims < 0.0) return "negative total claims";
  if (schema.third_party) {
    const auto& tp = *schema.third_party;
    if (r.values[schema.index_of(tp.policy_type_feature)] == tp.third_party_value) {
      double insured = 0.0;
      const auto& cell = r.values[schema.index_of(tp.sum_insured_feature)];
      if (!csv::parse_double(cell, insured) || insured != 0.0) return "third-party policy with nonzero sum insured";
    }
  }
  return std::nullopt;
}

}  // namespace

CleanResult clean(const Portfolio& portfolio, const CleaningRules& rules) {
  CleanResult result{Portfolio{portfolio.schema, {}}, {}};
  for (const auto& r : portfolio.records) {
    if (auto reason = rejection_reason(r, portfolio.schema, rules))
      result.rejections.push_back({r.id, std::move(*reason)});
    else
      result.portfolio.records.push_back(r);
  }
  return result;
}

void write_rejections(std::ostream& out, const std::vector<Rejection>& rejections) {
  out << "id,reason\n";
  for (const auto& r : rejections) out << csv::join({r.id, r.reason}) << '\n';
}

std::vector<std::size_t> FoldAssignment::fold_members(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldAssignment::fold_complement(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : fold_of) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

FoldAssignment split_folds(const Portfolio& portfolio, int k, std::uint64_t seed) {
  if (k < 2) throw Error("fold count must be at least 2");
  const std::size_t n = portfolio.size();
  if (static_cast<std::size_t>(k) > n)
    throw Error("fold count " + std::to_string(k) + " exceeds record count " + std::to_string(n));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto gen = rng::stream(seed, 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng::below(gen, i + 1)]);

  FoldAssignment folds{k, seed, std::vector<int>(n, 0)};
  for (std::size_t pos = 0; pos < n; ++pos) folds.fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  return folds;
}

}  // namespace claimrate
