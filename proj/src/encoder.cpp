#include "claimrate/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>

#include "claimrate/csv.hpp"
#include "claimrate/error.hpp"

namespace claimrate {

const CategoryStat* FeatureTable::find(std::string_view value) const {
  if (spec_.kind == FeatureKind::numeric) {
    double x = 0.0;
    if (!csv::parse_double(value, x)) return nullptr;
    auto it = numbers_.find(x);
    return it == numbers_.end() ? nullptr : &it->second;
  }
  auto it = labels_.find(std::string(value));
  return it == labels_.end() ? nullptr : &it->second;
}

double FeatureTable::encode(std::string_view value, double cbar) const {
  if (spec_.kind != FeatureKind::numeric) {
    auto it = labels_.find(std::string(value));
    return it == labels_.end() ? cbar : it->second.mean;
  }
  double x = 0.0;
  if (!csv::parse_double(value, x) || numbers_.empty()) return cbar;

  auto upper = numbers_.lower_bound(x);
  if (upper != numbers_.end() && upper->first == x) return upper->second.mean;
  if (upper == numbers_.begin()) return upper->second.mean;
  if (upper == numbers_.end()) return std::prev(upper)->second.mean;
  const auto lower = std::prev(upper);
  const double t = (x - lower->first) / (upper->first - lower->first);
  return lower->second.mean + t * (upper->second.mean - lower->second.mean);
}

void FeatureTable::set(std::string_view value, CategoryStat stat) {
  if (spec_.kind == FeatureKind::numeric) {
    double x = 0.0;
    if (!csv::parse_double(value, x))
      throw Error("feature '" + spec_.name + "': numeric category '" + std::string(value) + "' is not a number");
    numbers_[x] = stat;
  } else {
    labels_[std::string(value)] = stat;
  }
}

TargetStats::TargetStats(double cbar, std::size_t training_count, std::vector<FeatureTable> tables)
    : cbar_(cbar), training_count_(training_count), tables_(std::move(tables)) {
  if (tables_.empty()) throw Error("target statistics need at least one feature");
  if (!std::isfinite(cbar_)) throw Error("global mean claim rate is not finite");
}

TargetStats TargetStats::fit(const Portfolio& training, std::span<const std::string> features) {
  std::vector<std::size_t> rows(training.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit(training, features, rows);
}

TargetStats TargetStats::fit(const Portfolio& training, std::span<const std::string> features,
                             std::span<const std::size_t> rows) {
  if (rows.empty()) throw Error("cannot fit target statistics on an empty training set");
  if (features.empty()) throw Error("cannot fit target statistics without features");

  struct Accumulator {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::vector<std::size_t> columns;
  std::vector<FeatureTable> tables;
  for (const auto& name : features) {
    const std::size_t col = training.schema.index_of(name);
    if (std::find(columns.begin(), columns.end(), col) != columns.end())
      throw Error("feature '" + name + "' listed twice");
    columns.push_back(col);
    tables.emplace_back(training.schema.features[col]);
  }

  std::vector<std::map<std::string, Accumulator>> label_sums(features.size());
  std::vector<std::map<double, Accumulator>> number_sums(features.size());
  double total = 0.0;
  for (std::size_t row : rows) {
    const PolicyRecord& r = training.records.at(row);
    if (!std::isfinite(r.claim_rate))
      throw Error("record '" + r.id + "' has no finite claim rate; clean the portfolio before fitting");
    total += r.claim_rate;
    for (std::size_t f = 0; f < columns.size(); ++f) {
      const std::string& value = r.values[columns[f]];
      Accumulator* acc = nullptr;
      if (tables[f].kind() == FeatureKind::numeric) {
        double x = 0.0;
        if (!csv::parse_double(value, x))
          throw Error("record '" + r.id + "': feature '" + tables[f].name() + "' has no numeric value");
        acc = &number_sums[f][x];
      } else {
        acc = &label_sums[f][value];
      }
      acc->sum += r.claim_rate;
      ++acc->count;
    }
  }

  for (std::size_t f = 0; f < tables.size(); ++f) {
    for (const auto& [key, acc] : label_sums[f])
      tables[f].labels_.emplace(key, CategoryStat{acc.sum / static_cast<double>(acc.count), acc.count});
    for (const auto& [key, acc] : number_sums[f])
      tables[f].numbers_.emplace(key, CategoryStat{acc.sum / static_cast<double>(acc.count), acc.count});
  }
  return TargetStats(total / static_cast<double>(rows.size()), rows.size(), std::move(tables));
}

const FeatureTable& TargetStats::table(std::string_view feature) const {
  for (const auto& t : tables_)
    if (t.name() == feature) return t;
  throw Error("feature '" + std::string(feature) + "' is not part of the fitted model");
}

std::vector<std::string> TargetStats::feature_names() const {
  std::vector<std::string> names;
  for (const auto& t : tables_) names.push_back(t.name());
  return names;
}

std::vector<std::size_t> TargetStats::bind(const FeatureSchema& schema) const {
  std::vector<std::size_t> binding;
  binding.reserve(tables_.size());
  for (const auto& t : tables_) binding.push_back(schema.index_of(t.name()));
  return binding;
}

EncodedVector TargetStats::encode(std::span<const std::string> values) const {
  if (values.size() != tables_.size())
    throw Error("expected " + std::to_string(tables_.size()) + " feature values, got " + std::to_string(values.size()));
  EncodedVector out(tables_.size());
  for (std::size_t f = 0; f < tables_.size(); ++f) out[f] = tables_[f].encode(values[f], cbar_);
  return out;
}

EncodedVector TargetStats::encode(const PolicyRecord& record, std::span<const std::size_t> binding) const {
  EncodedVector out(tables_.size());
  for (std::size_t f = 0; f < tables_.size(); ++f) out[f] = tables_[f].encode(record.values.at(binding[f]), cbar_);
  return out;
}

EncodedVector TargetStats::encode(const PolicyRecord& record, const FeatureSchema& schema) const {
  return encode(record, bind(schema));
}

double raw_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("encoded vectors differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double gap = a[i] - b[i];
    sum += gap * gap;
  }
  return std::sqrt(sum);
}

double distance(std::span<const double> a, std::span<const double> b, double cbar) {
  if (!(cbar > 0.0)) throw DegenerateError("mean claim rate must be positive to normalize distances");
  return raw_distance(a, b) / cbar;
}

void write_target_stats(std::ostream& out, const TargetStats& stats) {
  std::string order;
  for (const auto& t : stats.tables()) {
    if (!order.empty()) order += ';';
    order += t.name() + ':' + std::string(to_string(t.kind()));
  }
  out << "cbar,training_count,features\n";
  out << csv::join({csv::format_double(stats.cbar()), std::to_string(stats.training_count()), order}) << '\n';
  out << "feature,value,mean,count\n";
  for (const auto& t : stats.tables()) {
    for (const auto& [label, s] : t.labels())
      out << csv::join({t.name(), label, csv::format_double(s.mean), std::to_string(s.count)}) << '\n';
    for (const auto& [x, s] : t.numbers())
      out << csv::join({t.name(), csv::format_double(x), csv::format_double(s.mean), std::to_string(s.count)}) << '\n';
  }
}

TargetStats read_target_stats(std::istream& in) {
  const auto rows = csv::read(in);
  if (rows.size() < 3 || rows[0] != csv::Row{"cbar", "training_count", "features"} || rows[1].size() != 3 ||
      rows[2] != csv::Row{"feature", "value", "mean", "count"})
    throw Error("not a target statistics file");

  double cbar = 0.0;
  double count = 0.0;
  if (!csv::parse_double(rows[1][0], cbar) || !csv::parse_double(rows[1][1], count) || count < 0)
    throw Error("target statistics: bad cbar/training_count row");

  std::vector<FeatureTable> tables;
  std::string_view order = rows[1][2];
  while (!order.empty()) {
    const auto semi = order.find(';');
    const std::string_view item = order.substr(0, semi);
    const auto colon = item.rfind(':');
    if (colon == std::string_view::npos) throw Error("target statistics: bad feature entry '" + std::string(item) + "'");
    tables.emplace_back(FeatureSpec{std::string(item.substr(0, colon)), parse_feature_kind(item.substr(colon + 1))});
    order = semi == std::string_view::npos ? std::string_view{} : order.substr(semi + 1);
  }

  for (std::size_t r = 3; r < rows.size(); ++r) {
    const auto& row = rows[r];
    double mean = 0.0;
    double n = 0.0;
    if (row.size() != 4 || !csv::parse_double(row[2], mean) || !csv::parse_double(row[3], n) || n < 1)
      throw Error("target statistics: malformed row " + std::to_string(r + 1));
    auto it = std::find_if(tables.begin(), tables.end(), [&](const FeatureTable& t) { return t.name() == row[0]; });
    if (it == tables.end()) throw Error("target statistics: row for undeclared feature '" + row[0] + "'");
    it->set(row[1], CategoryStat{mean, static_cast<std::size_t>(n)});
  }
  return TargetStats(cbar, static_cast<std::size_t>(count), std::move(tables));
}

TargetStats load_target_stats(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open target statistics file: " + path);
  return read_target_stats(in);
}

}  // namespace claimrate
