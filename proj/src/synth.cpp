#include "claimrate/synth.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "claimrate/csv.hpp"
#include "claimrate/error.hpp"
#include "claimrate/random.hpp"

namespace claimrate::synth {

void SynthConfig::validate() const {
  if (n < 1) throw Error("synth: n must be >= 1");
  if (!(base_frequency >= 0.0)) throw Error("synth: base frequency must be >= 0");
  if (!(severity_mean > 0.0) || !(severity_sigma >= 0.0)) throw Error("synth: severity mean must be > 0, sigma >= 0");
  if (!(exposure_min > 0.0) || !(exposure_max >= exposure_min)) throw Error("synth: need 0 < exposure_min <= exposure_max");
  if (!(third_party_share >= 0.0 && third_party_share <= 1.0)) throw Error("synth: third-party share must be in [0, 1]");
  if (signals.empty() && noise.empty()) throw Error("synth: no features configured");
  std::set<std::string> names;
  for (const auto& s : signals) {
    if (s.factors.empty()) throw Error("synth: signal feature '" + s.name + "' has no categories");
    for (double f : s.factors)
      if (!(f > 0.0)) throw Error("synth: risk factors must be > 0");
    if (!names.insert(s.name).second) throw Error("synth: duplicate feature '" + s.name + "'");
  }
  for (const auto& z : noise) {
    if (z.categories < 1) throw Error("synth: noise feature '" + z.name + "' has no categories");
    if (!names.insert(z.name).second) throw Error("synth: duplicate feature '" + z.name + "'");
  }
  if (third_party_share > 0.0 && (names.count("TOC") || names.count("SIV")))
    throw Error("synth: TOC and SIV are reserved when third-party share > 0");
}

FeatureSchema SynthConfig::schema() const {
  FeatureSchema schema;
  schema.id_column = "POL";
  schema.claims_column = "TOTAL_CLAIMS";
  schema.exposure_column = "EXPOSURE";
  for (const auto& s : signals) schema.features.push_back({s.name, s.kind});
  for (const auto& z : noise) schema.features.push_back({z.name, FeatureKind::categorical});
  if (third_party_share > 0.0) {
    schema.features.push_back({"TOC", FeatureKind::categorical});
    schema.features.push_back({"SIV", FeatureKind::numeric});
    schema.third_party = ThirdPartyRule{"TOC", "TP", "SIV"};
  }
  return schema;
}

std::vector<std::string> SynthConfig::signal_names() const {
  std::vector<std::string> out;
  for (const auto& s : signals) out.push_back(s.name);
  return out;
}

std::vector<std::string> SynthConfig::noise_names() const {
  std::vector<std::string> out;
  for (const auto& z : noise) out.push_back(z.name);
  return out;
}

SynthPortfolio generate(const SynthConfig& config) {
  config.validate();
  SynthPortfolio out{Portfolio{config.schema(), {}}, {}};
  out.portfolio.records.reserve(config.n);
  out.expected_rate.reserve(config.n);

  const double mu = std::log(config.severity_mean) - 0.5 * config.severity_sigma * config.severity_sigma;
  for (std::size_t i = 0; i < config.n; ++i) {
    auto gen = rng::stream(config.seed, i);
    PolicyRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "S%07zu", i + 1);
    rec.id = id;

    double factor = 1.0;
    for (const auto& s : config.signals) {
      const auto level = rng::below(gen, s.factors.size());
      factor *= s.factors[level];
      rec.values.push_back(s.kind == FeatureKind::numeric ? std::to_string(level) : "c" + std::to_string(level));
    }
    for (const auto& z : config.noise) rec.values.push_back("c" + std::to_string(rng::below(gen, z.categories)));
    if (config.third_party_share > 0.0) {
      const bool third_party = rng::open_unit(gen) < config.third_party_share;
      rec.values.push_back(third_party ? "TP" : "CM");
      rec.values.push_back(third_party ? "0" : std::to_string(10000 * (1 + rng::below(gen, 5))));
    }

    rec.exposure_years = rng::uniform(gen, config.exposure_min, config.exposure_max);
    const double frequency = config.base_frequency * factor;
    const auto claims = rng::poisson(gen, frequency * rec.exposure_years);
    double total = 0.0;
    for (std::uint64_t c = 0; c < claims; ++c) total += std::exp(mu + config.severity_sigma * rng::normal(gen));
    rec.total_claims = total;
    rec.claim_rate = rec.total_claims / rec.exposure_years;

    out.portfolio.records.push_back(std::move(rec));
    out.expected_rate.push_back(frequency * config.severity_mean);
  }
  return out;
}

void write_ground_truth(std::ostream& out, const SynthPortfolio& synth) {
  out << "id,expected_rate\n";
  for (std::size_t i = 0; i < synth.portfolio.size(); ++i)
    out << csv::join({synth.portfolio.records[i].id, csv::format_double(synth.expected_rate[i])}) << '\n';
}

double oracle_predict(std::span<const double> query, std::span<const EncodedVector> training,
                      std::span<const double> claim_rates, double cbar, double kappa) {
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t s = 0; s < training.size(); ++s) {
    double squares = 0.0;
    for (std::size_t f = 0; f < query.size(); ++f) squares += (query[f] - training[s][f]) * (query[f] - training[s][f]);
    const double d = std::sqrt(squares) / cbar;
    numerator += claim_rates[s] / std::pow(1.0 + d, kappa);
    denominator += 1.0 / std::pow(1.0 + d, kappa);
  }
  return numerator / denominator;
}

}  // namespace claimrate::synth
