#include "claimrate/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "claimrate/csv.hpp"
#include "claimrate/dataset.hpp"
#include "claimrate/encoder.hpp"
#include "claimrate/error.hpp"
#include "claimrate/evaluation.hpp"
#include "claimrate/explain.hpp"
#include "claimrate/feature_analysis.hpp"
#include "claimrate/predictor.hpp"
#include "claimrate/synth.hpp"

namespace claimrate::cli {

namespace {

namespace fs = std::filesystem;

/// Report files held in memory until the command finishes.
class Outputs {
 public:
  std::ostream& file(const std::string& name) { return files_[name]; }

  void commit(const std::string& dir) {
    fs::create_directories(dir);
    for (auto& [name, content] : files_) {
      const fs::path target = fs::path(dir) / name;
      const fs::path tmp = fs::path(dir) / ("." + name + ".tmp");
      {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << content.str();
        if (!f) throw Error("cannot write " + target.string());
      }
      fs::rename(tmp, target);
    }
  }

 private:
  std::map<std::string, std::ostringstream> files_;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(std::string("missing required flag ") + flag);
}

void require_file(const std::string& path, const char* flag) {
  require(path, flag);
  if (!fs::is_regular_file(path)) throw Error(std::string("input file not found for ") + flag + ": " + path);
}

CleaningRules cleaning_rules(const RunConfig& cfg) {
  return CleaningRules{cfg.max_age, cfg.min_exposure};
}

std::vector<std::string> selected_features(const RunConfig& cfg, const FeatureSchema& schema) {
  if (cfg.features.empty()) return schema.feature_names();
  std::vector<std::string> out;
  std::stringstream list(cfg.features);
  for (std::string item; std::getline(list, item, ',');) {
    if (item.empty()) continue;
    schema.index_of(item);
    out.push_back(item);
  }
  if (out.empty()) throw Error("--features selects no features");
  return out;
}

EvaluationOptions evaluation_options(const RunConfig& cfg) {
  return EvaluationOptions{cfg.folds, cfg.seed, cfg.threads, !cfg.raw_distance};
}

/// Loads and cleans a training portfolio; the rejection log is a report file.
Portfolio load_clean(const RunConfig& cfg, const std::string& path, const FeatureSchema& schema, Outputs& outputs,
                     std::ostream& out) {
  const Portfolio raw = load_portfolio(path, schema);
  CleanResult cleaned = clean(raw, cleaning_rules(cfg));
  write_rejections(outputs.file("rejections.csv"), cleaned.rejections);
  out << "records: " << raw.size() << " loaded, " << cleaned.rejections.size() << " rejected, "
      << cleaned.portfolio.size() << " kept\n";
  if (cleaned.portfolio.empty()) throw Error("no records left after cleaning " + path);
  return std::move(cleaned.portfolio);
}

FeatureSchema load_schema_flag(const RunConfig& cfg) {
  require_file(cfg.schema, "--schema");
  return load_schema(cfg.schema);
}

KernelModel training_model(const RunConfig& cfg, const FeatureSchema& schema, Outputs& outputs, std::ostream& out) {
  const std::string train = cfg.train.empty() ? cfg.input : cfg.train;
  require_file(train, "--train");
  const Portfolio training = load_clean(cfg, train, schema, outputs, out);
  if (cfg.stats.empty()) return KernelModel::fit(training, selected_features(cfg, schema), cfg.kappa, cfg.gamma, !cfg.raw_distance);

  require_file(cfg.stats, "--stats");
  TargetStats stats = load_target_stats(cfg.stats);
  const auto binding = stats.bind(schema);
  std::vector<EncodedVector> encoded;
  for (const auto& r : training.records) encoded.push_back(stats.encode(r, binding));
  const auto rates = training.claim_rates();
  return KernelModel(std::move(stats), encoded, rates, cfg.kappa, cfg.gamma, !cfg.raw_distance);
}

void cmd_fit(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  require_file(cfg.input, "--input");
  const auto schema = load_schema_flag(cfg);
  const Portfolio training = load_clean(cfg, cfg.input, schema, outputs, out);
  const TargetStats stats = TargetStats::fit(training, selected_features(cfg, schema));
  write_target_stats(outputs.file("target_stats.csv"), stats);
  out << "cbar: " << csv::format_double(stats.cbar()) << '\n';
  for (const auto& t : stats.tables()) out << "  " << t.name() << ": " << t.category_count() << " categories\n";
}

void cmd_evaluate(const RunConfig& cfg, Outputs& outputs, std::ostream& out, bool write_star) {
  require_file(cfg.input, "--input");
  const auto schema = load_schema_flag(cfg);
  const Portfolio portfolio = load_clean(cfg, cfg.input, schema, outputs, out);
  const auto grid = parse_kappa_grid(cfg.kappa_grid);
  const auto report = evaluate_kappa_curve(portfolio, selected_features(cfg, schema), grid, evaluation_options(cfg));
  write_kappa_curve(outputs.file("kappa_curve.csv"), report);
  if (write_star) {
    auto& star = outputs.file("kappa_star.csv");
    star << "kappa_star,E\n" << csv::format_double(report.kappa_star) << ',' << csv::format_double(report.e_at_star) << '\n';
  }
  out << "kappa*: " << csv::format_double(report.kappa_star) << "  E(kappa*): " << fixed(report.e_at_star) << '\n';
}

void cmd_importance(const RunConfig& cfg, Outputs& outputs, std::ostream& out, bool select) {
  require_file(cfg.input, "--input");
  const auto schema = load_schema_flag(cfg);
  const Portfolio portfolio = load_clean(cfg, cfg.input, schema, outputs, out);
  const auto options = evaluation_options(cfg);
  const auto table = feature_importance(portfolio, selected_features(cfg, schema), cfg.kappa, options);
  write_importance(outputs.file("importance.csv"), table);
  out << "importance at kappa " << csv::format_double(cfg.kappa) << ":\n";
  for (const auto& r : table.rows) out << "  " << r.feature << "  E = " << fixed(r.e) << (r.useful ? "" : "  (not useful)") << '\n';
  if (!select) return;

  const auto trace = greedy_select(portfolio, table, cfg.kappa, options);
  write_selection(outputs.file("selection.csv"), trace);
  write_selection_report(outputs.file("selection.txt"), trace);
  out << "selected:";
  for (const auto& f : trace.selected) out << ' ' << f;
  out << "\nfinal E: " << fixed(trace.final_e) << '\n';
}

void cmd_predict(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  const auto schema = load_schema_flag(cfg);
  require_file(cfg.input, "--input");
  const KernelModel model = training_model(cfg, schema, outputs, out);
  const Portfolio queries = load_portfolio(cfg.input, schema, LoadOptions{false});
  const auto binding = model.stats().bind(schema);
  std::vector<EncodedVector> encoded;
  encoded.reserve(queries.size());
  for (const auto& r : queries.records) encoded.push_back(model.stats().encode(r, binding));
  const auto predictions = predict_batch(encoded, model, cfg.threads);

  auto& file = outputs.file("predictions.csv");
  file << "id,predicted_claim_rate,kappa,gamma,nearest_distance\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& p = predictions[i];
    file << csv::join({queries.records[i].id, csv::format_double(p.value), csv::format_double(p.kappa_used),
                       csv::format_double(p.gamma_used), csv::format_double(p.nearest_distance)})
         << '\n';
  }
  out << "predicted " << queries.size() << " records at kappa " << csv::format_double(model.kappa()) << ", gamma "
      << csv::format_double(model.gamma()) << '\n';
}

void cmd_explain(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  const auto schema = load_schema_flag(cfg);
  const KernelModel model = training_model(cfg, schema, outputs, out);
  const std::string query_path = cfg.input.empty() ? cfg.train : cfg.input;
  require_file(query_path, "--input");
  const Portfolio queries = load_portfolio(query_path, schema, LoadOptions{false});
  if (queries.empty()) throw Error("no records to explain in " + query_path);

  const PolicyRecord* record = &queries.records.front();
  if (!cfg.record.empty()) {
    record = nullptr;
    for (const auto& r : queries.records)
      if (r.id == cfg.record) record = &r;
    if (!record) throw Error("record '" + cfg.record + "' not found in " + query_path);
  }
  const std::string label = cfg.label.empty() ? fs::path(cfg.train.empty() ? cfg.input : cfg.train).stem().string() : cfg.label;
  const auto report = explain(model, *record, schema, cfg.kappa, label);
  write_impact_report(outputs.file("explain.csv"), report);

  out << "record " << report.record_id << " (kappa " << csv::format_double(report.kappa) << ", cbar "
      << csv::format_double(report.cbar) << ")\n";
  for (const auto& r : report.rows) out << "  " << r.feature << '=' << r.value << "  I = " << fixed(r.impact, 2) << '\n';
  out << "  CLR  I = " << fixed(report.predicted_ratio, 2) << '\n';
}

void cmd_calibrate(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  const auto schema = load_schema_flag(cfg);
  require_file(cfg.train, "--train");
  require_file(cfg.input, "--input");
  const KernelModel model = training_model(cfg, schema, outputs, out);
  const Portfolio holdout = clean(load_portfolio(cfg.input, schema), cleaning_rules(cfg)).portfolio;
  const auto cal = calibrate(model, holdout, cfg.label, cfg.threads);
  write_calibration(outputs.file("calibration.csv"), cal);
  out << "gamma correction: " << csv::format_double(cal.gamma) << " (actual " << csv::format_double(cal.actual_total)
      << ", predicted " << csv::format_double(cal.predicted_total) << ")\n";
  out << "calibrated gamma: " << csv::format_double(model.gamma() * cal.gamma) << '\n';
}

void cmd_synth(const RunConfig& cfg, Outputs& outputs, std::ostream& out) {
  synth::SynthConfig config;
  config.n = cfg.n;
  config.seed = cfg.seed;
  config.third_party_share = cfg.third_party_share;
  const auto generated = synth::generate(config);
  write_portfolio(outputs.file("portfolio.csv"), generated.portfolio);
  synth::write_ground_truth(outputs.file("ground_truth.csv"), generated);
  outputs.file("schema.txt") << format_schema(generated.portfolio.schema);
  out << "generated " << generated.portfolio.size() << " records (seed " << cfg.seed << ")\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Kernel-weighted claim-rate prediction with target-encoded distances", "claimrate"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Input portfolio CSV");
    sub->add_option("--schema", cfg.schema, "Schema file");
    sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    sub->add_option("--features", cfg.features, "Comma-separated feature subset");
    sub->add_option("--folds", cfg.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000000));
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sub->add_option("--kappa", cfg.kappa, "Kernel exponent")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--kappa-grid", cfg.kappa_grid, "Kappa grid lo:hi:step")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker thread cap")->capture_default_str()->check(CLI::Range(1u, 1024u));
    sub->add_option("--min-exposure", cfg.min_exposure, "Minimum exposure in years")->capture_default_str();
    sub->add_option("--max-age", cfg.max_age, "Maximum driver age")->capture_default_str();
    sub->add_option("--train", cfg.train, "Training portfolio CSV");
    sub->add_option("--stats", cfg.stats, "Target statistics CSV from `fit`");
    sub->add_option("--gamma", cfg.gamma, "Calibration factor")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--record", cfg.record, "Policy id to explain");
    sub->add_option("--label", cfg.label, "Subset or period label");
    sub->add_flag("--raw-distance", cfg.raw_distance, "Do not divide distances by the mean claim rate");
  };

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"fit", "Fit per-category mean claim rates"},
      {"evaluate", "Cross-validated E(kappa) curve"},
      {"optimize-kappa", "E(kappa) curve and its argmin"},
      {"importance", "Single-feature E at fixed kappa"},
      {"select", "Importance plus greedy forward selection"},
      {"predict", "Predict claim rates for query records"},
      {"explain", "Per-feature impact report for one record"},
      {"calibrate", "Scale factor matching predicted to actual claims"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic planted portfolio");
  synth_cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  synth_cmd->add_option("--n", cfg.n, "Record count")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--third-party-share", cfg.third_party_share, "Fraction of third-party policies")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--threads", cfg.threads, "Worker thread cap (unused)")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    Outputs outputs;
    const std::string& c = cfg.command;
    if (c == "fit") cmd_fit(cfg, outputs, out);
    else if (c == "evaluate") cmd_evaluate(cfg, outputs, out, false);
    else if (c == "optimize-kappa") cmd_evaluate(cfg, outputs, out, true);
    else if (c == "importance") cmd_importance(cfg, outputs, out, false);
    else if (c == "select") cmd_importance(cfg, outputs, out, true);
    else if (c == "predict") cmd_predict(cfg, outputs, out);
    else if (c == "explain") cmd_explain(cfg, outputs, out);
    else if (c == "calibrate") cmd_calibrate(cfg, outputs, out);
    else if (c == "synth") cmd_synth(cfg, outputs, out);
    outputs.commit(cfg.out);
  } catch (const std::exception& e) {
    err << "claimrate " << cfg.command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace claimrate::cli
