#include "claimrate/feature_analysis.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "claimrate/csv.hpp"
#include "claimrate/error.hpp"

namespace claimrate {

namespace {

double cross_validated_e(const Portfolio& portfolio, std::span<const std::string> features, double kappa,
                         const EvaluationOptions& options) {
  const double grid[] = {kappa};
  return evaluate_kappa_curve(portfolio, features, grid, options).e_curve.front();
}

}  // namespace

ImportanceTable feature_importance(const Portfolio& portfolio, std::span<const std::string> features, double kappa,
                                   const EvaluationOptions& options) {
  if (features.empty()) throw Error("feature importance needs at least one feature");
  ImportanceTable table;
  for (const auto& f : features) {
    const std::string single[] = {f};
    const double e = cross_validated_e(portfolio, single, kappa, options);
    table.rows.push_back({f, e, kappa, e < 1.0});
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const ImportanceRow& a, const ImportanceRow& b) {
    return a.e != b.e ? a.e < b.e : a.feature < b.feature;
  });
  return table;
}

SelectionTrace greedy_select(const Portfolio& portfolio, const ImportanceTable& ranked, double kappa,
                             const EvaluationOptions& options) {
  if (ranked.rows.empty()) throw Error("greedy selection needs a non-empty importance table");
  SelectionTrace trace;
  trace.kappa = kappa;

  const auto& seed = ranked.rows.front();
  trace.selected.push_back(seed.feature);
  trace.final_e = seed.e;
  trace.steps.push_back({seed.feature, 1.0, seed.e, true});

  for (std::size_t i = 1; i < ranked.rows.size(); ++i) {
    const std::string& candidate = ranked.rows[i].feature;
    std::vector<std::string> trial = trace.selected;
    trial.push_back(candidate);
    const double e = cross_validated_e(portfolio, trial, kappa, options);
    const bool keep = e < trace.final_e - kSelectionTolerance;
    trace.steps.push_back({candidate, trace.final_e, e, keep});
    if (keep) {
      trace.selected = std::move(trial);
      trace.final_e = e;
    }
  }
  return trace;
}

void write_importance(std::ostream& out, const ImportanceTable& table) {
  out << "feature,E,kappa,useful\n";
  for (const auto& r : table.rows)
    out << csv::join({r.feature, csv::format_double(r.e), csv::format_double(r.kappa), r.useful ? "1" : "0"}) << '\n';
}

void write_selection(std::ostream& out, const SelectionTrace& trace) {
  out << "step,candidate,E_before,E_after,kept\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    out << csv::join({std::to_string(i), s.candidate, csv::format_double(s.e_before), csv::format_double(s.e_after),
                      s.kept ? "1" : "0"})
        << '\n';
  }
}

void write_selection_report(std::ostream& out, const SelectionTrace& trace) {
  out << "Greedy forward selection at kappa = " << csv::format_double(trace.kappa) << "\n\n";
  std::string current;
  for (const auto& s : trace.steps) {
    const std::string tried = current.empty() ? s.candidate : current + "+" + s.candidate;
    out << "  " << std::left << std::setw(48) << tried << std::right << std::fixed << std::setprecision(4)
        << " E = " << s.e_after << (s.kept ? "  kept" : "  rejected") << '\n';
    if (s.kept) current = tried;
  }
  out << "\nSelected: " << current << '\n';
  out << "Final E:  " << std::fixed << std::setprecision(4) << trace.final_e << '\n';
  out.unsetf(std::ios::fixed);
}

}  // namespace claimrate
