#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "claimrate/evaluation.hpp"

namespace claimrate {

struct ImportanceRow {
  std::string feature;
  double e = 0.0;
  double kappa = 10.0;
  bool useful = false;  // e < 1
};

/// Single-feature cross-validated E at a fixed kappa, ascending by E with
/// ties broken by feature name.
struct ImportanceTable {
  std::vector<ImportanceRow> rows;
};

ImportanceTable feature_importance(const Portfolio& portfolio, std::span<const std::string> features,
                                   double kappa = 10.0, const EvaluationOptions& options = {});

struct SelectionStep {
  std::string candidate;
  double e_before = 0.0;
  double e_after = 0.0;
  bool kept = false;
};

/// Forward selection trace. The first step seeds the set with the most
/// important feature (its e_before is the no-feature baseline 1.0); later
/// steps keep a candidate only on a strict decrease of E.
struct SelectionTrace {
  std::vector<SelectionStep> steps;
  std::vector<std::string> selected;
  double final_e = 0.0;
  double kappa = 10.0;
};

/// Minimum decrease in E that counts as an improvement.
inline constexpr double kSelectionTolerance = 1e-12;

SelectionTrace greedy_select(const Portfolio& portfolio, const ImportanceTable& ranked, double kappa = 10.0,
                             const EvaluationOptions& options = {});

void write_importance(std::ostream& out, const ImportanceTable& table);
void write_selection(std::ostream& out, const SelectionTrace& trace);
void write_selection_report(std::ostream& out, const SelectionTrace& trace);

}  // namespace claimrate
