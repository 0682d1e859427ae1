#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "claimrate/error.hpp"
#include "claimrate/feature_analysis.hpp"
#include "claimrate/synth.hpp"

using namespace claimrate;

namespace {

Portfolio planted(std::uint64_t seed, std::size_t n = 5000) {
  synth::SynthConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  return synth::generate(cfg).portfolio;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("importance separates planted signal from noise") {
  const auto p = planted(3);
  const auto table = feature_importance(p, p.schema.feature_names());
  REQUIRE(table.rows.size() == 5);
  for (std::size_t i = 1; i < table.rows.size(); ++i) CHECK(table.rows[i - 1].e <= table.rows[i].e);
  for (const auto& r : table.rows) {
    CHECK(r.kappa == 10.0);
    CHECK(r.useful == (r.e < 1.0));
    if (r.feature.rfind("SIG", 0) == 0) {
      CHECK(r.e < 0.95);
    } else {
      CHECK(r.e >= 0.98);
    }
  }
  CHECK(table.rows[0].feature.rfind("SIG", 0) == 0);
  CHECK(table.rows[1].feature.rfind("SIG", 0) == 0);
}

TEST_CASE("greedy selection keeps signal and rejects noise") {
  const auto p = planted(5);
  const std::vector<std::string> features{"SIG_A", "NOISE_A"};
  const auto table = feature_importance(p, features);
  const auto trace = greedy_select(p, table);
  CHECK(trace.selected == std::vector<std::string>{"SIG_A"});
  REQUIRE(trace.steps.size() == 2);
  CHECK(trace.steps[0].e_before == 1.0);
  CHECK(trace.steps[0].kept);
  CHECK_FALSE(trace.steps[1].kept);
  CHECK(trace.steps[1].e_before == trace.steps[0].e_after);
  CHECK(trace.final_e <= table.rows.front().e);
}

TEST_CASE("selection trace invariants on the default planted portfolio") {
  const auto p = planted(8, 2000);
  const auto table = feature_importance(p, p.schema.feature_names());
  const auto trace = greedy_select(p, table);
  REQUIRE(trace.steps.size() == table.rows.size());
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    CHECK(s.candidate == table.rows[i].feature);
    if (s.kept) {
      CHECK(s.e_after < s.e_before);
      kept.push_back(s.candidate);
    }
  }
  CHECK(kept == trace.selected);
  CHECK(trace.final_e <= table.rows.front().e);
  CHECK(contains(trace.selected, "SIG_A"));
  CHECK(contains(trace.selected, "SIG_B"));

  const auto again = greedy_select(p, table);
  CHECK(again.selected == trace.selected);
  CHECK(again.final_e == trace.final_e);
}

TEST_CASE("single-feature input selects that feature") {
  const auto p = planted(9, 1000);
  const std::vector<std::string> one{"SIG_B"};
  const auto table = feature_importance(p, one);
  const auto trace = greedy_select(p, table);
  CHECK(trace.selected == one);
  CHECK(trace.final_e == table.rows[0].e);
}

TEST_CASE("all-noise portfolio stays near E = 1") {
  // Sampling jitter of order 1e-4 can still admit a second noise feature.
  synth::SynthConfig cfg;
  cfg.n = 5000;
  cfg.signals.clear();
  int at_most_one = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto p = synth::generate(cfg).portfolio;
    const auto trace = greedy_select(p, feature_importance(p, p.schema.feature_names()));
    CHECK(trace.final_e >= 0.98);
    CHECK(trace.selected.size() < 3);
    at_most_one += trace.selected.size() <= 1;
  }
  CHECK(at_most_one >= 8);
}

TEST_CASE("importance ties are broken by name") {
  // Constant feature values carry no information: every feature scores E = 1.
  synth::SynthConfig cfg;
  cfg.n = 400;
  cfg.signals.clear();
  cfg.noise = {{"Z", 1}, {"A", 1}, {"M", 1}};
  const auto p = synth::generate(cfg).portfolio;
  const auto table = feature_importance(p, p.schema.feature_names());
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].feature == "A");
  CHECK(table.rows[1].feature == "M");
  CHECK(table.rows[2].feature == "Z");
  for (const auto& r : table.rows) {
    CHECK(r.e == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(r.useful);
  }
}

TEST_CASE("errors") {
  const auto p = planted(1, 100);
  CHECK_THROWS_AS(feature_importance(p, std::vector<std::string>{}), Error);
  CHECK_THROWS_AS(greedy_select(p, ImportanceTable{}), Error);
}

TEST_CASE("report writers") {
  ImportanceTable table{{{"B", 0.5, 10.0, true}, {"A", 1.25, 10.0, false}}};
  std::ostringstream imp;
  write_importance(imp, table);
  CHECK(imp.str() == "feature,E,kappa,useful\nB,0.5,10,1\nA,1.25,10,0\n");

  SelectionTrace trace;
  trace.steps = {{"B", 1.0, 0.5, true}, {"A", 0.5, 0.75, false}};
  trace.selected = {"B"};
  trace.final_e = 0.5;
  std::ostringstream sel;
  write_selection(sel, trace);
  CHECK(sel.str() == "step,candidate,E_before,E_after,kept\n0,B,1,0.5,1\n1,A,0.5,0.75,0\n");

  std::ostringstream text;
  write_selection_report(text, trace);
  CHECK(text.str().find("Selected: B\n") != std::string::npos);
  CHECK(text.str().find("B+A") != std::string::npos);
  CHECK(text.str().find("rejected") != std::string::npos);
}
