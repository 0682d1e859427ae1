#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "claimrate/dataset.hpp"
#include "claimrate/error.hpp"
#include "fixtures.hpp"

using namespace claimrate;

namespace {

FeatureSchema table_schema() {
  std::istringstream in(R"(# subset of the production columns
id POL
claims TOTAL_CLAIMS
exposure EXPOSURE
feature SEX categorical
feature AGE numeric
feature TOC categorical
feature SIV numeric
age AGE
third-party TOC TP SIV
)");
  return parse_schema(in);
}

Portfolio parse(const std::string& text) {
  std::istringstream in(text);
  return parse_portfolio(in, table_schema());
}

}  // namespace

TEST_CASE("schema text parses roles and features") {
  const auto schema = table_schema();
  CHECK(schema.features.size() == 4);
  CHECK(schema.features[1] == FeatureSpec{"AGE", FeatureKind::numeric});
  CHECK(schema.age_feature == "AGE");
  REQUIRE(schema.third_party.has_value());
  CHECK(schema.third_party->third_party_value == "TP");

  std::istringstream again(format_schema(schema));
  CHECK(parse_schema(again) == schema);
}

TEST_CASE("schema validation") {
  SUBCASE("no features") {
    std::istringstream in("id POL\n");
    CHECK_THROWS_AS(parse_schema(in), SchemaError);
  }
  SUBCASE("duplicate feature") {
    std::istringstream in("feature A categorical\nfeature A numeric\n");
    CHECK_THROWS_AS(parse_schema(in), SchemaError);
  }
  SUBCASE("unknown kind") {
    std::istringstream in("feature A ordinal\n");
    CHECK_THROWS_AS(parse_schema(in), SchemaError);
  }
  SUBCASE("role on an undeclared feature") {
    std::istringstream in("feature A categorical\nage AGE\n");
    CHECK_THROWS_AS(parse_schema(in), SchemaError);
  }
  SUBCASE("unknown directive") {
    std::istringstream in("feature A categorical\nweight W\n");
    CHECK_THROWS_AS(parse_schema(in), SchemaError);
  }
}

TEST_CASE("load_portfolio derives the claim rate") {
  const auto p = parse(
      "POL,SEX,AGE,TOC,SIV,TOTAL_CLAIMS,EXPOSURE\n"
      "A1,M,40,CM,20000,0,2.0\n"
      "A2,F,30,TP,0,500,2.5\n");
  REQUIRE(p.size() == 2);
  CHECK(p.records[0].claim_rate == 0.0);
  CHECK(p.records[1].claim_rate == 200.0);
  CHECK(p.records[1].values == std::vector<std::string>{"F", "30", "TP", "0"});
  CHECK(p.records[0].id == "A1");  // row order preserved
}

TEST_CASE("load_portfolio errors") {
  SUBCASE("missing column names the column") {
    try {
      parse("POL,SEX,AGE,TOC,TOTAL_CLAIMS,EXPOSURE\nA1,M,40,CM,0,1\n");
      FAIL("expected a schema error");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("SIV") != std::string::npos);
    }
  }
  SUBCASE("missing claims column") {
    CHECK_THROWS_AS(parse("POL,SEX,AGE,TOC,SIV,EXPOSURE\nA1,M,40,CM,0,1\n"), SchemaError);
  }
  SUBCASE("unparseable numeric cell reports its row") {
    try {
      parse("POL,SEX,AGE,TOC,SIV,TOTAL_CLAIMS,EXPOSURE\nA1,M,40,CM,0,0,1\nA2,M,forty,CM,0,0,1\n");
      FAIL("expected a row error");
    } catch (const RowError& e) {
      CHECK(e.row() == 3);
    }
  }
  SUBCASE("unparseable claims") {
    CHECK_THROWS_AS(parse("POL,SEX,AGE,TOC,SIV,TOTAL_CLAIMS,EXPOSURE\nA1,M,40,CM,0,lots,1\n"), RowError);
  }
  SUBCASE("duplicate id") {
    CHECK_THROWS_AS(parse("POL,SEX,AGE,TOC,SIV,TOTAL_CLAIMS,EXPOSURE\nA1,M,40,CM,0,0,1\nA1,F,41,CM,0,0,1\n"), RowError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_portfolio("/nonexistent/p.csv", table_schema()), Error); }
}

TEST_CASE("query files may omit the target columns") {
  std::istringstream in("POL,SEX,AGE,TOC,SIV\nQ1,M,40,CM,1000\n");
  const auto p = parse_portfolio(in, table_schema(), LoadOptions{false});
  REQUIRE(p.size() == 1);
  CHECK(std::isnan(p.records[0].claim_rate));
}

TEST_CASE("clean applies each rule and logs the reason") {
  const auto p = parse(
      "POL,SEX,AGE,TOC,SIV,TOTAL_CLAIMS,EXPOSURE\n"
      "OK,M,40,CM,20000,100,2\n"
      "OLD,M,90,CM,20000,100,2\n"
      "SHORT,F,40,CM,20000,100,0.01\n"
      "GAP,,40,CM,20000,100,2\n"
      "TPSIV,F,40,TP,5000,100,2\n"
      "NEG,F,40,CM,20000,-5,2\n"
      "AT85,F,85,TP,0,0,1\n");
  const auto result = clean(p);
  REQUIRE(result.portfolio.size() == 2);
  CHECK(result.portfolio.records[0] == p.records[0]);
  CHECK(result.portfolio.records[1].id == "AT85");
  const std::vector<Rejection> expected{
      {"OLD", "age > 85"},
      {"SHORT", "exposure below minimum"},
      {"GAP", "missing value in SEX"},
      {"TPSIV", "third-party policy with nonzero sum insured"},
      {"NEG", "negative total claims"},
  };
  CHECK(result.rejections == expected);

  std::ostringstream log;
  write_rejections(log, result.rejections);
  CHECK(log.str().rfind("id,reason\nOLD,age > 85\n", 0) == 0);
}

TEST_CASE("clean thresholds are configurable and clean is idempotent") {
  const auto p = parse(
      "POL,SEX,AGE,TOC,SIV,TOTAL_CLAIMS,EXPOSURE\n"
      "A,M,70,CM,1,100,0.5\n"
      "B,M,60,CM,1,100,0.2\n"
      "C,M,50,CM,1,100,1\n");
  const auto once = clean(p, CleaningRules{65.0, 0.25});
  CHECK(once.rejections.size() == 2);
  const auto twice = clean(once.portfolio, CleaningRules{65.0, 0.25});
  CHECK(twice.rejections.empty());
  CHECK(twice.portfolio.records == once.portfolio.records);
}

TEST_CASE("claim totals are conserved through claim rates") {
  const auto p = parse(
      "POL,SEX,AGE,TOC,SIV,TOTAL_CLAIMS,EXPOSURE\n"
      "A,M,70,CM,1,123.45,0.7\n"
      "B,M,60,CM,1,0,3.3\n"
      "C,M,50,CM,1,9876.5,1.9\n");
  double from_rates = 0.0, totals = 0.0;
  for (const auto& r : p.records) {
    from_rates += r.claim_rate * r.exposure_years;
    totals += r.total_claims;
  }
  CHECK(from_rates == doctest::Approx(totals).epsilon(1e-14));
}

TEST_CASE("split_folds") {
  auto portfolio_of = [](std::size_t n) {
    std::vector<double> rates(n, 1.0);
    std::vector<std::string> values(n, "x");
    return testing::rates_portfolio("F", values, rates);
  };

  SUBCASE("even division") {
    const auto folds = split_folds(portfolio_of(10), 5, 3);
    CHECK(folds.fold_sizes() == std::vector<std::size_t>{2, 2, 2, 2, 2});
  }
  SUBCASE("uneven division") {
    const auto folds = split_folds(portfolio_of(11), 5, 3);
    CHECK(folds.fold_sizes() == std::vector<std::size_t>{3, 2, 2, 2, 2});
  }
  SUBCASE("deterministic for a seed, different across seeds") {
    const auto p = portfolio_of(50);
    CHECK(split_folds(p, 5, 42).fold_of == split_folds(p, 5, 42).fold_of);
    CHECK(split_folds(p, 5, 42).fold_of != split_folds(p, 5, 43).fold_of);
  }
  SUBCASE("partition property") {
    for (std::size_t n : {2u, 7u, 33u, 100u}) {
      for (int k : {2, 3, 5}) {
        if (static_cast<std::size_t>(k) > n) continue;
        const auto folds = split_folds(portfolio_of(n), k, n * 31 + static_cast<std::size_t>(k));
        std::set<std::size_t> seen;
        std::size_t smallest = n, largest = 0;
        for (int f = 0; f < k; ++f) {
          const auto members = folds.fold_members(f);
          smallest = std::min(smallest, members.size());
          largest = std::max(largest, members.size());
          for (auto i : members) CHECK(seen.insert(i).second);
          CHECK(folds.fold_complement(f).size() == n - members.size());
        }
        CHECK(seen.size() == n);
        CHECK(largest - smallest <= 1);
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(split_folds(portfolio_of(4), 5, 0), Error);
    CHECK_THROWS_AS(split_folds(portfolio_of(4), 1, 0), Error);
  }
}
