#include <doctest.h>

#include <random>
#include <sstream>

#include "claimrate/csv.hpp"

using namespace claimrate;

TEST_CASE("csv reader handles quoting, CRLF and blank lines") {
  std::istringstream in("a,b,c\r\n\"x, y\",\"he said \"\"hi\"\"\",\n\n\"multi\nline\",2,3\n");
  const auto rows = csv::read(in);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == csv::Row{"a", "b", "c"});
  CHECK(rows[1] == csv::Row{"x, y", "he said \"hi\"", ""});
  CHECK(rows[2] == csv::Row{"multi\nline", "2", "3"});
}

TEST_CASE("csv reader rejects an unterminated quote") {
  std::istringstream in("a,\"b\n");
  CHECK_THROWS(csv::read(in));
}

TEST_CASE("joined rows read back to the same fields") {
  std::mt19937_64 gen(7);
  const std::string alphabet = "ab,\"\n x";
  for (int trial = 0; trial < 200; ++trial) {
    csv::Row row;
    const auto width = 1 + gen() % 5;
    for (std::size_t i = 0; i < width; ++i) {
      std::string field;
      const auto len = gen() % 6;
      for (std::size_t j = 0; j < len; ++j) field.push_back(alphabet[gen() % alphabet.size()]);
      row.push_back(field);
    }
    if (row.size() == 1 && row[0].empty()) continue;  // an empty line is not a row
    std::istringstream in(csv::join(row) + "\n");
    const auto back = csv::read(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == row);
  }
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(200.0) == "200");
  CHECK(csv::format_double(-0.0) == "0");
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen);
    double back = 0.0;
    REQUIRE(csv::parse_double(csv::format_double(x), back));
    CHECK(back == x);
  }
}

TEST_CASE("parse_double is strict") {
  double x = 0.0;
  CHECK(csv::parse_double(" 2.5 ", x));
  CHECK(x == 2.5);
  CHECK(csv::parse_double("+3", x));
  CHECK(x == 3.0);
  CHECK_FALSE(csv::parse_double("", x));
  CHECK_FALSE(csv::parse_double("12abc", x));
  CHECK_FALSE(csv::parse_double("inf", x));
  CHECK_FALSE(csv::parse_double("nan", x));
}
