#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace claimrate::csv {

using Row = std::vector<std::string>;

/// Reads comma-separated rows with RFC 4180 quoting (doubled quotes inside
/// quoted fields, embedded commas and newlines). A trailing CR is dropped.
std::vector<Row> read(std::istream& in);
std::vector<Row> read_file(const std::string& path);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);
std::string join(const Row& fields);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Strict full-string parse; leading/trailing blanks are tolerated.
bool parse_double(std::string_view text, double& out);

}  // namespace claimrate::csv
