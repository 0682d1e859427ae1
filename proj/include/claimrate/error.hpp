#pragma once

#include <stdexcept>
#include <string>

namespace claimrate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schema declaration problems and header/schema mismatches.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A data row that cannot be ingested. Row numbers are 1-based and count
/// the header as row 1, so they match what a spreadsheet shows.
class RowError : public Error {
 public:
  RowError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Inputs for which a quantity is mathematically undefined, e.g. a zero
/// mean claim rate or a zero error denominator.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace claimrate
