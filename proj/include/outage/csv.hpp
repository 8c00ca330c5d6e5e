#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "outage/sweep.hpp"

namespace outage {

/// Column order shared by every subcommand. Absent fields are written empty.
/// `quantity` names the derivative or difference a row carries and `reference`
/// holds its finite-difference cross-check.
inline constexpr std::array<std::string_view, 18> kCsvColumns = {
    "method", "t",       "r",      "R",      "P",         "q1",        "q2",       "value",     "uncertainty",
    "n_samples", "seed", "verdict", "q_star", "f_star", "f_at_zero", "f_at_half", "quantity", "reference"};

struct CsvRow {
  std::string method;
  std::optional<int> t;
  std::optional<int> r;
  std::optional<double> rate;
  std::optional<double> power;
  std::optional<double> q1;
  std::optional<double> q2;
  std::optional<double> value;
  std::optional<double> uncertainty;
  std::optional<std::uint64_t> n_samples;
  std::optional<std::uint64_t> seed;
  std::string verdict;
  std::optional<double> q_star;
  std::optional<double> f_star;
  std::optional<double> f_at_zero;
  std::optional<double> f_at_half;
  std::string quantity;
  std::optional<double> reference;

  bool operator==(const CsvRow&) const = default;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to the same double; '.' separator
/// regardless of locale. Non-finite values become the empty string.
std::string format_double(double v);

std::string csv_header();
std::string format_row(const CsvRow& row);
/// Parses one data line. Throws CsvError on a wrong field count or bad number.
CsvRow parse_row(std::string_view line);

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows, bool header = true);
/// Reads rows after the header line; blank lines and lines starting with '#' are skipped.
std::vector<CsvRow> read_csv(std::istream& is);

CsvRow to_csv_row(const SweepRecord& rec, std::optional<std::uint64_t> seed = std::nullopt);
SweepRecord sweep_record_from_row(const CsvRow& row);

}  // namespace outage
