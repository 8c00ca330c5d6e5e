#include "outage/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace outage {

namespace {

template <typename T>
std::optional<T> parse_field(std::string_view field, std::string_view column) {
  if (field.empty()) return std::nullopt;
  T v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw CsvError("bad value '" + std::string(field) + "' in column " + std::string(column));
  }
  return v;
}

template <typename T>
std::string field_text(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

std::optional<double> finite_or_empty(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

double or_nan(const std::optional<double>& v) { return v ? *v : std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_header() {
  std::string out;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) out += ',';
    out += kCsvColumns[i];
  }
  return out;
}

std::string format_row(const CsvRow& row) {
  const std::array<std::string, 18> fields = {
      row.method,          field_text(row.t),         field_text(row.r),         field_text(row.rate),
      field_text(row.power), field_text(row.q1),      field_text(row.q2),        field_text(row.value),
      field_text(row.uncertainty), field_text(row.n_samples), field_text(row.seed), row.verdict,
      field_text(row.q_star), field_text(row.f_star), field_text(row.f_at_zero), field_text(row.f_at_half),
      row.quantity,        field_text(row.reference)};
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

CsvRow parse_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::array<std::string_view, 18> f;
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (count == f.size()) throw CsvError("too many fields in CSV row");
    f[count++] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != f.size()) throw CsvError("expected 18 fields, found " + std::to_string(count));

  CsvRow row;
  row.method = std::string(f[0]);
  row.t = parse_field<int>(f[1], kCsvColumns[1]);
  row.r = parse_field<int>(f[2], kCsvColumns[2]);
  row.rate = parse_field<double>(f[3], kCsvColumns[3]);
  row.power = parse_field<double>(f[4], kCsvColumns[4]);
  row.q1 = parse_field<double>(f[5], kCsvColumns[5]);
  row.q2 = parse_field<double>(f[6], kCsvColumns[6]);
  row.value = parse_field<double>(f[7], kCsvColumns[7]);
  row.uncertainty = parse_field<double>(f[8], kCsvColumns[8]);
  row.n_samples = parse_field<std::uint64_t>(f[9], kCsvColumns[9]);
  row.seed = parse_field<std::uint64_t>(f[10], kCsvColumns[10]);
  row.verdict = std::string(f[11]);
  row.q_star = parse_field<double>(f[12], kCsvColumns[12]);
  row.f_star = parse_field<double>(f[13], kCsvColumns[13]);
  row.f_at_zero = parse_field<double>(f[14], kCsvColumns[14]);
  row.f_at_half = parse_field<double>(f[15], kCsvColumns[15]);
  row.quantity = std::string(f[16]);
  row.reference = parse_field<double>(f[17], kCsvColumns[17]);
  return row;
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows, bool header) {
  if (header) os << csv_header() << '\n';
  for (const auto& row : rows) os << format_row(row) << '\n';
}

std::vector<CsvRow> read_csv(std::istream& is) {
  std::vector<CsvRow> rows;
  std::string line;
  bool seen_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != csv_header()) throw CsvError("unexpected CSV header: " + line);
      seen_header = true;
      continue;
    }
    rows.push_back(parse_row(line));
  }
  if (!seen_header) throw CsvError("CSV input has no header row");
  return rows;
}

CsvRow to_csv_row(const SweepRecord& rec, std::optional<std::uint64_t> seed) {
  CsvRow row;
  row.method = "quadrature";
  row.t = 2;
  row.r = rec.r;
  row.rate = rec.rate;
  row.power = rec.power;
  row.uncertainty = finite_or_empty(rec.err_bound);
  row.seed = seed;
  row.verdict = std::string(to_string(rec.verdict));
  row.q_star = finite_or_empty(rec.q_star);
  row.f_star = finite_or_empty(rec.f_star);
  row.f_at_zero = finite_or_empty(rec.f_at_zero);
  row.f_at_half = finite_or_empty(rec.f_at_half);
  return row;
}

SweepRecord sweep_record_from_row(const CsvRow& row) {
  if (!row.r || !row.rate || !row.power || row.verdict.empty()) {
    throw CsvError("row is missing sweep fields (r, R, P, verdict)");
  }
  SweepRecord rec;
  rec.r = *row.r;
  rec.rate = *row.rate;
  rec.power = *row.power;
  rec.q_star = or_nan(row.q_star);
  rec.f_star = or_nan(row.f_star);
  rec.f_at_zero = or_nan(row.f_at_zero);
  rec.f_at_half = or_nan(row.f_at_half);
  rec.err_bound = or_nan(row.uncertainty);
  try {
    rec.verdict = verdict_from_string(row.verdict);
  } catch (const std::invalid_argument& e) {
    throw CsvError(e.what());
  }
  return rec;
}

}  // namespace outage
