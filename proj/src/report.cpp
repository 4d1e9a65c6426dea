#include "tactile/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "tactile/text_util.hpp"

namespace tactile {

namespace {

constexpr std::string_view kSweepColumns[] = {"cutoff_s",      "exp_error_pct", "raw_error_pct",
                                              "reduction_pct", "n_trials",      "n_excluded"};
constexpr std::string_view kBenchColumns[] = {"technique",     "mean_error_N", "sd_error_N",
                                              "percent_error", "n_trials",     "n_excluded"};

template <std::size_t N>
void write_header(std::ostream& out, const std::string_view (&cols)[N]) {
  for (std::size_t i = 0; i < N; ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

std::size_t count_cell(const CsvRow& row, std::size_t col) {
  const long long v = csv_integer(row, col);
  if (v < 0) throw FormatError(row.line, "counts must be non-negative");
  return static_cast<std::size_t>(v);
}

std::string fixed(double v, int digits) {
  if (is_missing(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Pads every column to its widest cell; the first column is left-aligned.
std::string align(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string pad(width[i] - row[i].size(), ' ');
      if (i) line += "  ";
      line += i == 0 ? row[i] + pad : pad + row[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

}  // namespace

void write_sweep(std::ostream& out, std::span<const SweepRow> rows) {
  write_header(out, kSweepColumns);
  for (const auto& r : rows) {
    out << format_number(r.cutoff) << ',' << format_number(r.exp_error) << ','
        << format_number(r.raw_error) << ',' << format_number(r.reduction) << ',' << r.n_trials
        << ',' << r.n_excluded << '\n';
  }
}

std::vector<SweepRow> parse_sweep(std::string_view text) {
  const CsvTable table = parse_csv(text);
  if (table.rows.empty()) throw FormatError(1, "sweep results have no header");
  expect_header(table.rows.front(), kSweepColumns);
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const CsvRow& row = table.rows[i];
    if (row.cells.size() != std::size(kSweepColumns)) throw FormatError(row.line, "expected 6 columns");
    rows.push_back({csv_number(row, 0), csv_number(row, 1), csv_number(row, 2), csv_number(row, 3),
                    count_cell(row, 4), count_cell(row, 5)});
  }
  return rows;
}

void write_bench(std::ostream& out, std::span<const BenchRow> rows) {
  write_header(out, kBenchColumns);
  for (const auto& r : rows) {
    if (r.technique.find(',') != std::string::npos) {
      throw std::invalid_argument("technique names cannot contain commas");
    }
    out << r.technique << ',' << format_number(r.mean_error) << ',' << format_number(r.sd_error)
        << ',' << format_number(r.percent_error) << ',' << r.n_trials << ',' << r.n_excluded
        << '\n';
  }
}

std::vector<BenchRow> parse_bench(std::string_view text) {
  const CsvTable table = parse_csv(text);
  if (table.rows.empty()) throw FormatError(1, "benchmark results have no header");
  expect_header(table.rows.front(), kBenchColumns);
  std::vector<BenchRow> rows;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const CsvRow& row = table.rows[i];
    if (row.cells.size() != std::size(kBenchColumns)) throw FormatError(row.line, "expected 6 columns");
    if (row.cells[0].empty()) throw FormatError(row.line, "empty technique name");
    rows.push_back({row.cells[0], csv_number(row, 1), csv_number(row, 2), csv_number(row, 3),
                    count_cell(row, 4), count_cell(row, 5)});
  }
  return rows;
}

std::string_view to_string(ReportKind kind) { return kind == ReportKind::sweep ? "sweep" : "bench"; }

ReportKind parse_report_kind(std::string_view name) {
  if (name == "sweep") return ReportKind::sweep;
  if (name == "bench") return ReportKind::bench;
  throw std::invalid_argument("unknown report kind '" + std::string(name) + "'");
}

ReportKind detect_report_kind(std::string_view text) {
  const CsvTable table = parse_csv(text);
  if (table.rows.empty()) throw FormatError(1, "results file has no header");
  const auto& cells = table.rows.front().cells;
  if (!cells.empty() && cells[0] == kSweepColumns[0]) return ReportKind::sweep;
  if (!cells.empty() && cells[0] == kBenchColumns[0]) return ReportKind::bench;
  throw FormatError(table.rows.front().line, "not a sweep or benchmark results file");
}

std::string render_sweep_table(std::span<const SweepRow> rows) {
  if (rows.empty()) return "no rows\n";
  std::vector<std::vector<std::string>> cells{
      {"Cutoff time (s)", "Exponential error (%)", "Recorded error (%)", "Reduction ratio (%)",
       "Trials", "Excluded"}};
  for (const auto& r : rows) {
    cells.push_back({fixed(r.cutoff, 1), fixed(r.exp_error, 2), fixed(r.raw_error, 2),
                     fixed(r.reduction, 0), std::to_string(r.n_trials),
                     std::to_string(r.n_excluded)});
  }
  return align(cells);
}

std::string render_bench_table(std::span<const BenchRow> rows) {
  if (rows.empty()) return "no rows\n";
  std::vector<std::vector<std::string>> cells{
      {"Technique", "Average error (N)", "Percent error (%)", "Trials", "Excluded"}};
  for (const auto& r : rows) {
    cells.push_back({r.technique, fixed(r.mean_error, 3) + " +- " + fixed(r.sd_error, 3),
                     fixed(r.percent_error, 2), std::to_string(r.n_trials),
                     std::to_string(r.n_excluded)});
  }
  return align(cells);
}

}  // namespace tactile
