#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tactile {

/// Round-trip decimal text (17 significant digits; "nan", "inf", "-inf").
std::string format_number(double v);
std::string format_numbers(std::span<const double> values, std::string_view sep = ", ");

/// Whole-string parse; nullopt for anything but a complete number.
std::optional<double> parse_number(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

std::string read_file(const std::filesystem::path& path);

/// One non-blank line of a comma-separated file (no quoting).
struct CsvRow {
  std::size_t line = 0;  // 1-based
  std::vector<std::string> cells;
};

/// Lines starting with '#' are returned separately from the data rows; the
/// first data row is the header.
struct CsvTable {
  std::vector<std::pair<std::size_t, std::string>> comments;  // (line, text after '#')
  std::vector<CsvRow> rows;
};

CsvTable parse_csv(std::string_view text);

/// Throws FormatError unless `row` is exactly `columns`.
void expect_header(const CsvRow& row, std::span<const std::string_view> columns);
/// Column `col` of `row` as a number; FormatError names the line otherwise.
double csv_number(const CsvRow& row, std::size_t col);
long long csv_integer(const CsvRow& row, std::size_t col);

/// `section.key = value` documents shared by calibration profiles and
/// simulator scenarios.
///
///   # comment
///   [section]
///   key = value
///   other.key = value      (fully qualified, outside any section)
struct KvEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

class KvDocument {
 public:
  /// Throws FormatError for lines that are neither comments, headers nor
  /// assignments, and for duplicate keys.
  static KvDocument parse(std::string_view text);

  const KvEntry* find(std::string_view section, std::string_view key) const;
  std::vector<std::string> sections() const;
  const std::vector<KvEntry>& entries() const { return entries_; }
  /// Line of a section header, 0 if absent.
  std::size_t section_line(std::string_view section) const;

 private:
  std::vector<KvEntry> entries_;
  std::vector<std::pair<std::string, std::size_t>> sections_;
};

}  // namespace tactile
