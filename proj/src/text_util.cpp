#include "tactile/text_util.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "tactile/errors.hpp"

namespace tactile {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_numbers(std::span<const double> values, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format_number(values[i]);
  }
  return out;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("IoError", "cannot open " + tmp.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw DataError("IoError", "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("IoError", "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("IoError", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.comments.emplace_back(line_no, std::string(trim(line.substr(1))));
      continue;
    }
    table.rows.push_back({line_no, split(line, ',')});
  }
  return table;
}

void expect_header(const CsvRow& row, std::span<const std::string_view> columns) {
  bool ok = row.cells.size() == columns.size();
  for (std::size_t i = 0; ok && i < columns.size(); ++i) ok = row.cells[i] == columns[i];
  if (!ok) {
    std::string want;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) want += ',';
      want += columns[i];
    }
    throw FormatError(row.line, "expected header '" + want + "'");
  }
}

double csv_number(const CsvRow& row, std::size_t col) {
  if (col >= row.cells.size()) throw FormatError(row.line, "missing column " + std::to_string(col + 1));
  const auto v = parse_number(row.cells[col]);
  if (!v) throw FormatError(row.line, "not a number: '" + row.cells[col] + "'");
  return *v;
}

long long csv_integer(const CsvRow& row, std::size_t col) {
  if (col >= row.cells.size()) throw FormatError(row.line, "missing column " + std::to_string(col + 1));
  const auto v = parse_integer(row.cells[col]);
  if (!v) throw FormatError(row.line, "not an integer: '" + row.cells[col] + "'");
  return *v;
}

KvDocument KvDocument::parse(std::string_view text) {
  KvDocument doc;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw FormatError(line_no, "malformed section header '" + std::string(line) + "'");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      for (const auto& [name, at] : doc.sections_) {
        if (name == section) throw FormatError(line_no, "section [" + section + "] repeated");
      }
      doc.sections_.emplace_back(section, line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(line_no, "expected 'key = value', got '" + std::string(line) + "'");
    }
    KvEntry e;
    e.key = std::string(trim(line.substr(0, eq)));
    e.value = std::string(trim(line.substr(eq + 1)));
    e.line = line_no;
    e.section = section;
    if (section.empty()) {
      const auto dot = e.key.rfind('.');
      if (dot != std::string::npos) {
        e.section = e.key.substr(0, dot);
        e.key = e.key.substr(dot + 1);
      }
    }
    if (e.key.empty()) throw FormatError(line_no, "empty key");
    if (doc.find(e.section, e.key) != nullptr) {
      throw FormatError(line_no, "duplicate key '" + e.section + "." + e.key + "'");
    }
    doc.entries_.push_back(std::move(e));
  }
  return doc;
}

const KvEntry* KvDocument::find(std::string_view section, std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.section == section && e.key == key) return &e;
  }
  return nullptr;
}

std::vector<std::string> KvDocument::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, line] : sections_) out.push_back(name);
  for (const auto& e : entries_) {
    bool seen = false;
    for (const auto& s : out) seen = seen || s == e.section;
    if (!seen) out.push_back(e.section);
  }
  return out;
}

std::size_t KvDocument::section_line(std::string_view section) const {
  for (const auto& [name, line] : sections_) {
    if (name == section) return line;
  }
  return 0;
}

}  // namespace tactile
