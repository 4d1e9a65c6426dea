#include "tactile/formats.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "tactile/text_util.hpp"

namespace tactile {

namespace {

constexpr std::string_view kFitColumns[] = {"a_star",       "lambda_star", "c_star",
                                            "rms_residual", "t_p",         "t_c"};
constexpr std::string_view kMarkColumns[] = {"t_s", "kind"};

void check_frame_header(const CsvRow& header, std::size_t& n_counts) {
  const auto& c = header.cells;
  if (c.size() < 5 || c[0] != "t_s" || c[1] != "finger_id" || c[2] != "r" || c[3] != "c") {
    throw FormatError(header.line, "expected header 't_s,finger_id,r,c,adc_0,...'");
  }
  n_counts = c.size() - 4;
  for (std::size_t i = 0; i < n_counts; ++i) {
    if (c[4 + i] != "adc_" + std::to_string(i)) {
      throw FormatError(header.line, "header column " + std::to_string(5 + i) +
                                         " should be adc_" + std::to_string(i));
    }
  }
}

}  // namespace

std::vector<SensorFrame> parse_frames(std::string_view text) {
  const CsvTable table = parse_csv(text);
  if (table.rows.empty()) throw FormatError(1, "frame log has no header");
  std::size_t n_counts = 0;
  check_frame_header(table.rows.front(), n_counts);

  std::vector<SensorFrame> frames;
  std::map<int, double> last_time;
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const CsvRow& row = table.rows[i];
    if (row.cells.size() != 4 + n_counts) {
      throw FormatError(row.line, "expected " + std::to_string(4 + n_counts) + " columns, got " +
                                      std::to_string(row.cells.size()));
    }
    SensorFrame f;
    f.timestamp = csv_number(row, 0);
    if (!std::isfinite(f.timestamp)) throw FormatError(row.line, "timestamp must be finite");
    f.finger_id = static_cast<int>(csv_integer(row, 1));
    const long long r = csv_integer(row, 2);
    const long long c = csv_integer(row, 3);
    if (r <= 0 || c <= 0 || static_cast<std::size_t>(r * c) != n_counts) {
      throw FormatError(row.line, "grid " + std::to_string(r) + "x" + std::to_string(c) +
                                      " does not match " + std::to_string(n_counts) + " counts");
    }
    f.rows = static_cast<int>(r);
    f.cols = static_cast<int>(c);
    f.adc_counts.reserve(n_counts);
    for (std::size_t j = 0; j < n_counts; ++j) {
      const long long v = csv_integer(row, 4 + j);
      if (v < 0 || v > kAdcMax) {
        throw RangeError(row.line, "count " + std::to_string(v) + " outside [0, 1023]");
      }
      f.adc_counts.push_back(static_cast<int>(v));
    }
    if (f.timestamp < previous) throw OrderError(row.line, "timestamp goes backwards");
    const auto it = last_time.find(f.finger_id);
    if (it != last_time.end() && !(f.timestamp > it->second)) {
      throw OrderError(row.line, "finger " + std::to_string(f.finger_id) +
                                     " timestamps must strictly increase");
    }
    previous = f.timestamp;
    last_time[f.finger_id] = f.timestamp;
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<SensorFrame> read_frames(const std::filesystem::path& path) {
  return parse_frames(read_file(path));
}

void write_frames(std::ostream& out, std::span<const SensorFrame> frames) {
  const std::size_t n = frames.empty() ? 4 : frames.front().pixel_count();
  out << "t_s,finger_id,r,c";
  for (std::size_t i = 0; i < n; ++i) out << ",adc_" << i;
  out << '\n';
  for (const auto& f : frames) {
    if (f.pixel_count() != n) throw ShapeError("frames of one log must share a grid size");
    f.validate();
    out << format_number(f.timestamp) << ',' << f.finger_id << ',' << f.rows << ',' << f.cols;
    for (int v : f.adc_counts) out << ',' << v;
    out << '\n';
  }
}

std::vector<ActuationMark> parse_marks(std::string_view text) {
  const CsvTable table = parse_csv(text);
  if (table.rows.empty()) throw FormatError(1, "marks file has no header");
  expect_header(table.rows.front(), kMarkColumns);
  std::vector<ActuationMark> marks;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const CsvRow& row = table.rows[i];
    if (row.cells.size() != 2) throw FormatError(row.line, "expected 2 columns");
    ActuationMark m;
    m.time = csv_number(row, 0);
    try {
      m.kind = parse_mark_kind(row.cells[1]);
    } catch (const std::invalid_argument& e) {
      throw FormatError(row.line, e.what());
    }
    if (!marks.empty() && m.time < marks.back().time) {
      throw OrderError(row.line, "marks must be in time order");
    }
    marks.push_back(m);
  }
  return marks;
}

std::vector<ActuationMark> read_marks(const std::filesystem::path& path) {
  return parse_marks(read_file(path));
}

void write_marks(std::ostream& out, std::span<const ActuationMark> marks) {
  out << "t_s,kind\n";
  for (const auto& m : marks) out << format_number(m.time) << ',' << to_string(m.kind) << '\n';
}

FitRow FitRow::from(const DecayFit& fit) {
  return {fit.a_star, fit.lambda_star, fit.c_star, fit.rms_residual, fit.window.t_p,
          fit.window.t_c};
}

void write_fit_results(std::ostream& out, std::span<const FitRow> rows) {
  out << "a_star,lambda_star,c_star,rms_residual,t_p,t_c\n";
  for (const auto& r : rows) {
    out << format_number(r.a_star) << ',' << format_number(r.lambda_star) << ','
        << format_number(r.c_star) << ',' << format_number(r.rms_residual) << ','
        << format_number(r.t_p) << ',' << format_number(r.t_c) << '\n';
  }
}

std::vector<FitRow> parse_fit_results(std::string_view text) {
  const CsvTable table = parse_csv(text);
  if (table.rows.empty()) throw FormatError(1, "fit results have no header");
  expect_header(table.rows.front(), kFitColumns);
  std::vector<FitRow> rows;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const CsvRow& row = table.rows[i];
    if (row.cells.size() != std::size(kFitColumns)) {
      throw FormatError(row.line, "expected 6 columns");
    }
    rows.push_back({csv_number(row, 0), csv_number(row, 1), csv_number(row, 2), csv_number(row, 3),
                    csv_number(row, 4), csv_number(row, 5)});
  }
  return rows;
}

void write_plot_data(std::ostream& out, const ResistanceTrace& trace, const DecayFit& fit) {
  out << "t_s,observed_pct,fitted_pct,in_window\n";
  const double lo = fit.window.start() - 1e-9;
  const double hi = fit.window.end() + 1e-9;
  for (std::size_t k = 0; k < trace.sample_count(); ++k) {
    const double t = trace.times[k];
    const bool inside = t >= lo && t <= hi;
    out << format_number(t) << ',' << format_number(trace.aggregate_rel[k]) << ','
        << format_number(t >= fit.window.t_p ? fit.value_at(t) : kMissing) << ','
        << (inside ? 1 : 0) << '\n';
  }
}

}  // namespace tactile
