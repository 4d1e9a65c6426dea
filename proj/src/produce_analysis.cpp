#include "tactile/produce_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "tactile/calibration.hpp"
#include "tactile/text_util.hpp"

namespace tactile {

namespace {

constexpr double kWidthTolerance = 1e-9;  // mm

void require_same_width(const SessionRecord& a, const SessionRecord& b) {
  if (std::abs(a.grasp_width - b.grasp_width) > kWidthTolerance) {
    throw IncomparableSessions("sessions '" + a.session_id + "' and '" + b.session_id +
                               "' use grasp widths " + format_number(a.grasp_width) + " and " +
                               format_number(b.grasp_width) + " mm");
  }
}

double variance(const SessionRecord& s) {
  const double sd = s.stddev();
  return sd * sd;
}

}  // namespace

double SessionRecord::mean() const {
  if (c_stars.empty()) throw std::invalid_argument("session '" + session_id + "' has no trials");
  double sum = 0.0;
  for (double v : c_stars) sum += v;
  return sum / static_cast<double>(c_stars.size());
}

double SessionRecord::stddev() const {
  const double m = mean();
  if (c_stars.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : c_stars) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(c_stars.size() - 1));
}

void SessionRecord::validate() const {
  if (c_stars.empty()) throw std::invalid_argument("session '" + session_id + "' has no trials");
  for (double v : c_stars) {
    if (!std::isfinite(v)) throw std::invalid_argument("session '" + session_id + "' has a non-finite c_star");
  }
  if (!std::isfinite(grasp_width)) throw std::invalid_argument("grasp width must be finite");
}

std::string_view to_string(TrendDirection d) {
  switch (d) {
    case TrendDirection::softening: return "softening";
    case TrendDirection::stiffening: return "stiffening";
    case TrendDirection::stable: return "stable";
  }
  return "stable";
}

RipenessTrend ripeness_trend(std::span<const SessionRecord> sessions, double s_min) {
  if (sessions.size() < 2) throw IncomparableSessions("a trend needs at least two sessions");
  if (!(s_min >= 0.0)) throw std::invalid_argument("s_min must be non-negative");
  std::vector<CalibrationPoint> points;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    sessions[i].validate();
    require_same_width(sessions.front(), sessions[i]);
    if (i > 0 && sessions[i].day_index < sessions[i - 1].day_index) {
      throw std::invalid_argument("sessions must be ordered by day index");
    }
    points.push_back({static_cast<double>(sessions[i].day_index), sessions[i].mean()});
  }
  const LinearModel line = fit_linear(points);
  RipenessTrend out;
  out.slope = line.slope;
  if (line.slope > s_min) {
    out.direction = TrendDirection::softening;
  } else if (line.slope < -s_min) {
    out.direction = TrendDirection::stiffening;
  }
  return out;
}

std::string_view to_string(BruisePolicy p) {
  return p == BruisePolicy::midpoint_threshold ? "midpoint_threshold" : "welch_test";
}

BruisePolicy parse_bruise_policy(std::string_view name) {
  if (name == "midpoint_threshold" || name == "midpoint") return BruisePolicy::midpoint_threshold;
  if (name == "welch_test" || name == "welch") return BruisePolicy::welch_test;
  throw std::invalid_argument("unknown bruise policy '" + std::string(name) + "'");
}

std::string_view to_string(Verdict v) { return v == Verdict::anomalous ? "anomalous" : "nominal"; }

BruiseVerdict detect_bruise(const SessionRecord& reference, const SessionRecord& observed,
                            BruisePolicy policy, const BruiseOptions& options) {
  reference.validate();
  observed.validate();
  require_same_width(reference, observed);

  BruiseVerdict v;
  v.reference_mean = reference.mean();
  v.observed_mean = observed.mean();

  if (policy == BruisePolicy::midpoint_threshold) {
    if (options.damaged_mean) {
      if (!(*options.damaged_mean > v.reference_mean)) {
        throw std::invalid_argument("damaged calibration mean must be above the reference mean");
      }
      v.threshold = 0.5 * (v.reference_mean + *options.damaged_mean);
    } else {
      if (!(options.z > 0.0)) throw std::invalid_argument("z must be positive");
      v.threshold = v.reference_mean + options.z * reference.stddev();
    }
  } else {
    if (reference.c_stars.size() < 3 || observed.c_stars.size() < 3) {
      throw InsufficientData("the Welch test needs at least three trials per session");
    }
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
      throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    const double n1 = static_cast<double>(reference.c_stars.size());
    const double n2 = static_cast<double>(observed.c_stars.size());
    const double q1 = variance(reference) / n1;
    const double q2 = variance(observed) / n2;
    const double se = std::sqrt(q1 + q2);
    if (se == 0.0) {
      v.threshold = v.reference_mean;
    } else {
      // Welch-Satterthwaite degrees of freedom
      const double df = (q1 + q2) * (q1 + q2) / (q1 * q1 / (n1 - 1.0) + q2 * q2 / (n2 - 1.0));
      const boost::math::students_t dist(df);
      const double t_crit = boost::math::quantile(boost::math::complement(dist, options.alpha / 2.0));
      v.threshold = v.reference_mean + t_crit * se;
    }
  }
  v.verdict = v.observed_mean > v.threshold ? Verdict::anomalous : Verdict::nominal;
  v.margin = std::abs(v.observed_mean - v.threshold);
  return v;
}

std::vector<std::size_t> localize_bruise(std::span<const double> settled,
                                         std::span<const double> reference,
                                         std::span<const double> margin) {
  if (settled.size() != reference.size() || settled.size() != margin.size()) {
    throw ShapeError("settled, reference and margin must have one entry per pixel");
  }
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < settled.size(); ++p) {
    if (is_missing(settled[p]) || is_missing(reference[p]) || is_missing(margin[p])) continue;
    if (settled[p] - reference[p] > margin[p]) out.push_back(p);
  }
  return out;
}

std::vector<std::size_t> localize_bruise(std::span<const double> settled,
                                         std::span<const double> reference, double margin) {
  const std::vector<double> m(settled.size(), margin);
  return localize_bruise(settled, reference, m);
}

std::vector<double> per_pixel_settled(const ResistanceTrace& trace, const FitWindow& window) {
  std::vector<double> out(trace.pixel_count(), kMissing);
  for (std::size_t p = 0; p < trace.pixel_count(); ++p) {
    try {
      out[p] = fit_decay_pixel(trace, p, window).c_star;
    } catch (const NumericalError&) {
      // pixel without enough valid samples stays missing
    }
  }
  return out;
}

std::vector<std::size_t> localize_bruise(const ResistanceTrace& trace, const FitWindow& window,
                                         std::span<const double> reference,
                                         std::span<const double> margin) {
  const std::vector<double> settled = per_pixel_settled(trace, window);
  return localize_bruise(settled, reference, margin);
}

std::string format_session(const SessionRecord& s, std::span<const FitRow> fits) {
  s.validate();
  if (!fits.empty() && fits.size() != s.c_stars.size()) {
    throw ShapeError("one fit row per trial is required");
  }
  if (s.session_id.find('\n') != std::string::npos || s.notes.find('\n') != std::string::npos) {
    throw std::invalid_argument("session id and notes must be single lines");
  }
  std::ostringstream out;
  out << "# session_id = " << s.session_id << "\n# day_index = " << s.day_index
      << "\n# grasp_width = " << format_number(s.grasp_width) << "\n# notes = " << s.notes << '\n';
  std::vector<FitRow> rows;
  if (fits.empty()) {
    for (double c : s.c_stars) rows.push_back({kMissing, kMissing, c, kMissing, kMissing, kMissing});
  } else {
    rows.assign(fits.begin(), fits.end());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].c_star != s.c_stars[i]) throw std::invalid_argument("fit rows disagree with c_stars");
    }
  }
  write_fit_results(out, rows);
  return out.str();
}

SessionRecord parse_session(std::string_view text) {
  const CsvTable table = parse_csv(text);
  SessionRecord s;
  bool have_id = false;
  bool have_day = false;
  bool have_width = false;
  for (const auto& [line, body] : table.comments) {
    const auto eq = body.find('=');
    if (eq == std::string::npos) continue;  // free comment
    const std::string key(trim(std::string_view(body).substr(0, eq)));
    const std::string value(trim(std::string_view(body).substr(eq + 1)));
    if (key == "session_id") {
      s.session_id = value;
      have_id = true;
    } else if (key == "day_index") {
      const auto v = parse_integer(value);
      if (!v) throw FormatError(line, "day_index must be an integer");
      s.day_index = static_cast<int>(*v);
      have_day = true;
    } else if (key == "grasp_width") {
      const auto v = parse_number(value);
      if (!v) throw FormatError(line, "grasp_width must be a number");
      s.grasp_width = *v;
      have_width = true;
    } else if (key == "notes") {
      s.notes = value;
    } else {
      throw FormatError(line, "unknown session header '" + key + "'");
    }
  }
  if (!have_id || !have_day || !have_width) {
    throw FormatError(1, "session header needs session_id, day_index and grasp_width");
  }
  std::string body;
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) body += (i ? "," : "") + row.cells[i];
    body += '\n';
  }
  if (table.rows.empty()) throw FormatError(1, "session has no fit table");
  // re-run through the fit parser for column validation; line numbers are
  // offset by the header block, so map them back
  try {
    for (const auto& r : parse_fit_results(body)) s.c_stars.push_back(r.c_star);
  } catch (const FormatError& e) {
    const std::size_t idx = e.line() == 0 ? 0 : e.line() - 1;
    const std::size_t line = idx < table.rows.size() ? table.rows[idx].line : e.line();
    const std::string what = e.what();
    const auto colon = what.find(": ");
    throw FormatError(line, colon == std::string::npos ? what : what.substr(colon + 2));
  }
  if (s.c_stars.empty()) throw FormatError(table.rows.front().line, "session has no trials");
  return s;
}

SessionRecord read_session(const std::filesystem::path& path) { return parse_session(read_file(path)); }

}  // namespace tactile
