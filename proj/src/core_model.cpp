#include "tactile/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tactile {

void DividerConfig::validate() const {
  if (!(v_ref > 0.0) || !(r_fixed > 0.0)) {
    throw std::invalid_argument("divider: v_ref and r_fixed must be positive");
  }
}

void SensorFrame::validate() const {
  if (rows <= 0 || cols <= 0 || adc_counts.size() != pixel_count()) {
    throw ShapeError("frame at t=" + std::to_string(timestamp) + " has " +
                     std::to_string(adc_counts.size()) + " counts for a " + std::to_string(rows) +
                     "x" + std::to_string(cols) + " grid");
  }
  for (int c : adc_counts) {
    if (c < 0 || c > kAdcMax) {
      throw std::out_of_range("adc count " + std::to_string(c) + " outside [0, 1023]");
    }
  }
}

void PixelBaseline::validate() const {
  if (r_avg.size() != layout.pixel_count()) {
    throw ShapeError("baseline holds " + std::to_string(r_avg.size()) + " pixels, layout needs " +
                     std::to_string(layout.pixel_count()));
  }
  for (double r : r_avg) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw InvalidBaseline("baseline resistance must be positive and finite");
    }
  }
}

std::string_view to_string(MarkKind kind) {
  switch (kind) {
    case MarkKind::close_start: return "close_start";
    case MarkKind::close_stop: return "close_stop";
    case MarkKind::open_start: return "open_start";
    case MarkKind::open_stop: return "open_stop";
  }
  return "close_start";
}

MarkKind parse_mark_kind(std::string_view name) {
  for (MarkKind k : {MarkKind::close_start, MarkKind::close_stop, MarkKind::open_start,
                     MarkKind::open_stop}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown actuation mark kind '" + std::string(name) + "'");
}

std::size_t ResistanceTrace::nearest_sample(double t) const {
  if (times.empty()) throw EmptyCapture("trace has no samples");
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const auto hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  return (t - times[lo] <= times[hi] - t) ? lo : hi;
}

std::optional<double> ResistanceTrace::first_mark(MarkKind kind, double not_before) const {
  for (const auto& m : marks) {
    if (m.kind == kind && m.time >= not_before) return m.time;
  }
  return std::nullopt;
}

namespace {

void check_marks_sorted(const std::vector<ActuationMark>& marks) {
  for (std::size_t i = 1; i < marks.size(); ++i) {
    if (marks[i].time < marks[i - 1].time) {
      throw DataError("OrderError", "actuation marks are not sorted by time");
    }
  }
}

double mean_of_valid(const std::vector<std::vector<double>>& per_pixel, std::size_t k) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& series : per_pixel) {
    if (!is_missing(series[k])) {
      sum += series[k];
      ++n;
    }
  }
  return n == 0 ? kMissing : sum / static_cast<double>(n);
}

/// Consecutive frames with the same timestamp, reordered to the layout's
/// finger order.
std::vector<std::vector<const SensorFrame*>> group_samples(std::span<const SensorFrame> frames,
                                                           const SensorLayout& layout) {
  std::vector<std::vector<const SensorFrame*>> samples;
  std::size_t i = 0;
  while (i < frames.size()) {
    const double t = frames[i].timestamp;
    std::vector<const SensorFrame*> group(layout.finger_ids.size(), nullptr);
    std::size_t j = i;
    for (; j < frames.size() && frames[j].timestamp == t; ++j) {
      const SensorFrame& f = frames[j];
      f.validate();
      if (f.rows != layout.rows || f.cols != layout.cols) {
        throw ShapeError("frame at t=" + std::to_string(t) + " is " + std::to_string(f.rows) + "x" +
                         std::to_string(f.cols) + ", expected " + std::to_string(layout.rows) +
                         "x" + std::to_string(layout.cols));
      }
      auto pos = std::find(layout.finger_ids.begin(), layout.finger_ids.end(), f.finger_id);
      if (pos == layout.finger_ids.end()) {
        throw ShapeError("unexpected finger id " + std::to_string(f.finger_id));
      }
      auto& slot = group[static_cast<std::size_t>(pos - layout.finger_ids.begin())];
      if (slot != nullptr) {
        throw ShapeError("finger " + std::to_string(f.finger_id) + " appears twice at t=" +
                         std::to_string(t));
      }
      slot = &f;
    }
    for (const auto* f : group) {
      if (f == nullptr) {
        throw ShapeError("sample at t=" + std::to_string(t) + " is missing a finger");
      }
    }
    if (!samples.empty() && !(t > samples.back().front()->timestamp)) {
      throw DataError("OrderError", "frame timestamps are not strictly increasing");
    }
    samples.push_back(std::move(group));
    i = j;
  }
  return samples;
}

/// Sensor resistance for a count, or NaN for saturated and shorted pixels.
double valid_resistance(int count, const DividerConfig& cfg) {
  if (count <= 0 || count >= kAdcMax) return kMissing;
  return adc_to_resistance(count, cfg).ohms;
}

}  // namespace

ResistanceTrace make_trace(SensorLayout layout, std::vector<double> times,
                           std::vector<std::vector<double>> per_pixel_rel,
                           std::vector<ActuationMark> marks) {
  if (per_pixel_rel.size() != layout.pixel_count()) {
    throw ShapeError("trace pixel count does not match its layout");
  }
  for (const auto& series : per_pixel_rel) {
    if (series.size() != times.size()) throw ShapeError("pixel series length differs from times");
  }
  check_marks_sorted(marks);

  ResistanceTrace trace;
  trace.layout = std::move(layout);
  trace.times = std::move(times);
  trace.per_pixel_rel = std::move(per_pixel_rel);
  trace.marks = std::move(marks);
  trace.aggregate_rel.resize(trace.times.size());
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    trace.aggregate_rel[k] = mean_of_valid(trace.per_pixel_rel, k);
  }
  return trace;
}

ResistanceReading adc_to_resistance(int count, const DividerConfig& cfg) {
  cfg.validate();
  if (count < 0 || count > kAdcMax) {
    throw std::out_of_range("adc count " + std::to_string(count) + " outside [0, 1023]");
  }
  if (count == 0) {
    throw SaturationError("adc count 0: sensor resistance too high to measure");
  }
  if (count == kAdcMax) return {0.0, true};
  const double v_out = cfg.v_ref * static_cast<double>(count) / kAdcMax;
  return {cfg.r_fixed * (cfg.v_ref / v_out - 1.0), false};
}

int resistance_to_adc(double ohms, const DividerConfig& cfg) {
  cfg.validate();
  if (!(ohms >= 0.0)) return kAdcMax;
  if (std::isinf(ohms)) return 0;
  const double count = kAdcMax * cfg.r_fixed / (cfg.r_fixed + ohms);
  return static_cast<int>(std::clamp(std::lround(count), 0L, static_cast<long>(kAdcMax)));
}

double normalize(double resistance, double baseline) {
  if (!(baseline > 0.0)) throw InvalidBaseline("baseline must be positive");
  return (resistance / baseline - 1.0) * 100.0;
}

ResistanceTrace build_trace(std::span<const SensorFrame> frames, const PixelBaseline& baseline,
                            const DividerConfig& cfg, std::vector<ActuationMark> marks) {
  if (frames.empty()) throw EmptyCapture("no frames to build a trace from");
  baseline.validate();
  cfg.validate();
  const SensorLayout& layout = baseline.layout;
  const auto samples = group_samples(frames, layout);
  const std::size_t per_finger = static_cast<std::size_t>(layout.rows) * layout.cols;

  std::vector<double> times;
  times.reserve(samples.size());
  std::vector<std::vector<double>> rel(layout.pixel_count(),
                                       std::vector<double>(samples.size(), kMissing));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    times.push_back(samples[k].front()->timestamp);
    for (std::size_t f = 0; f < samples[k].size(); ++f) {
      const auto& counts = samples[k][f]->adc_counts;
      for (std::size_t p = 0; p < per_finger; ++p) {
        const std::size_t pixel = f * per_finger + p;
        const double r = valid_resistance(counts[p], cfg);
        if (!is_missing(r)) rel[pixel][k] = normalize(r, baseline.r_avg[pixel]);
      }
    }
  }
  return make_trace(layout, std::move(times), std::move(rel), std::move(marks));
}

PixelBaseline capture_baseline(std::span<const SensorFrame> frames, const DividerConfig& cfg,
                               std::size_t n_quiet) {
  if (frames.empty()) throw EmptyCapture("no frames for a baseline");
  if (n_quiet == 0) throw std::invalid_argument("baseline needs at least one quiet sample");
  SensorLayout layout;
  layout.rows = frames.front().rows;
  layout.cols = frames.front().cols;
  layout.finger_ids.clear();
  for (const auto& f : frames) {
    if (f.timestamp != frames.front().timestamp) break;
    layout.finger_ids.push_back(f.finger_id);
  }
  const auto samples = group_samples(frames, layout);
  const std::size_t used = std::min(n_quiet, samples.size());
  const std::size_t per_finger = static_cast<std::size_t>(layout.rows) * layout.cols;

  std::vector<double> sum(layout.pixel_count(), 0.0);
  std::vector<std::size_t> n(layout.pixel_count(), 0);
  for (std::size_t k = 0; k < used; ++k) {
    for (std::size_t f = 0; f < samples[k].size(); ++f) {
      for (std::size_t p = 0; p < per_finger; ++p) {
        const double r = valid_resistance(samples[k][f]->adc_counts[p], cfg);
        if (!is_missing(r)) {
          sum[f * per_finger + p] += r;
          ++n[f * per_finger + p];
        }
      }
    }
  }
  PixelBaseline out{layout, std::vector<double>(layout.pixel_count())};
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (n[i] == 0) {
      throw InvalidBaseline("pixel " + std::to_string(i) + " has no valid quiet sample");
    }
    out.r_avg[i] = sum[i] / static_cast<double>(n[i]);
  }
  return out;
}

PixelBaseline rebaseline(const PixelBaseline& baseline, std::span<const SensorFrame> cycle_start,
                         const DividerConfig& cfg) {
  baseline.validate();
  if (cycle_start.empty()) throw EmptyCapture("no frame to rebaseline from");
  const auto samples = group_samples(cycle_start, baseline.layout);
  if (samples.size() != 1) throw ShapeError("rebaseline expects frames of a single sample");
  const std::size_t per_finger =
      static_cast<std::size_t>(baseline.layout.rows) * baseline.layout.cols;

  PixelBaseline out = baseline;
  std::vector<std::size_t> rejected;
  for (std::size_t f = 0; f < samples[0].size(); ++f) {
    for (std::size_t p = 0; p < per_finger; ++p) {
      const std::size_t pixel = f * per_finger + p;
      const double r = valid_resistance(samples[0][f]->adc_counts[p], cfg);
      if (is_missing(r)) {
        rejected.push_back(pixel);
      } else {
        out.r_avg[pixel] = r;
      }
    }
  }
  if (!rejected.empty()) {
    throw RebaselineError(std::to_string(rejected.size()) +
                              " pixel(s) saturated or shorted; previous baseline kept for them",
                          std::move(out), std::move(rejected));
  }
  return out;
}

PixelValue min_pixel_rel(const ResistanceTrace& trace, double at_time) {
  const std::size_t k = trace.nearest_sample(at_time);
  std::optional<PixelValue> best;
  for (std::size_t p = 0; p < trace.pixel_count(); ++p) {
    const double v = trace.per_pixel_rel[p][k];
    if (is_missing(v)) continue;
    if (!best || v < best->rel) best = PixelValue{p, v};
  }
  if (!best) throw NoValidPixel("all pixels missing at t=" + std::to_string(trace.times[k]));
  return *best;
}

}  // namespace tactile
