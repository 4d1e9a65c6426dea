#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/errors.hpp"

namespace tactile {

inline constexpr int kAdcMax = 1023;  // 10-bit converter

/// Number of pressure-free samples averaged when a baseline is captured
/// (about one second at 15 Hz).
inline constexpr std::size_t kQuietFrames = 15;

/// Missing samples (saturated or shorted pixels) are stored as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Voltage divider feeding the ADC.
///
/// Topology: the fixed resistor sits on the measured leg and the sensor on the
/// reference leg, so V_out = v_ref * r_fixed / (r_fixed + R_sensor).  Higher
/// pressure lowers R_sensor and raises V_out (and the ADC count).
struct DividerConfig {
  double v_ref = 5.0;      // volts
  double r_fixed = 4700.0; // ohms

  /// Throws std::invalid_argument unless both values are positive.
  void validate() const;
  bool operator==(const DividerConfig&) const = default;
};

/// One captured grid from a single finger.
struct SensorFrame {
  double timestamp = 0.0;  // seconds since capture start
  int finger_id = 0;
  int rows = 0;
  int cols = 0;
  std::vector<int> adc_counts;  // row-major, rows*cols entries in [0, 1023]

  std::size_t pixel_count() const { return static_cast<std::size_t>(rows) * cols; }
  /// Throws ShapeError when adc_counts does not hold rows*cols entries and
  /// std::out_of_range for counts outside [0, 1023].
  void validate() const;
};

/// Pixel arrangement of a capture: one rows x cols grid per finger.  Trace
/// pixels are ordered finger-major, then row-major within a finger.
struct SensorLayout {
  std::vector<int> finger_ids{0};
  int rows = 2;
  int cols = 2;

  std::size_t pixel_count() const {
    return finger_ids.size() * static_cast<std::size_t>(rows) * cols;
  }
  bool operator==(const SensorLayout&) const = default;
};

/// Per-pixel resting resistance R_avg, in trace pixel order.
struct PixelBaseline {
  SensorLayout layout;
  std::vector<double> r_avg;  // ohms, all > 0

  void validate() const;
  bool operator==(const PixelBaseline&) const = default;
};

enum class MarkKind { close_start, close_stop, open_start, open_stop };

std::string_view to_string(MarkKind kind);
/// Throws std::invalid_argument for an unknown name.
MarkKind parse_mark_kind(std::string_view name);

struct ActuationMark {
  double time = 0.0;
  MarkKind kind = MarkKind::close_start;
  bool operator==(const ActuationMark&) const = default;
};

/// Relative-resistance time series for one capture.
struct ResistanceTrace {
  SensorLayout layout;
  std::vector<double> times;                       // strictly increasing
  std::vector<std::vector<double>> per_pixel_rel;  // [pixel][sample], percent, NaN = missing
  std::vector<double> aggregate_rel;               // mean over valid pixels, NaN if none
  std::vector<ActuationMark> marks;                // sorted by time

  std::size_t sample_count() const { return times.size(); }
  std::size_t pixel_count() const { return per_pixel_rel.size(); }

  /// Index of the sample closest to `t` (earlier sample on an exact tie).
  std::size_t nearest_sample(double t) const;

  /// Time of the first mark of `kind` at or after `not_before`.
  std::optional<double> first_mark(MarkKind kind,
                                   double not_before = -std::numeric_limits<double>::infinity()) const;
};

/// Assembles a trace from already-normalized per-pixel series and fills in
/// the aggregate.  Lengths must agree with `times`.
ResistanceTrace make_trace(SensorLayout layout, std::vector<double> times,
                           std::vector<std::vector<double>> per_pixel_rel,
                           std::vector<ActuationMark> marks = {});

struct ResistanceReading {
  double ohms = 0.0;
  bool short_circuit = false;  // count == 1023: sensor resistance indistinguishable from 0
};

/// Sensor resistance implied by a 10-bit ADC count.  Strictly decreasing on
/// 1..1023.  count == 0 throws SaturationError; count outside [0, 1023]
/// throws std::out_of_range.
ResistanceReading adc_to_resistance(int count, const DividerConfig& cfg = {});

/// Nearest ADC count for a sensor resistance (inverse of adc_to_resistance,
/// rounded and clamped to [0, 1023]).
int resistance_to_adc(double ohms, const DividerConfig& cfg = {});

/// Relative resistance in percent: (resistance / baseline - 1) * 100.
double normalize(double resistance, double baseline);

/// Converts frames into a relative-resistance trace.
///
/// Frames sharing a timestamp form one sample; every sample must carry the
/// baseline's fingers with the baseline's grid shape.  Saturated (count 0) and
/// shorted (count 1023) pixels are stored as missing and left out of the
/// aggregate for that sample.
ResistanceTrace build_trace(std::span<const SensorFrame> frames, const PixelBaseline& baseline,
                            const DividerConfig& cfg = {},
                            std::vector<ActuationMark> marks = {});

/// Baseline from the mean resistance of the first `n_quiet` samples, which
/// must be captured without external pressure.  Pixels that are never valid
/// raise InvalidBaseline.
PixelBaseline capture_baseline(std::span<const SensorFrame> frames, const DividerConfig& cfg = {},
                               std::size_t n_quiet = kQuietFrames);

/// Raised by rebaseline when some pixels of the new frame were saturated or
/// shorted.  `partial()` holds the baseline with every valid pixel updated and
/// the previous values retained for the listed pixels.
class RebaselineError : public DataError {
 public:
  RebaselineError(const std::string& m, PixelBaseline partial, std::vector<std::size_t> pixels)
      : DataError("RebaselineError", m), partial_(std::move(partial)), pixels_(std::move(pixels)) {}

  const PixelBaseline& partial() const noexcept { return partial_; }
  const std::vector<std::size_t>& pixels() const noexcept { return pixels_; }

 private:
  PixelBaseline partial_;
  std::vector<std::size_t> pixels_;
};

/// Replaces the baseline with the resistances of a pressure-free sample (one
/// frame per finger of the layout).
PixelBaseline rebaseline(const PixelBaseline& baseline, std::span<const SensorFrame> cycle_start,
                         const DividerConfig& cfg = {});

inline PixelBaseline rebaseline(const PixelBaseline& baseline, const SensorFrame& cycle_start,
                                const DividerConfig& cfg = {}) {
  return rebaseline(baseline, std::span<const SensorFrame>(&cycle_start, 1), cfg);
}

struct PixelValue {
  std::size_t pixel = 0;
  double rel = 0.0;
};

/// Most negative pixel at the sample nearest `at_time`; ties go to the lowest
/// index.  Throws NoValidPixel when every pixel is missing there.
PixelValue min_pixel_rel(const ResistanceTrace& trace, double at_time);

}  // namespace tactile
