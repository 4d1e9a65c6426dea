#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/core_model.hpp"
#include "tactile/formats.hpp"
#include "tactile/transient_fit.hpp"

namespace tactile {

/// Settled estimates from one grasp session (one per trial).
struct SessionRecord {
  std::string session_id;
  int day_index = 0;
  std::vector<double> c_stars;  // percent
  double grasp_width = 0.0;     // mm
  std::string notes;

  double mean() const;
  /// Sample standard deviation; 0 for a single trial.
  double stddev() const;
  /// Throws std::invalid_argument without trials or with non-finite values.
  void validate() const;
};

inline constexpr double kDefaultTrendThreshold = 0.5;  // percent per day

enum class TrendDirection { softening, stiffening, stable };
std::string_view to_string(TrendDirection d);

struct RipenessTrend {
  double slope = 0.0;  // percent per day
  TrendDirection direction = TrendDirection::stable;
};

/// OLS slope of session means against day index.  A rising (less negative)
/// settled response means the produce is softening.  Throws
/// IncomparableSessions for fewer than two sessions or differing grasp
/// widths, std::invalid_argument when days are out of order, and
/// DegenerateAbscissa when every session has the same day.
RipenessTrend ripeness_trend(std::span<const SessionRecord> sessions,
                             double s_min = kDefaultTrendThreshold);

enum class BruisePolicy { midpoint_threshold, welch_test };
std::string_view to_string(BruisePolicy p);
BruisePolicy parse_bruise_policy(std::string_view name);

enum class Verdict { nominal, anomalous };
std::string_view to_string(Verdict v);

struct BruiseVerdict {
  Verdict verdict = Verdict::nominal;
  double reference_mean = 0.0;
  double observed_mean = 0.0;
  double threshold = 0.0;  // observed means above this are anomalous
  double margin = 0.0;     // |observed_mean - threshold|
};

struct BruiseOptions {
  /// Mean settled response of known-damaged produce; enables the midpoint
  /// threshold, otherwise the threshold is reference mean + z * sigma.
  std::optional<double> damaged_mean;
  double z = 3.0;
  double alpha = 0.01;  // two-sided significance of the Welch test
};

/// Midpoint policy: anomalous iff the observed mean exceeds the threshold.
/// Welch policy: anomalous iff the unequal-variance t statistic of observed
/// minus reference exceeds the two-sided critical value, i.e. the observed
/// mean is significantly less negative; the reported threshold is the
/// observed mean at which that happens.  Needs three trials per session.
/// Throws IncomparableSessions for differing grasp widths.
BruiseVerdict detect_bruise(const SessionRecord& reference, const SessionRecord& observed,
                            BruisePolicy policy, const BruiseOptions& options = {});

/// Pixels whose settled estimate exceeds the reference by more than the
/// margin.  Missing values (NaN) on either side are skipped.
std::vector<std::size_t> localize_bruise(std::span<const double> settled,
                                         std::span<const double> reference,
                                         std::span<const double> margin);
std::vector<std::size_t> localize_bruise(std::span<const double> settled,
                                         std::span<const double> reference, double margin);

/// Per-pixel decay fits of `trace` over `window`; failed fits are missing.
std::vector<double> per_pixel_settled(const ResistanceTrace& trace, const FitWindow& window);

/// Same, fitting each pixel of the trace first.
std::vector<std::size_t> localize_bruise(const ResistanceTrace& trace, const FitWindow& window,
                                         std::span<const double> reference,
                                         std::span<const double> margin);

/// Session file: `# key = value` header lines (session_id, day_index,
/// grasp_width, notes) followed by the fit-result CSV, one row per trial.
std::string format_session(const SessionRecord& session, std::span<const FitRow> fits = {});
SessionRecord parse_session(std::string_view text);
SessionRecord read_session(const std::filesystem::path& path);

}  // namespace tactile
