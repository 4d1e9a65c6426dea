#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "tactile/core_model.hpp"
#include "tactile/transient_fit.hpp"

namespace tactile {

/// Frame log: header `t_s,finger_id,r,c,adc_0,...,adc_{n-1}`, then one row
/// per finger per sample.  Rows sharing a timestamp form one sample.
///
/// Errors name the offending line: FormatError for a bad header or cell,
/// RangeError for a count outside [0, 1023], OrderError when time goes
/// backwards or a finger repeats a timestamp.
std::vector<SensorFrame> parse_frames(std::string_view text);
std::vector<SensorFrame> read_frames(const std::filesystem::path& path);
void write_frames(std::ostream& out, std::span<const SensorFrame> frames);

/// Marks sidecar: header `t_s,kind`, rows in non-decreasing time.
std::vector<ActuationMark> parse_marks(std::string_view text);
std::vector<ActuationMark> read_marks(const std::filesystem::path& path);
void write_marks(std::ostream& out, std::span<const ActuationMark> marks);

/// One row of the fit-result CSV.
struct FitRow {
  double a_star = 0.0;
  double lambda_star = 0.0;
  double c_star = 0.0;
  double rms_residual = 0.0;
  double t_p = 0.0;
  double t_c = 0.0;

  static FitRow from(const DecayFit& fit);
  bool operator==(const FitRow&) const = default;
};

/// Header `a_star,lambda_star,c_star,rms_residual,t_p,t_c`.
void write_fit_results(std::ostream& out, std::span<const FitRow> rows);
/// Rows of a fit-result table; `#` lines before or between rows are ignored.
std::vector<FitRow> parse_fit_results(std::string_view text);

/// Plot data: `t_s,observed_pct,fitted_pct,in_window` for every sample.
void write_plot_data(std::ostream& out, const ResistanceTrace& trace, const DecayFit& fit);

}  // namespace tactile
