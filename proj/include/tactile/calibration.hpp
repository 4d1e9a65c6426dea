#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/core_model.hpp"

namespace tactile {

enum class OutputUnit { newtons, newtons_per_mm, pounds_grip };

std::string_view to_string(OutputUnit unit);
OutputUnit parse_output_unit(std::string_view name);

/// y = slope * x + intercept, x in percent relative resistance.
struct LinearModel {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  std::size_t n_points = 2;
  OutputUnit output_unit = OutputUnit::newtons;

  double evaluate(double x) const { return slope * x + intercept; }
  bool operator==(const LinearModel&) const = default;
};

struct CalibrationPoint {
  double rel_pct = 0.0;  // settled relative resistance
  double value = 0.0;    // measured output (force, stiffness, ...)
};

/// Ordinary least squares.  R^2 = 1 - SS_res/SS_tot, defined as 1 when both
/// sums vanish.  Throws DegenerateAbscissa when every x is equal and
/// std::invalid_argument for fewer than two points.
LinearModel fit_linear(std::span<const CalibrationPoint> points,
                       OutputUnit unit = OutputUnit::newtons);

/// A model prediction clamped at zero.
struct ClampedEstimate {
  double value = 0.0;
  bool below_range = false;  // the raw prediction was negative
};

/// Force in newtons; throws UnitMismatch unless the model outputs newtons.
ClampedEstimate estimate_force(double c_star, const LinearModel& model);

/// Stiffness in N/mm; throws UnitMismatch unless the model outputs N/mm.
ClampedEstimate estimate_stiffness(double c_star, const LinearModel& model);

/// Indices ordered from softest (least negative) to stiffest (most
/// negative); equal values keep their input order.
std::vector<std::size_t> classify_stiffness_rank(std::span<const double> c_stars);

/// Reference force lines of the four silicone pads (N per percent).
namespace pad_lines {
LinearModel dragonskin30();
LinearModel dragonskin20();
LinearModel dragonskin10();
LinearModel ecoflex10();
/// All four, keyed by material name, ordered stiffest first.
std::vector<std::pair<std::string, LinearModel>> all();
}  // namespace pad_lines

struct CalibrationProfile {
  PixelBaseline baseline;  // also fixes the sensor geometry
  DividerConfig divider;
  std::map<std::string, LinearModel> force_models;  // keyed by material
  std::optional<LinearModel> stiffness_model;
  std::string created_at = "unspecified";

  bool operator==(const CalibrationProfile&) const = default;
};

/// Profile text; see docs/formats.md for the grammar.  Numbers are written
/// with 17 significant digits so that parse(format(p)) == p.
std::string format_profile(const CalibrationProfile& profile);
/// Throws ProfileParseError naming the offending line and field.
CalibrationProfile parse_profile(std::string_view text);

void save_profile(const CalibrationProfile& profile, const std::filesystem::path& path);
CalibrationProfile load_profile(const std::filesystem::path& path);

}  // namespace tactile
