#include "tactile/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tactile {

std::string_view to_string(OutputUnit unit) {
  switch (unit) {
    case OutputUnit::newtons: return "newtons";
    case OutputUnit::newtons_per_mm: return "newtons_per_mm";
    case OutputUnit::pounds_grip: return "pounds_grip";
  }
  return "newtons";
}

OutputUnit parse_output_unit(std::string_view name) {
  for (OutputUnit u : {OutputUnit::newtons, OutputUnit::newtons_per_mm, OutputUnit::pounds_grip}) {
    if (to_string(u) == name) return u;
  }
  throw std::invalid_argument("unknown output unit '" + std::string(name) + "'");
}

LinearModel fit_linear(std::span<const CalibrationPoint> points, OutputUnit unit) {
  if (points.size() < 2) throw std::invalid_argument("linear fit needs at least two points");
  const double n = static_cast<double>(points.size());
  double x_mean = 0.0;
  double y_mean = 0.0;
  for (const auto& p : points) {
    x_mean += p.rel_pct;
    y_mean += p.value;
  }
  x_mean /= n;
  y_mean /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : points) {
    const double dx = p.rel_pct - x_mean;
    const double dy = p.value - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DegenerateAbscissa("all calibration points share one abscissa");

  LinearModel m;
  m.slope = sxy / sxx;
  m.intercept = y_mean - m.slope * x_mean;
  m.n_points = points.size();
  m.output_unit = unit;

  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.value - m.evaluate(p.rel_pct);
    ss_res += r * r;
  }
  if (syy == 0.0) {
    m.r_squared = 1.0;
  } else {
    m.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return m;
}

namespace {

ClampedEstimate clamped(double c_star, const LinearModel& model, OutputUnit expected,
                        const char* what) {
  if (model.output_unit != expected) {
    throw UnitMismatch(std::string(what) + " needs a model in " + std::string(to_string(expected)) +
                       ", got " + std::string(to_string(model.output_unit)));
  }
  const double v = model.evaluate(c_star);
  if (v < 0.0) return {0.0, true};
  return {v, false};
}

}  // namespace

ClampedEstimate estimate_force(double c_star, const LinearModel& model) {
  return clamped(c_star, model, OutputUnit::newtons, "force estimate");
}

ClampedEstimate estimate_stiffness(double c_star, const LinearModel& model) {
  return clamped(c_star, model, OutputUnit::newtons_per_mm, "stiffness estimate");
}

std::vector<std::size_t> classify_stiffness_rank(std::span<const double> c_stars) {
  std::vector<std::size_t> order(c_stars.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return c_stars[a] > c_stars[b]; });
  return order;
}

namespace pad_lines {

namespace {
LinearModel line(double r2, double slope, double intercept) {
  return LinearModel{slope, intercept, r2, 50, OutputUnit::newtons};
}
}  // namespace

LinearModel dragonskin30() { return line(0.917, -0.163, 1.81); }
LinearModel dragonskin20() { return line(0.986, -0.129, 1.42); }
LinearModel dragonskin10() { return line(0.983, -0.111, 2.45); }
LinearModel ecoflex10() { return line(0.985, -0.0953, 0.987); }

std::vector<std::pair<std::string, LinearModel>> all() {
  return {{"dragonskin30", dragonskin30()},
          {"dragonskin20", dragonskin20()},
          {"dragonskin10", dragonskin10()},
          {"ecoflex10", ecoflex10()}};
}

}  // namespace pad_lines

}  // namespace tactile
