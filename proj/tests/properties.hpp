#pragma once

// Property suites over hand-rolled generators.  Each returns the number of
// failing cases and fills `first_failure` with a description of the first.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tactile/calibration.hpp"
#include "tactile/formats.hpp"
#include "tactile/sim_harness.hpp"
#include "tactile/transient_fit.hpp"

namespace props {

struct Outcome {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void check(bool ok, const std::string& what) {
    ++cases;
    if (!ok && failures++ == 0) first_failure = what;
  }
  bool ok() const { return failures == 0; }
};

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

/// normalize(r_avg * (1 + p/100), r_avg) == p.
inline Outcome normalization_round_trip(std::uint64_t seed, std::size_t n = 2000) {
  oracle::Gen g(seed);
  Outcome o;
  for (std::size_t i = 0; i < n; ++i) {
    const double r_avg = g.log_real(10.0, 1e6);
    const double p = g.real(-99.0, 300.0);
    const double back = tactile::normalize(r_avg * (1.0 + p / 100.0), r_avg);
    o.check(std::abs(back - p) <= 1e-9 * std::max(1.0, std::abs(p)),
            "r_avg=" + std::to_string(r_avg) + " p=" + std::to_string(p));
  }
  return o;
}

/// Adding k shifts C* by k; multiplying by s scales A* and C*; the rate is
/// unchanged in both cases.
inline Outcome fit_equivariance(std::uint64_t seed, std::size_t n = 100) {
  oracle::Gen g(seed);
  Outcome o;
  const tactile::FitWindow w{0.0, 0.0, 0.5, 2.5};
  const auto t = oracle::sample_times(40, 15.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto y = oracle::decay(t, g.real(5, 60), g.log_real(0.05, 5.0), g.real(-60, 0), 0.0);
    for (double& v : y) v += g.normal(0, 0.5);
    const tactile::DecayFit base = tactile::fit_decay_series(t, y, w);
    const double k = g.real(-30, 30);
    const double s = g.real(0.2, 5.0);
    std::vector<double> shifted = y, scaled = y;
    for (double& v : shifted) v += k;
    for (double& v : scaled) v *= s;
    const tactile::DecayFit fs = tactile::fit_decay_series(t, shifted, w);
    const tactile::DecayFit fm = tactile::fit_decay_series(t, scaled, w);
    const std::string tag = "case " + std::to_string(i);
    o.check(close_rel(fs.c_star, base.c_star + k, 1e-6), tag + " shift C*");
    o.check(close_rel(fs.a_star, base.a_star, 1e-6), tag + " shift A*");
    o.check(close_rel(fs.lambda_star, base.lambda_star, 1e-6), tag + " shift lambda*");
    o.check(close_rel(fm.c_star, s * base.c_star, 1e-6), tag + " scale C*");
    o.check(close_rel(fm.a_star, s * base.a_star, 1e-6), tag + " scale A*");
    o.check(close_rel(fm.lambda_star, base.lambda_star, 1e-6), tag + " scale lambda*");
  }
  return o;
}

/// OLS residuals sum to zero and the line passes through the centroid.
inline Outcome ols_centroid(std::uint64_t seed, std::size_t n = 500) {
  oracle::Gen g(seed);
  Outcome o;
  for (std::size_t i = 0; i < n; ++i) {
    const int m = g.integer(2, 80);
    std::vector<tactile::CalibrationPoint> pts;
    double sx = 0, sy = 0;
    for (int j = 0; j < m; ++j) {
      pts.push_back({g.real(-90, 5), g.real(-2, 15)});
      sx += pts.back().rel_pct;
      sy += pts.back().value;
    }
    const tactile::LinearModel fit = tactile::fit_linear(pts);
    double resid = 0, scale = 0;
    for (const auto& p : pts) {
      resid += p.value - fit.evaluate(p.rel_pct);
      scale += std::abs(p.value);
    }
    o.check(std::abs(fit.evaluate(sx / m) - sy / m) <= 1e-10 * std::max(1.0, std::abs(sy / m)),
            "centroid, case " + std::to_string(i));
    o.check(std::abs(resid) <= 1e-10 * std::max(1.0, scale), "residual sum, case " + std::to_string(i));
  }
  return o;
}

/// parse(format(p)) == p for random profiles.
inline Outcome profile_round_trip(std::uint64_t seed, std::size_t n = 200) {
  oracle::Gen g(seed);
  Outcome o;
  const char* names[] = {"dragonskin30", "ecoflex10", "pad b", "x"};
  for (std::size_t i = 0; i < n; ++i) {
    tactile::CalibrationProfile p;
    p.baseline.layout.finger_ids.clear();
    const int fingers = g.integer(1, 3);
    for (int f = 0; f < fingers; ++f) p.baseline.layout.finger_ids.push_back(f * 2 + g.integer(0, 1));
    p.baseline.layout.rows = g.integer(1, 4);
    p.baseline.layout.cols = g.integer(1, 4);
    for (std::size_t k = 0; k < p.baseline.layout.pixel_count(); ++k) {
      p.baseline.r_avg.push_back(g.log_real(1.0, 1e7));
    }
    p.divider = {g.real(1, 12), g.log_real(100, 1e6)};
    p.created_at = "run-" + std::to_string(i);
    const int models = g.integer(0, 4);
    for (int k = 0; k < models; ++k) {
      p.force_models[names[k]] = {g.real(-1, 1), g.real(-5, 5), g.real(0, 1),
                                  static_cast<std::size_t>(g.integer(2, 500)),
                                  tactile::OutputUnit::newtons};
    }
    if (g.integer(0, 1)) {
      p.stiffness_model = tactile::LinearModel{g.real(-1, 1), g.real(-5, 5), g.real(0, 1), 7,
                                               tactile::OutputUnit::newtons_per_mm};
    }
    o.check(tactile::parse_profile(tactile::format_profile(p)) == p, "profile " + std::to_string(i));
  }
  return o;
}

inline std::string simulate_log(std::uint64_t seed, double diameter, double close_to) {
  const std::vector<tactile::WidthCommand> sched{{0.0, diameter + 5}, {1.0, close_to}};
  const tactile::SimResult r =
      tactile::simulate_grasp(tactile::SimObject{diameter, 2.0, {}, {}}, sched,
                              tactile::SimSensorParams{}, seed, 4.0);
  std::ostringstream s;
  tactile::write_frames(s, r.frames);
  tactile::write_marks(s, r.marks);
  tactile::write_truth(s, r.truth);
  return s.str();
}

/// Identical inputs and seed give byte-identical logs.
inline Outcome simulator_determinism(std::uint64_t seed, std::size_t n = 10) {
  oracle::Gen g(seed);
  Outcome o;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t s = g.rng.next_u64();
    const double d = g.real(20, 50);
    const double w = d - g.real(0, 6);
    o.check(simulate_log(s, d, w) == simulate_log(s, d, w), "seed " + std::to_string(s));
  }
  return o;
}

}  // namespace props
