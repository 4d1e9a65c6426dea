#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tactile/produce_analysis.hpp"

using namespace tactile;

namespace {

SessionRecord session(std::vector<double> c, int day = 0, double width = 30.0) {
  return SessionRecord{"s" + std::to_string(day), day, std::move(c), width, ""};
}

std::vector<SessionRecord> series(std::span<const double> means, std::span<const int> days) {
  std::vector<SessionRecord> out;
  for (std::size_t i = 0; i < means.size(); ++i) {
    out.push_back(session({means[i] - 0.5, means[i], means[i] + 0.5}, days[i]));
  }
  return out;
}

}  // namespace

TEST_SUITE("produce_analysis") {

TEST_CASE("session statistics") {
  const SessionRecord s = session({-1, -2, -3, -6});
  CHECK(s.mean() == doctest::Approx(-3.0));
  CHECK(s.stddev() == doctest::Approx(std::sqrt(14.0 / 3.0)));
  CHECK(session({-4}).stddev() == 0.0);
  CHECK_THROWS_AS(session({}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(session({kMissing}).validate(), std::invalid_argument);
}

TEST_CASE("ripeness_trend examples") {
  const double m[] = {-25, -20, -14, -9};
  const int d[] = {0, 1, 2, 3};
  const RipenessTrend t = ripeness_trend(series(m, d));
  CHECK(t.slope == doctest::Approx(5.4));
  CHECK(t.direction == TrendDirection::softening);

  const double flat[] = {-20, -20, -20};
  CHECK(ripeness_trend(series(flat, d)).slope == doctest::Approx(0.0));
  CHECK(ripeness_trend(series(flat, d)).direction == TrendDirection::stable);

  const double falling[] = {-9, -14, -20, -25};
  CHECK(ripeness_trend(series(falling, d)).direction == TrendDirection::stiffening);

  const auto one = series(std::span(m, 1), std::span(d, 1));
  CHECK_THROWS_AS(ripeness_trend(one), IncomparableSessions);
  auto mixed = series(m, d);
  mixed[2].grasp_width = 31.0;
  CHECK_THROWS_AS(ripeness_trend(mixed), IncomparableSessions);
  const int backwards[] = {0, 2, 1, 3};
  CHECK_THROWS_AS(ripeness_trend(series(m, backwards)), std::invalid_argument);
  const int same[] = {4, 4, 4, 4};
  CHECK_THROWS_AS(ripeness_trend(series(m, same)), DegenerateAbscissa);
}

TEST_CASE("ripeness slope under day shift and rescale") {
  oracle::Gen g(44);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = g.integer(2, 8);
    std::vector<double> means;
    std::vector<int> days;
    int day = g.integer(0, 3);
    for (int i = 0; i < n; ++i) {
      means.push_back(g.real(-40, -5));
      days.push_back(day);
      day += g.integer(1, 3);
    }
    const double base = ripeness_trend(series(means, days)).slope;
    const int shift = g.integer(-20, 20);
    const int scale = g.integer(2, 5);
    std::vector<int> shifted, scaled;
    for (int x : days) {
      shifted.push_back(x + shift);
      scaled.push_back(x * scale);
    }
    CHECK(ripeness_trend(series(means, shifted)).slope == doctest::Approx(base).epsilon(1e-9));
    CHECK(ripeness_trend(series(means, scaled)).slope == doctest::Approx(base / scale).epsilon(1e-9));
  }
}

TEST_CASE("detect_bruise examples") {
  const SessionRecord ref = session({-24.9 - 0.78, -24.9, -24.9 + 0.78});
  const SessionRecord obs = session({-15.8 - 1.3, -15.8, -15.8 + 1.3});
  BruiseOptions with_damaged;
  with_damaged.damaged_mean = -15.8;
  CHECK(detect_bruise(ref, obs, BruisePolicy::midpoint_threshold).verdict == Verdict::anomalous);
  const BruiseVerdict mid = detect_bruise(ref, obs, BruisePolicy::midpoint_threshold, with_damaged);
  CHECK(mid.threshold == doctest::Approx((-24.9 - 15.8) / 2));
  CHECK(mid.margin == doctest::Approx(std::abs(-15.8 - mid.threshold)));
  CHECK(mid.verdict == Verdict::anomalous);
  CHECK(detect_bruise(ref, obs, BruisePolicy::welch_test).verdict == Verdict::anomalous);

  for (auto p : {BruisePolicy::midpoint_threshold, BruisePolicy::welch_test}) {
    CHECK(detect_bruise(ref, ref, p).verdict == Verdict::nominal);
    CHECK(detect_bruise(obs, obs, p).verdict == Verdict::nominal);
    CHECK(parse_bruise_policy(to_string(p)) == p);
  }
  const SessionRecord constant = session({-20, -20, -20});
  CHECK(detect_bruise(constant, constant, BruisePolicy::welch_test).verdict == Verdict::nominal);
  CHECK(detect_bruise(constant, constant, BruisePolicy::midpoint_threshold).verdict == Verdict::nominal);
}

TEST_CASE("detect_bruise errors") {
  const SessionRecord ref = session({-25, -24, -26});
  CHECK_THROWS_AS(detect_bruise(ref, session({-15, -16, -14}, 0, 20.0), BruisePolicy::welch_test),
                  IncomparableSessions);
  CHECK_THROWS_AS(detect_bruise(ref, session({-15, -16}), BruisePolicy::welch_test), InsufficientData);
  BruiseOptions bad;
  bad.damaged_mean = -30.0;
  CHECK_THROWS_AS(detect_bruise(ref, ref, BruisePolicy::midpoint_threshold, bad), std::invalid_argument);
  CHECK_THROWS_AS(parse_bruise_policy("vibes"), std::invalid_argument);
}

TEST_CASE("Welch threshold against a t-table value") {
  // Equal sizes and variances give 2(n-1) = 4 degrees of freedom; the
  // two-sided 1% critical value for 4 is 4.604.
  const double s = 1.2;
  const SessionRecord ref = session({-20 - s, -20, -20 + s});
  const SessionRecord obs = session({-17 - s, -17, -17 + s});
  const BruiseVerdict v = detect_bruise(ref, obs, BruisePolicy::welch_test);
  const double se = std::sqrt(2.0 * s * s / 3.0);
  CHECK(v.threshold == doctest::Approx(-20.0 + 4.604095 * se).epsilon(1e-6));
  CHECK(v.verdict == Verdict::nominal);
  BruiseOptions loose;
  loose.alpha = 0.2;  // t(0.9, 4) = 1.533
  const BruiseVerdict l = detect_bruise(ref, obs, BruisePolicy::welch_test, loose);
  CHECK(l.threshold == doctest::Approx(-20.0 + 1.533206 * se).epsilon(1e-6));
  CHECK(l.verdict == Verdict::anomalous);
}

TEST_CASE("policies agree on well separated fixtures") {
  oracle::Gen g(71);
  for (int trial = 0; trial < 100; ++trial) {
    const double sd = g.real(0.2, 2.0);
    const double mu = g.real(-40, -10);
    const double sep = g.real(6, 12) * sd;
    const double sign = g.integer(0, 1) ? 1.0 : -1.0;
    const SessionRecord ref = session({mu - sd, mu, mu + sd});
    const double m2 = mu + sign * sep;
    const SessionRecord obs = session({m2 - sd, m2, m2 + sd});
    CHECK(detect_bruise(ref, obs, BruisePolicy::midpoint_threshold).verdict ==
          detect_bruise(ref, obs, BruisePolicy::welch_test).verdict);
  }
}

TEST_CASE("localize_bruise examples") {
  const double ref[] = {-24.9, -24.9, -24.9, -24.9};
  const double bruised[] = {-24.9, -5.9, -24.9, -24.9};
  CHECK(localize_bruise(bruised, ref, 3 * 0.78) == std::vector<std::size_t>{1});
  CHECK(localize_bruise(ref, ref, 3 * 0.78).empty());
  const double sigma = 0.78;
  const double shifted[] = {-24.9, -24.9, -24.9 + 10 * sigma, -24.9};
  CHECK(localize_bruise(shifted, ref, 3 * sigma) == std::vector<std::size_t>{2});
  const double gaps[] = {kMissing, -5.9, -5.0, -24.0};
  const double ref_gaps[] = {-24.9, kMissing, -24.9, -24.9};
  CHECK(localize_bruise(gaps, ref_gaps, 1.0) == std::vector<std::size_t>{2});
  const double margins[] = {1.0, 1.0, 30.0, 1.0};
  CHECK(localize_bruise(shifted, ref, margins).empty());
  CHECK_THROWS(localize_bruise(std::span(shifted, 3), ref, 1.0));
}

TEST_CASE("localize_bruise shrinks as the margin grows") {
  oracle::Gen g(19);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> settled(16), ref(16);
    for (std::size_t i = 0; i < 16; ++i) {
      ref[i] = g.real(-30, -20);
      settled[i] = ref[i] + g.real(-5, 20);
    }
    double margin = 0.0;
    auto prev = localize_bruise(settled, ref, margin);
    for (int step = 0; step < 10; ++step) {
      margin += g.real(0, 3);
      const auto next = localize_bruise(settled, ref, margin);
      CHECK(std::includes(prev.begin(), prev.end(), next.begin(), next.end()));
      prev = next;
    }
  }
}

TEST_CASE("localize_bruise from per-pixel fits") {
  std::vector<double> t;
  for (int k = 0; k < 60; ++k) t.push_back(k / 15.0);
  const double levels[] = {-25, -25, -6, -25};
  std::vector<std::vector<double>> px;
  for (double c : levels) {
    std::vector<double> y;
    for (double ti : t) y.push_back(c + 12 * std::exp(-0.6 * ti));
    px.push_back(y);
  }
  const auto tr = make_trace(SensorLayout{{0}, 2, 2}, t, px);
  const FitWindow w{0.0, 0.0, 0.5, 2.5};
  const auto settled = per_pixel_settled(tr, w);
  CHECK(settled[2] == doctest::Approx(-6).epsilon(1e-6));
  const double ref[] = {-24.9, -24.9, -24.9, -24.9};
  const double margin[] = {2.34, 2.34, 2.34, 2.34};
  CHECK(localize_bruise(tr, w, ref, margin) == std::vector<std::size_t>{2});
}

TEST_CASE("session file round-trip") {
  const SessionRecord s{"avocado-3", 2, {-20.5, -21.25, 1.0 / 3.0 - 22}, 32.5, "left side"};
  const SessionRecord back = parse_session(format_session(s));
  CHECK(back.session_id == s.session_id);
  CHECK(back.day_index == 2);
  CHECK(back.grasp_width == 32.5);
  CHECK(back.notes == "left side");
  CHECK(back.c_stars == s.c_stars);

  const std::vector<FitRow> fits{{10, 0.2, -20.5, 0.1, 1.0, 2.5},
                                 {11, 0.3, -21.25, 0.2, 1.1, 2.5},
                                 {12, 0.1, 1.0 / 3.0 - 22, 0.3, 1.0, 2.5}};
  CHECK(parse_session(format_session(s, fits)).c_stars == s.c_stars);

  const auto path = std::filesystem::temp_directory_path() / "tactile_session_test.csv";
  { std::ofstream(path) << format_session(s); }
  CHECK(read_session(path).c_stars == s.c_stars);
  std::filesystem::remove(path);
}

TEST_CASE("session parse errors") {
  CHECK_THROWS_AS(parse_session("a_star,lambda_star,c_star,rms_residual,t_p,t_c\n1,1,1,1,1,1\n"),
                  FormatError);
  const std::string head = "# session_id = x\n# day_index = 1\n# grasp_width = 30\n";
  CHECK_THROWS_AS(parse_session(head), FormatError);
  try {
    (void)parse_session(head + "a_star,lambda_star,c_star,rms_residual,t_p,t_c\n1,1,oops,1,1,1\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 5);
  }
  CHECK_THROWS_AS(parse_session("# day_index = soon\n" + head), FormatError);
}

}  // TEST_SUITE
