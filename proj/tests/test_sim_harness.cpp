#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tactile/formats.hpp"
#include "tactile/sim_harness.hpp"

using namespace tactile;

namespace {

const std::vector<WidthCommand> kCloseOnce{{0.0, 40.0}, {1.0, 32.0}};

SimSensorParams exact_params() {
  SimSensorParams p;
  p.noise_sigma = 0.0;
  p.quantize_10bit = false;
  return p;
}

std::string frames_text(const SimResult& r) {
  std::ostringstream s;
  write_frames(s, r.frames);
  write_marks(s, r.marks);
  write_truth(s, r.truth);
  return s.str();
}

}  // namespace

TEST_SUITE("sim_harness") {

TEST_CASE("rng is reproducible") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  // First SplitMix64 output of seed 0 is a well-known reference value.
  std::uint64_t s = 0;
  CHECK(splitmix64(s) == 0xE220A8397B1DCDAFULL);
  CHECK(split_seed(7, 0) != split_seed(7, 1));
  CHECK(split_seed(7, 3) == split_seed(7, 3));
  Rng u(5);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = u.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("no contact stays at baseline") {
  const std::vector<WidthCommand> open{{0.0, 50.0}, {1.0, 40.0}};
  const SimResult r = simulate_grasp(SimObject{35, 2, {}, {}}, open, SimSensorParams{}, 1, 5.0);
  for (const auto& t : r.truth) {
    CHECK(t.c_true == 0.0);
    CHECK(t.force == 0.0);
  }
  double sum = 0;
  for (double v : r.trace.aggregate_rel) {
    CHECK(std::abs(v) < 2.0);
    sum += v;
  }
  CHECK(std::abs(sum / static_cast<double>(r.trace.sample_count())) < 0.2);
}

TEST_CASE("noiseless close follows the closed form") {
  const SimObject obj{35.0, 2.0, {}, {}};
  const SimSensorParams p = exact_params();
  const SimResult r = simulate_grasp(obj, kCloseOnce, p, 1, 8.0);
  REQUIRE(r.truth.size() == 2);
  const StepTruth& st = r.truth[1];
  CHECK(st.compression == 3.0);
  CHECK(st.force == 6.0);
  CHECK(st.c_true == doctest::Approx(p.settled_slope * 6.0 + p.settled_intercept));
  CHECK(st.a_true == doctest::Approx(p.spike_gain * 6.0));
  CHECK(st.t_close_stop == doctest::Approx(1.0 + p.actuation_time));
  REQUIRE(r.marks.size() == 2);
  CHECK(r.marks[0] == ActuationMark{1.0, MarkKind::close_start});
  CHECK(r.marks[1].kind == MarkKind::close_stop);
  for (std::size_t k = 0; k < r.trace.sample_count(); ++k) {
    const double t = r.trace.times[k];
    if (t < st.t_close_stop) continue;
    const double want = st.c_true + st.a_true * std::exp(-p.lambda * (t - st.t_close_stop));
    CHECK(r.trace.aggregate_rel[k] == doctest::Approx(want).epsilon(1e-12));
  }
  const FitWindow w = make_window(r.trace, st.t_close_stop);
  const DecayFit f = fit_decay(r.trace, w);
  CHECK(oracle::rel_diff(f.c_star, st.c_true) < 1e-6);
  CHECK(oracle::rel_diff(f.lambda_star, p.lambda) < 1e-6);
}

TEST_CASE("fixed seed gives byte-identical logs") {
  const SimObject obj{35.0, 2.0, {}, {}};
  const std::string a = frames_text(simulate_grasp(obj, kCloseOnce, SimSensorParams{}, 99, 6.0));
  const std::string b = frames_text(simulate_grasp(obj, kCloseOnce, SimSensorParams{}, 99, 6.0));
  const std::string c = frames_text(simulate_grasp(obj, kCloseOnce, SimSensorParams{}, 100, 6.0));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("frame logs re-ingest into the same trace") {
  const SimResult r = simulate_grasp(SimObject{35.0, 2.0, {}, {}}, kCloseOnce, SimSensorParams{}, 5, 4.0);
  std::ostringstream f, m;
  write_frames(f, r.frames);
  write_marks(m, r.marks);
  const auto frames = parse_frames(f.str());
  const auto marks = parse_marks(m.str());
  CHECK(frames.size() == r.frames.size());
  CHECK(marks == r.marks);
  const ResistanceTrace tr = build_trace(frames, r.baseline, SimSensorParams{}.divider, marks);
  CHECK(tr.aggregate_rel == r.trace.aggregate_rel);
}

TEST_CASE("doubling stiffness doubles force along the inverse line") {
  const SimSensorParams p = exact_params();
  for (double k : {0.5, 1.0, 2.0}) {
    const SimResult a = simulate_grasp(SimObject{35, k, {}, {}}, kCloseOnce, p, 1, 2.0);
    const SimResult b = simulate_grasp(SimObject{35, 2 * k, {}, {}}, kCloseOnce, p, 1, 2.0);
    CHECK(b.truth[1].force == doctest::Approx(2 * a.truth[1].force));
    CHECK(b.truth[1].c_true - a.truth[1].c_true ==
          doctest::Approx(p.settled_slope * a.truth[1].force));
  }
}

TEST_CASE("settled level clamps") {
  const SimSensorParams p;
  CHECK(p.settled_level(0.0) == 0.0);
  CHECK(p.settled_level(1.0) == 0.0);
  CHECK(p.settled_level(1e6) == -95.0);
  const SimSensorParams q = SimSensorParams::from_force_line(pad_lines::dragonskin20());
  CHECK(q.settled_slope == doctest::Approx(p.settled_slope));
  CHECK(q.settled_intercept == doctest::Approx(p.settled_intercept));
  const LinearModel m = pad_lines::ecoflex10();
  const SimSensorParams e = SimSensorParams::from_force_line(m);
  CHECK(m.evaluate(e.settled_level(5.0)) == doctest::Approx(5.0));
}

TEST_CASE("schedule and parameter errors") {
  const SimObject obj;
  CHECK_THROWS_AS(simulate_grasp(obj, {}, SimSensorParams{}, 1, 5.0), EmptySchedule);
  const std::vector<WidthCommand> back{{1.0, 40}, {0.5, 30}};
  CHECK_THROWS_AS(simulate_grasp(obj, back, SimSensorParams{}, 1, 5.0), std::invalid_argument);
  const std::vector<WidthCommand> overlap{{0.0, 40}, {1.0, 30}, {1.05, 25}};
  CHECK_THROWS_AS(simulate_grasp(obj, overlap, SimSensorParams{}, 1, 5.0), std::invalid_argument);
  SimSensorParams bad;
  bad.lambda = 0;
  CHECK_THROWS_AS(simulate_grasp(obj, kCloseOnce, bad, 1, 5.0), std::invalid_argument);
  SimObject bad_obj;
  bad_obj.diameter = -3;
  CHECK_THROWS(simulate_grasp(bad_obj, kCloseOnce, SimSensorParams{}, 1, 5.0));
}

TEST_CASE("contact masks and soft spots") {
  const SensorLayout l{{0, 1}, 2, 2};
  const auto all = contact_mask_for(40.0, l, 10.0);
  CHECK(std::count(all.begin(), all.end(), true) == 8);
  const auto none = contact_mask_for(5.0, l, 10.0);
  CHECK(std::count(none.begin(), none.end(), true) == 0);
  SimObject obj{35.0, 2.0, {true, true, false, true, true, true, true, true},
                {1.0, 0.3, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}};
  const SimResult r = simulate_grasp(obj, kCloseOnce, exact_params(), 1, 6.0);
  const std::size_t last = r.trace.sample_count() - 1;
  CHECK(r.trace.per_pixel_rel[2][last] == 0.0);
  CHECK(r.trace.per_pixel_rel[1][last] == doctest::Approx(0.3 * r.trace.per_pixel_rel[0][last]));
}

TEST_CASE("cycling drift and rebaselining") {
  SimSensorParams p;
  p.noise_sigma = 0.0;
  p.drift_rate = 5.0;
  for (const auto& c : simulate_cycling(p, 10, 1000, true, 1)) {
    CHECK(c.start_aggregate == doctest::Approx(0.0).epsilon(1e-12));
  }
  const auto drifting = simulate_cycling(p, 10, 1000, false, 1);
  for (const auto& c : drifting) {
    CHECK(c.start_aggregate == doctest::Approx(5.0 * static_cast<double>(c.cycle) / 1000.0).epsilon(0.3));
  }
  CHECK(drifting.back().start_aggregate > drifting.front().start_aggregate + 30.0);
}

TEST_CASE("simulated gripper captures the last motion") {
  SimulatedGripper g(SimObject{35.0, 2.0, {}, {}}, SimSensorParams{}, 8);
  CHECK(g.current_width() == 60.0);
  CHECK(g.set_width(500.0) == 100.0);
  CHECK(g.set_width(33.0) == 33.0);
  CHECK(g.true_force() == doctest::Approx(4.0));
  const ResistanceTrace tr = g.capture(2.5);
  REQUIRE(tr.marks.size() == 2);
  CHECK(tr.marks[0].kind == MarkKind::close_start);
  CHECK(tr.times.front() >= tr.marks[0].time - 1e-9);
  CHECK(tr.times.back() >= tr.marks[1].time + 2.5 - 1.0 / 15.0);
  CHECK(g.truth().back().force == doctest::Approx(4.0));
  CHECK(g.baseline().r_avg.size() == 8);
}

TEST_CASE("corpus experiments are deterministic and shaped") {
  CorpusSpec small;
  small.repeats = 2;
  const double cutoffs[] = {2.5, 10.0, 20.0};
  const auto a = run_cutoff_sweep(small, cutoffs, SimSensorParams{}, 3);
  const auto b = run_cutoff_sweep(small, cutoffs, SimSensorParams{}, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].exp_error == b[i].exp_error);
    CHECK(a[i].n_trials == small.trial_count());
  }
  CHECK(a[0].exp_error < a[0].raw_error);
  CHECK(a[1].exp_error < a[1].raw_error);
  CHECK(a[0].raw_error > a[1].raw_error);
  CHECK(a[2].raw_error < a[0].raw_error / 10.0);

  const auto noiseless = run_cutoff_sweep(small, cutoffs, exact_params(), 3);
  for (std::size_t i = 0; i < noiseless.size(); ++i) {
    CHECK(noiseless[i].exp_error < 1e-6);
    if (i > 0) CHECK(noiseless[i].raw_error < noiseless[i - 1].raw_error);
  }

  const auto bench = run_force_benchmark(small, exact_params(), 3);
  REQUIRE(bench.size() == 4);
  CHECK(bench.back().technique == "exponential@2.5s");
  CHECK(bench.back().mean_error < 1e-6);
  CHECK(bench.front().technique == "raw@2.5s");
}

TEST_CASE("corpus trial layout") {
  const CorpusSpec corpus;
  CHECK(corpus.trial_count() == 200);
  const CorpusTrial t = simulate_corpus_trial(corpus, 57, SimSensorParams{}, 1, 5.0);
  CHECK(t.material != nullptr);
  CHECK(t.t_stop > 1.0);
  CHECK(t.result.trace.times.back() >= t.t_stop + 5.0 - 1.0 / 15.0);
  CorpusSpec empty;
  empty.materials.clear();
  CHECK_THROWS_AS(simulate_corpus_trial(empty, 0, SimSensorParams{}, 1, 5.0), std::invalid_argument);
}

TEST_CASE("truth file round-trip") {
  const SimResult r = simulate_grasp(SimObject{35, 2, {}, {}}, kCloseOnce, SimSensorParams{}, 1, 3.0);
  std::ostringstream s;
  write_truth(s, r.truth);
  const auto back = parse_truth(s.str());
  REQUIRE(back.size() == r.truth.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].force == r.truth[i].force);
    CHECK(back[i].c_true == r.truth[i].c_true);
    CHECK(back[i].t_close_stop == r.truth[i].t_close_stop);
  }
  CHECK_THROWS_AS(parse_truth("step,force\n"), FormatError);
}

TEST_CASE("scenario round-trip") {
  Scenario s;
  s.object.diameter = 33.25;
  s.object.stiffness = 1.0 / 3.0;
  s.params.noise_sigma = 0.25;
  s.params.layout = SensorLayout{{0}, 3, 3};
  s.schedule = {{0.0, 40.0}, {1.0, 31.5}, {6.0, 40.0}};
  s.seed = 1234567890123ULL;
  s.duration = 9.5;
  const Scenario back = parse_scenario(format_scenario(s));
  CHECK(back.object.diameter == s.object.diameter);
  CHECK(back.object.stiffness == s.object.stiffness);
  CHECK(back.params == s.params);
  CHECK(back.schedule == s.schedule);
  CHECK(back.seed == s.seed);
  CHECK(back.duration == s.duration);

  const Scenario lined = parse_scenario("[sensor]\nforce_line = ecoflex10\n[schedule]\ncommands = 0:40, 1:30\n");
  CHECK(lined.params.settled_slope == doctest::Approx(1.0 / pad_lines::ecoflex10().slope));
  CHECK_THROWS_AS(parse_scenario("[sensor]\nforce_line = ecoflex10\nsettled_slope = -3\n"), FormatError);
  CHECK_THROWS_AS(parse_scenario("[sensor]\nwobble = 1\n"), FormatError);
  CHECK_THROWS_AS(parse_scenario("[schedule]\ncommands = 0-40\n"), FormatError);
}

}  // TEST_SUITE
