#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "tactile/formats.hpp"
#include "tactile/report.hpp"

using namespace tactile;

namespace {

template <class E>
std::size_t error_line(auto&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.line();
  }
  return 0;
}

const char* kHeader = "t_s,finger_id,r,c,adc_0,adc_1,adc_2,adc_3\n";

}  // namespace

TEST_SUITE("formats") {

TEST_CASE("minimal frame log") {
  const auto frames = parse_frames(std::string(kHeader) + "0,0,2,2,500,501,502,503\n");
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].adc_counts == std::vector<int>{500, 501, 502, 503});
  CHECK(frames[0].rows == 2);
}

TEST_CASE("frame log errors carry the line") {
  const std::string h = kHeader;
  CHECK(error_line<RangeError>([&] { parse_frames(h + "0,0,2,2,1,2,3,4\n0.1,0,2,2,1,1100,3,4\n"); }) == 3);
  CHECK(error_line<OrderError>([&] { parse_frames(h + "1,0,2,2,1,2,3,4\n0.5,0,2,2,1,2,3,4\n"); }) == 3);
  CHECK(error_line<OrderError>([&] { parse_frames(h + "1,0,2,2,1,2,3,4\n1,0,2,2,1,2,3,4\n"); }) == 3);
  CHECK(error_line<FormatError>([&] { parse_frames("time,finger\n0,0\n"); }) == 1);
  CHECK(error_line<FormatError>([&] { parse_frames(h + "0,0,2,2,1,2,3\n"); }) == 2);
  CHECK(error_line<FormatError>([&] { parse_frames(h + "0,0,2,2,1,x,3,4\n"); }) == 2);
  CHECK(error_line<FormatError>([&] { parse_frames(h + "0,0,3,1,1,2,3,4\n"); }) == 2);
  CHECK_THROWS_AS(parse_frames(""), FormatError);
  // Two fingers share a timestamp.
  CHECK(parse_frames(h + "0,0,2,2,1,2,3,4\n0,1,2,2,1,2,3,4\n").size() == 2);
}

TEST_CASE("frame and mark round-trip") {
  const std::vector<SensorFrame> frames{{0.0, 0, 1, 2, {0, 1023}}, {1.0 / 15, 0, 1, 2, {17, 900}}};
  std::ostringstream s;
  write_frames(s, frames);
  const auto back = parse_frames(s.str());
  REQUIRE(back.size() == 2);
  CHECK(back[1].timestamp == frames[1].timestamp);
  CHECK(back[1].adc_counts == frames[1].adc_counts);

  const std::vector<ActuationMark> marks{{1.0, MarkKind::close_start}, {1.1, MarkKind::close_stop}};
  std::ostringstream m;
  write_marks(m, marks);
  CHECK(parse_marks(m.str()) == marks);
  CHECK(error_line<OrderError>([] { parse_marks("t_s,kind\n2,close_start\n1,close_stop\n"); }) == 3);
  CHECK(error_line<FormatError>([] { parse_marks("t_s,kind\n2,pinch\n"); }) == 2);
}

TEST_CASE("fit results round-trip") {
  const std::vector<FitRow> rows{{40.0, 0.2, -30.0, 1e-9, 1.1, 2.5},
                                 {1.0 / 3.0, 0.179, -12.5, 0.25, 0.9, 5.0}};
  std::ostringstream s;
  write_fit_results(s, rows);
  CHECK(s.str().rfind("a_star,lambda_star,c_star,rms_residual,t_p,t_c\n", 0) == 0);
  CHECK(parse_fit_results("# note\n" + s.str()) == rows);
  CHECK_THROWS_AS(parse_fit_results("a,b\n"), FormatError);
}

TEST_CASE("plot data marks the window") {
  std::vector<double> t, y;
  for (int k = 0; k < 60; ++k) {
    t.push_back(k / 15.0);
    y.push_back(10 * std::exp(-t.back()) - 5);
  }
  const ResistanceTrace tr = make_trace(SensorLayout{{0}, 1, 1}, t, {y});
  const FitWindow w{0.0, 0.0, 0.5, 2.5};
  const DecayFit f = fit_decay(tr, w);
  std::ostringstream s;
  write_plot_data(s, tr, f);
  std::istringstream in(s.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t_s,observed_pct,fitted_pct,in_window");
  int rows = 0, inside = 0;
  while (std::getline(in, line)) {
    ++rows;
    inside += line.back() == '1';
  }
  CHECK(rows == 60);
  CHECK(inside == static_cast<int>(f.n_samples));
}

TEST_CASE("report round-trips and tables") {
  const std::vector<SweepRow> sweep{{2.5, 2.5, 9.2, 72.8, 200, 0}, {10, 2.0, 2.4, 16.7, 200, 1}};
  std::ostringstream s;
  write_sweep(s, sweep);
  const auto back = parse_sweep(s.str());
  REQUIRE(back.size() == 2);
  CHECK(back[1].n_excluded == 1);
  CHECK(back[0].raw_error == 9.2);
  CHECK(detect_report_kind(s.str()) == ReportKind::sweep);
  const std::string table = render_sweep_table(back);
  CHECK(table.find("Cutoff time (s)") != std::string::npos);
  CHECK(table.find("9.20") != std::string::npos);

  const std::vector<BenchRow> bench{{"raw@2.5s", 1.32, 0.5, 20.0, 200, 0},
                                    {"raw@10s", 0.42, 0.2, 6.0, 200, 0},
                                    {"raw@20s", 0.045, 0.01, 1.0, 200, 0},
                                    {"exponential@2.5s", 0.14, 0.1, 2.0, 200, 0}};
  std::ostringstream b;
  write_bench(b, bench);
  CHECK(detect_report_kind(b.str()) == ReportKind::bench);
  const auto bb = parse_bench(b.str());
  REQUIRE(bb.size() == 4);
  CHECK(bb[3].technique == "exponential@2.5s");
  const std::string bt = render_bench_table(bb);
  CHECK(bt.find("exponential@2.5s") != std::string::npos);
  CHECK(bt.find("1.320 +- 0.500") != std::string::npos);

  CHECK(render_sweep_table({}) == "no rows\n");
  CHECK(render_bench_table({}) == "no rows\n");
  CHECK_THROWS_AS(detect_report_kind("foo,bar\n"), FormatError);
  CHECK_THROWS_AS(parse_sweep("cutoff_s,exp\n"), FormatError);
  CHECK_THROWS_AS(parse_bench(b.str() + "x,1,2,3,-4,0\n"), FormatError);
  CHECK(parse_report_kind("bench") == ReportKind::bench);
}

}  // TEST_SUITE
