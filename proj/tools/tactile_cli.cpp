// Command-line front end: fits, calibration profiles, simulator experiments
// and produce analytics.  Exit codes: 0 ok, 1 usage, 2 data, 3 numerical.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tactile/calibration.hpp"
#include "tactile/core_model.hpp"
#include "tactile/formats.hpp"
#include "tactile/grasp_control.hpp"
#include "tactile/produce_analysis.hpp"
#include "tactile/report.hpp"
#include "tactile/sim_harness.hpp"
#include "tactile/text_util.hpp"
#include "tactile/transient_fit.hpp"

namespace fs = std::filesystem;
using namespace tactile;

namespace {

/// Writes `text` to `path` atomically, or to stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  write_file_atomic(path, [&](std::ostream& out) { out << text; });
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

struct Inputs {
  std::string frames;
  std::string marks;
  std::string profile;
};

/// Loads frames and marks and converts them against the profile's baseline,
/// or against the first kQuietFrames samples when no profile is given.
ResistanceTrace load_trace(const Inputs& in) {
  const std::vector<SensorFrame> frames = read_frames(in.frames);
  if (frames.empty()) throw EmptyCapture("frame log " + in.frames + " has no frames");
  std::vector<ActuationMark> marks;
  if (!in.marks.empty()) marks = read_marks(in.marks);
  if (!in.profile.empty()) {
    const CalibrationProfile profile = load_profile(in.profile);
    return build_trace(frames, profile.baseline, profile.divider, std::move(marks));
  }
  const PixelBaseline baseline = capture_baseline(frames);
  return build_trace(frames, baseline, DividerConfig{}, std::move(marks));
}

void add_inputs(CLI::App* cmd, Inputs& in, bool marks_required) {
  cmd->add_option("--frames", in.frames, "Frame log CSV")->required()->check(CLI::ExistingFile);
  auto* m = cmd->add_option("--marks", in.marks, "Actuation marks CSV")->check(CLI::ExistingFile);
  if (marks_required) m->required();
  cmd->add_option("--profile", in.profile, "Calibration profile (baseline and divider)")
      ->check(CLI::ExistingFile);
}

struct FitOptions {
  Inputs in;
  double t_a = kDefaultGuard;
  double t_c = kDefaultCutoff;
  std::vector<double> t_actuation;
  std::string out;
  std::string plot;
};

void run_fit(const FitOptions& o) {
  const ResistanceTrace trace = load_trace(o.in);
  std::vector<double> stops = o.t_actuation;
  if (stops.empty()) {
    for (const auto& m : trace.marks) {
      if (m.kind == MarkKind::close_stop) stops.push_back(m.time);
    }
  }
  if (stops.empty()) throw DataError("MissingMarks", "no close_stop marks and no --t-actuation");

  std::vector<FitRow> rows;
  std::vector<DecayFit> fits;
  const double half_period =
      trace.sample_count() > 1 ? 0.5 * (trace.times.back() - trace.times.front()) /
                                     static_cast<double>(trace.sample_count() - 1)
                               : 0.0;
  for (double t : stops) {
    const FitWindow w = make_window(trace, t, o.t_a, o.t_c);
    if (trace.times.back() < w.end() - half_period) {
      throw InsufficientData("capture ends at " + format_number(trace.times.back()) +
                             " s, before the window end " + format_number(w.end()) + " s");
    }
    fits.push_back(fit_decay(trace, w));
    rows.push_back(FitRow::from(fits.back()));
  }
  emit(o.out, render([&](std::ostream& s) { write_fit_results(s, rows); }));
  if (!o.plot.empty()) {
    emit(o.plot, render([&](std::ostream& s) { write_plot_data(s, trace, fits.front()); }));
  }
}

struct CalibrateOptions {
  std::string out;
  std::string profile;
  std::string baseline_frames;
  std::string points;
  std::string material;
  std::string unit = "newtons";
  bool pad_lines = false;
  std::string created_at;
};

std::vector<CalibrationPoint> read_points(const std::string& path) {
  static constexpr std::string_view kColumns[] = {"rel_pct", "value"};
  const CsvTable table = parse_csv(read_file(path));
  if (table.rows.empty()) throw FormatError(1, "points file has no header");
  expect_header(table.rows.front(), kColumns);
  std::vector<CalibrationPoint> pts;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i].cells.size() != 2) throw FormatError(table.rows[i].line, "expected 2 columns");
    pts.push_back({csv_number(table.rows[i], 0), csv_number(table.rows[i], 1)});
  }
  return pts;
}

void run_calibrate(const CalibrateOptions& o) {
  CalibrationProfile p;
  if (!o.profile.empty()) p = load_profile(o.profile);
  if (!o.baseline_frames.empty()) p.baseline = capture_baseline(read_frames(o.baseline_frames), p.divider);
  if (o.profile.empty() && o.baseline_frames.empty()) {
    throw std::invalid_argument("a new profile needs --baseline-frames");
  }
  if (!o.created_at.empty()) p.created_at = o.created_at;
  if (o.pad_lines) {
    for (const auto& [name, line] : pad_lines::all()) p.force_models[name] = line;
  }
  std::ostringstream summary;
  if (!o.points.empty()) {
    const OutputUnit unit = parse_output_unit(o.unit);
    const std::vector<CalibrationPoint> pts = read_points(o.points);
    const LinearModel m = fit_linear(pts, unit);
    if (unit == OutputUnit::newtons_per_mm) {
      p.stiffness_model = m;
    } else {
      if (o.material.empty()) throw std::invalid_argument("--material is required for force points");
      p.force_models[o.material] = m;
    }
    summary << "slope=" << format_number(m.slope) << " intercept=" << format_number(m.intercept)
            << " r_squared=" << format_number(m.r_squared) << " n=" << m.n_points << '\n';
  }
  p.baseline.validate();
  save_profile(p, o.out);
  std::cout << summary.str();
}

struct EstimateForceOptions {
  std::string profile;
  std::string material;
  std::optional<double> c_star;
  std::string fits;
  std::string out;
};

void run_estimate_force(const EstimateForceOptions& o) {
  const CalibrationProfile p = load_profile(o.profile);
  const auto it = p.force_models.find(o.material);
  if (it == p.force_models.end()) {
    throw DataError("UnknownMaterial", "profile has no force model '" + o.material + "'");
  }
  std::vector<double> values;
  if (o.c_star) values.push_back(*o.c_star);
  if (!o.fits.empty()) {
    for (const auto& r : parse_fit_results(read_file(o.fits))) values.push_back(r.c_star);
  }
  if (values.empty()) throw std::invalid_argument("give --c-star or --fits");
  std::ostringstream s;
  s << "c_star_pct,force_N,below_range\n";
  for (double c : values) {
    const ClampedEstimate e = estimate_force(c, it->second);
    s << format_number(c) << ',' << format_number(e.value) << ',' << (e.below_range ? 1 : 0) << '\n';
  }
  emit(o.out, s.str());
}

struct SimObjectOptions {
  double diameter = 35.0;
  double stiffness = 5.0;
  double noise = 0.5;
  double spike_gain = SimSensorParams{}.spike_gain;
  std::uint64_t seed = 1;
};

void add_object(CLI::App* cmd, SimObjectOptions& o) {
  cmd->add_option("--diameter", o.diameter, "Simulated object diameter (mm)");
  cmd->add_option("--stiffness", o.stiffness, "Simulated object stiffness (N/mm)");
  cmd->add_option("--noise", o.noise, "Per-pixel noise sigma (percent)");
  cmd->add_option("--spike-gain", o.spike_gain, "Transient amplitude per newton (percent/N)");
  cmd->add_option("--seed", o.seed, "Simulator seed");
}

struct EstimateSizeOptions {
  SimObjectOptions object;
  SizeEstimationConfig cfg;
  std::string scope = "aggregate";
  std::string policy = "decay_fit";
  std::optional<double> target_force;
  double band = 0.5;
  std::string material = "dragonskin20";
  std::string profile;
  std::string log;
  bool empty = false;
};

void run_estimate_size(EstimateSizeOptions o) {
  o.cfg.contact.scope = parse_contact_scope(o.scope);
  o.cfg.contact.settle_policy = parse_settle_policy(o.policy);
  SimObject obj;
  obj.diameter = o.empty ? 1e-3 : o.object.diameter;
  obj.stiffness = o.object.stiffness;
  SimSensorParams params;
  params.noise_sigma = o.object.noise;
  params.spike_gain = o.object.spike_gain;
  SimulatedGripper gripper(obj, params, o.object.seed, o.cfg.w_start + 10.0);

  std::vector<ControlEvent> log;
  auto flush_log = [&] {
    if (!o.log.empty()) emit(o.log, render([&](std::ostream& s) { write_event_log(s, log); }));
  };
  try {
    if (o.target_force) {
      LinearModel model = pad_lines::dragonskin20();
      if (!o.profile.empty()) {
        const CalibrationProfile p = load_profile(o.profile);
        const auto it = p.force_models.find(o.material);
        if (it == p.force_models.end()) {
          throw DataError("UnknownMaterial", "profile has no force model '" + o.material + "'");
        }
        model = it->second;
      }
      const ForceGraspResult r = grasp_to_force(gripper, *o.target_force, o.band, model, o.cfg, &log);
      flush_log();
      std::cout << "final_width_mm,force_N,c_star_pct,steps,true_force_N\n"
                << format_number(r.final_width) << ',' << format_number(r.force_n) << ','
                << format_number(r.c_star) << ',' << r.steps << ','
                << format_number(gripper.true_force()) << '\n';
    } else {
      const SizeEstimate r = estimate_size(gripper, o.cfg, &log);
      flush_log();
      std::cout << "size_mm,contact_width_mm,c_star_pct,steps,true_diameter_mm\n"
                << format_number(r.size_mm) << ',' << format_number(r.contact_width) << ','
                << format_number(r.c_star) << ',' << r.steps << ',' << format_number(obj.diameter)
                << '\n';
    }
  } catch (...) {
    flush_log();
    throw;
  }
}

struct SimulateOptions {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
};

void run_simulate(const SimulateOptions& o) {
  Scenario s;
  if (!o.scenario.empty()) {
    s = parse_scenario(read_file(o.scenario));
  } else {
    s.schedule = {{0.0, s.object.diameter + 5.0}, {1.0, s.object.diameter - 3.0}};
  }
  if (o.seed) s.seed = *o.seed;
  if (o.duration) s.duration = *o.duration;
  const SimResult r = simulate_grasp(s.object, s.schedule, s.params, s.seed, s.duration);
  emit(o.out + ".frames.csv", render([&](std::ostream& out) { write_frames(out, r.frames); }));
  emit(o.out + ".marks.csv", render([&](std::ostream& out) { write_marks(out, r.marks); }));
  emit(o.out + ".truth.csv", render([&](std::ostream& out) { write_truth(out, r.truth); }));
}

struct ExperimentOptions {
  std::vector<double> cutoffs{1.0, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 15.0, 20.0};
  std::size_t repeats = 10;
  double noise = 0.5;
  double spike_gain = SimSensorParams{}.spike_gain;
  double t_c = kDefaultCutoff;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;
};

void add_experiment(CLI::App* cmd, ExperimentOptions& o) {
  cmd->add_option("--repeats", o.repeats, "Repeats per material and compression")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--noise", o.noise, "Per-pixel noise sigma (percent)");
  cmd->add_option("--spike-gain", o.spike_gain, "Transient amplitude per newton (percent/N)");
  cmd->add_option("--seed", o.seed, "Corpus seed");
  cmd->add_option("--format", o.format, "csv or table")->check(CLI::IsMember({"csv", "table"}));
  cmd->add_option("--out", o.out, "Output path (default stdout)");
}

CorpusSpec corpus_for(const ExperimentOptions& o) {
  CorpusSpec c;
  c.repeats = o.repeats;
  return c;
}

SimSensorParams params_for(const ExperimentOptions& o) {
  SimSensorParams p;
  p.noise_sigma = o.noise;
  p.spike_gain = o.spike_gain;
  return p;
}

void run_sweep(const ExperimentOptions& o) {
  const auto rows = run_cutoff_sweep(corpus_for(o), o.cutoffs, params_for(o), o.seed);
  emit(o.out, o.format == "table" ? render_sweep_table(rows)
                                  : render([&](std::ostream& s) { write_sweep(s, rows); }));
}

void run_bench(const ExperimentOptions& o) {
  static constexpr double kRawTimes[] = {2.5, 10.0, 20.0};
  const auto rows = run_force_benchmark(corpus_for(o), params_for(o), o.seed, kRawTimes, o.t_c);
  emit(o.out, o.format == "table" ? render_bench_table(rows)
                                  : render([&](std::ostream& s) { write_bench(s, rows); }));
}

struct RipenessOptions {
  std::vector<std::string> sessions;
  double s_min = kDefaultTrendThreshold;
};

void run_ripeness(const RipenessOptions& o) {
  std::vector<SessionRecord> sessions;
  for (const auto& path : o.sessions) sessions.push_back(read_session(path));
  const RipenessTrend t = ripeness_trend(sessions, o.s_min);
  std::cout << "slope_pct_per_day,direction\n"
            << format_number(t.slope) << ',' << to_string(t.direction) << '\n';
}

struct BruiseOptionsCli {
  std::string reference;
  std::string observed;
  std::string policy = "midpoint_threshold";
  std::optional<double> damaged_mean;
  double z = 3.0;
  double alpha = 0.01;
};

void run_bruise(const BruiseOptionsCli& o) {
  BruiseOptions opts;
  opts.damaged_mean = o.damaged_mean;
  opts.z = o.z;
  opts.alpha = o.alpha;
  const BruiseVerdict v = detect_bruise(read_session(o.reference), read_session(o.observed),
                                        parse_bruise_policy(o.policy), opts);
  std::cout << "verdict,reference_mean_pct,observed_mean_pct,threshold_pct,margin_pct\n"
            << to_string(v.verdict) << ',' << format_number(v.reference_mean) << ','
            << format_number(v.observed_mean) << ',' << format_number(v.threshold) << ','
            << format_number(v.margin) << '\n';
}

struct MonitorOptions {
  Inputs in;
  double window = 1.0;
  double epsilon = -10.0;
  std::string scope = "aggregate";
  std::string out;
};

void run_monitor(const MonitorOptions& o) {
  const ResistanceTrace trace = load_trace(o.in);
  ContactConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.scope = parse_contact_scope(o.scope);
  const auto windows = segment_trace(trace, o.window);
  const auto states = monitor_presence(windows, cfg);
  std::ostringstream s;
  s << "t_start_s,t_end_s,level_pct,state,decided,removed_event\n";
  for (const auto& st : states) {
    s << format_number(st.t_start) << ',' << format_number(st.t_end) << ','
      << format_number(st.level) << ',' << to_string(st.state) << ',' << (st.decided ? 1 : 0)
      << ',' << (st.removed_event ? 1 : 0) << '\n';
  }
  emit(o.out, s.str());
}

struct ReportOptions {
  std::string results;
  std::string kind;
  std::string format = "table";
  std::string csv_out;
};

void run_report(const ReportOptions& o) {
  const std::string text = read_file(o.results);
  const ReportKind kind = o.kind.empty() ? detect_report_kind(text) : parse_report_kind(o.kind);
  std::string table;
  std::string csv;
  if (kind == ReportKind::sweep) {
    const auto rows = parse_sweep(text);
    table = render_sweep_table(rows);
    csv = render([&](std::ostream& s) { write_sweep(s, rows); });
  } else {
    const auto rows = parse_bench(text);
    table = render_bench_table(rows);
    csv = render([&](std::ostream& s) { write_bench(s, rows); });
  }
  if (!o.csv_out.empty()) emit(o.csv_out, csv);
  std::cout << (o.format == "csv" ? csv : table);
}

int report_error(const std::string& kind, const std::string& category, const std::string& message,
                 std::optional<std::size_t> line, std::optional<std::string> field, int code) {
  nlohmann::json j{{"error", kind}, {"category", category}, {"message", message},
                   {"exit_code", code}};
  if (line) j["line"] = *line;
  if (field) j["field"] = *field;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile sensing toolkit: settled-resistance fitting, calibration, grasp control"};
  app.require_subcommand(1, 1);

  FitOptions fit;
  auto* c_fit = app.add_subcommand("fit", "Fit the settled resistance after each closing motion");
  add_inputs(c_fit, fit.in, false);
  c_fit->add_option("--t-c", fit.t_c, "Cutoff time after actuation (s)");
  c_fit->add_option("--t-a", fit.t_a, "Guard time after the peak (s)");
  c_fit->add_option("--t-actuation", fit.t_actuation, "Actuation times, overriding the marks")
      ->delimiter(',');
  c_fit->add_option("--out", fit.out, "Fit-result CSV (default stdout)");
  c_fit->add_option("--plot", fit.plot, "Plot-data CSV for the first fit");
  std::string fit_format = "csv";
  c_fit->add_option("--format", fit_format, "Output format (csv)")->check(CLI::IsMember({"csv"}));
  c_fit->callback([&] { run_fit(fit); });

  CalibrateOptions cal;
  auto* c_cal = app.add_subcommand("calibrate", "Create or extend a calibration profile");
  c_cal->add_option("--out", cal.out, "Profile to write")->required();
  c_cal->add_option("--profile", cal.profile, "Existing profile to extend")->check(CLI::ExistingFile);
  c_cal->add_option("--baseline-frames", cal.baseline_frames, "Pressure-free frame log")
      ->check(CLI::ExistingFile);
  c_cal->add_option("--points", cal.points, "CSV of rel_pct,value calibration points")
      ->check(CLI::ExistingFile);
  c_cal->add_option("--material", cal.material, "Name of the fitted force model");
  c_cal->add_option("--unit", cal.unit, "newtons, newtons_per_mm or pounds_grip");
  c_cal->add_flag("--pad-lines", cal.pad_lines, "Add the four reference silicone force lines");
  c_cal->add_option("--created-at", cal.created_at, "Creation stamp stored in the profile");
  c_cal->callback([&] { run_calibrate(cal); });

  EstimateForceOptions ef;
  auto* c_ef = app.add_subcommand("estimate-force", "Map settled estimates to grasp force");
  c_ef->add_option("--profile", ef.profile, "Calibration profile")->required()->check(CLI::ExistingFile);
  c_ef->add_option("--material", ef.material, "Force model name")->required();
  c_ef->add_option("--c-star", ef.c_star, "Settled relative resistance (percent)");
  c_ef->add_option("--fits", ef.fits, "Fit-result CSV")->check(CLI::ExistingFile);
  c_ef->add_option("--out", ef.out, "Output CSV (default stdout)");
  c_ef->callback([&] { run_estimate_force(ef); });

  EstimateSizeOptions es;
  auto* c_es = app.add_subcommand("estimate-size", "Size estimation (or force grasp) on the simulator");
  add_object(c_es, es.object);
  c_es->add_option("--w-start", es.cfg.w_start, "Opening width (mm)");
  c_es->add_option("--w-min", es.cfg.w_min, "Minimum width (mm)");
  c_es->add_option("--delta", es.cfg.delta_w, "Closing increment (mm)");
  c_es->add_option("--secure-extra", es.cfg.secure_extra, "Closure after the estimate (mm)");
  c_es->add_option("--epsilon", es.cfg.contact.epsilon, "Contact threshold (percent)");
  c_es->add_option("--t-c", es.cfg.contact.t_c, "Cutoff time (s)");
  c_es->add_option("--scope", es.scope, "aggregate or any_pixel");
  c_es->add_option("--policy", es.policy, "decay_fit or raw_at_tc");
  c_es->add_option("--target-force", es.target_force, "Close to this force instead (N)");
  c_es->add_option("--band", es.band, "Accepted force band half-width (N)");
  c_es->add_option("--profile", es.profile, "Profile holding the force model")->check(CLI::ExistingFile);
  c_es->add_option("--material", es.material, "Force model name");
  c_es->add_flag("--empty", es.empty, "Run with no object between the fingers");
  c_es->add_option("--log", es.log, "Control event log CSV");
  c_es->callback([&] { run_estimate_size(es); });

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Write a simulated frame log with ground truth");
  c_sim->add_option("--scenario", sim.scenario, "Scenario file")->check(CLI::ExistingFile);
  c_sim->add_option("--out", sim.out, "Output prefix (.frames.csv, .marks.csv, .truth.csv)")
      ->required();
  c_sim->add_option("--seed", sim.seed, "Override the scenario seed");
  c_sim->add_option("--duration", sim.duration, "Override the capture duration (s)");
  c_sim->callback([&] { run_simulate(sim); });

  ExperimentOptions sweep;
  auto* c_sw = app.add_subcommand("sweep-cutoff", "Settled-estimate error against cutoff time");
  add_experiment(c_sw, sweep);
  c_sw->add_option("--cutoffs", sweep.cutoffs, "Cutoff times (s), comma separated")->delimiter(',');
  c_sw->callback([&] { run_sweep(sweep); });

  ExperimentOptions bench;
  auto* c_bf = app.add_subcommand("bench-force", "Force error of raw readings and decay fits");
  add_experiment(c_bf, bench);
  c_bf->add_option("--t-c", bench.t_c, "Cutoff of the decay fit (s)");
  c_bf->callback([&] { run_bench(bench); });

  RipenessOptions rip;
  auto* c_rip = app.add_subcommand("ripeness", "Trend of settled response across sessions");
  c_rip->add_option("--sessions", rip.sessions, "Session files in day order")
      ->required()
      ->check(CLI::ExistingFile);
  c_rip->add_option("--s-min", rip.s_min, "Slope threshold (percent/day)");
  c_rip->callback([&] { run_ripeness(rip); });

  BruiseOptionsCli br;
  auto* c_br = app.add_subcommand("bruise", "Compare an observed session with a reference");
  c_br->add_option("--reference", br.reference, "Reference session")->required()->check(CLI::ExistingFile);
  c_br->add_option("--observed", br.observed, "Observed session")->required()->check(CLI::ExistingFile);
  c_br->add_option("--policy", br.policy, "midpoint_threshold or welch_test");
  c_br->add_option("--damaged-mean", br.damaged_mean, "Mean of known damaged produce (percent)");
  c_br->add_option("--z", br.z, "Sigma multiplier without a damaged mean");
  c_br->add_option("--alpha", br.alpha, "Welch test significance");
  c_br->callback([&] { run_bruise(br); });

  MonitorOptions mon;
  auto* c_mon = app.add_subcommand("monitor", "Object presence per window of a continuous capture");
  add_inputs(c_mon, mon.in, false);
  c_mon->add_option("--window", mon.window, "Window length (s)")->check(CLI::PositiveNumber);
  c_mon->add_option("--epsilon", mon.epsilon, "Presence threshold (percent)");
  c_mon->add_option("--scope", mon.scope, "aggregate or any_pixel");
  c_mon->add_option("--out", mon.out, "Output CSV (default stdout)");
  c_mon->callback([&] { run_monitor(mon); });

  ReportOptions rep;
  auto* c_rep = app.add_subcommand("report", "Render sweep or benchmark results");
  c_rep->add_option("--results", rep.results, "Results CSV")->required()->check(CLI::ExistingFile);
  c_rep->add_option("--kind", rep.kind, "sweep or bench (default: from the header)");
  c_rep->add_option("--format", rep.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
  c_rep->add_option("--csv-out", rep.csv_out, "Also write the rows as CSV");
  c_rep->callback([&] { run_report(rep); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const LineError& e) {
    return report_error(e.kind(), "data", e.what(), e.line(), std::nullopt, 2);
  } catch (const ProfileParseError& e) {
    return report_error(e.kind(), "data", e.what(), e.line(), e.field(), 2);
  } catch (const Error& e) {
    const bool data = e.category() == ErrorCategory::data;
    return report_error(e.kind(), data ? "data" : "numerical", e.what(), std::nullopt, std::nullopt,
                        data ? 2 : 3);
  } catch (const std::out_of_range& e) {
    return report_error("RangeError", "data", e.what(), std::nullopt, std::nullopt, 2);
  } catch (const std::invalid_argument& e) {
    return report_error("UsageError", "usage", e.what(), std::nullopt, std::nullopt, 1);
  }
  return 0;
}
