#include "tactile/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "tactile/rng.hpp"
#include "tactile/text_util.hpp"

namespace tactile {

namespace {

constexpr double kTimeSlack = 1e-9;
constexpr double kMinLevel = -95.0;   // settled floor, percent
constexpr double kMinSample = -99.0;  // noisy samples never reach zero resistance

struct Segment {
  double t_start = 0.0;
  double t_stop = 0.0;
  double start_level = 0.0;
  double c = 0.0;
  double a = 0.0;
};

/// Shared physics for one simulated capture: the level history produced by
/// width commands and the noise stream for emitted samples.
class Engine {
 public:
  Engine(const SimObject& object, const SimSensorParams& params, std::uint64_t seed,
         double initial_width)
      : object_(object), params_(params), rng_(seed), width_(initial_width) {
    const std::size_t n = params_.layout.pixel_count();
    contact_ = object_.contact_mask.empty() ? std::vector<bool>(n, true) : object_.contact_mask;
    response_ =
        object_.pixel_response.empty() ? std::vector<double>(n, 1.0) : object_.pixel_response;
    const StepTruth t0 = truth_for(0, 0.0, initial_width, 0.0);
    segments_.push_back({-std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity(), t0.c_true, t0.c_true, 0.0});
    truth_.push_back(t0);
    const double rest = params_.base_resistance;
    rest_ohms_ = adc_to_resistance(resistance_to_adc(rest, params_.divider), params_.divider).ohms;
  }

  const StepTruth& command(double t, double width) {
    if (t < segments_.back().t_stop - kTimeSlack) {
      throw std::invalid_argument("width command at t=" + format_number(t) +
                                  " starts before the previous motion ended");
    }
    const bool closing = width < width_;
    const double t_stop = t + params_.actuation_time;
    const StepTruth truth = truth_for(truth_.size(), t_stop, width, 0.0);
    const double a = closing ? params_.spike_gain * truth.force : 0.0;
    segments_.push_back({t, t_stop, level(t), truth.c_true, a});
    truth_.push_back(truth);
    truth_.back().a_true = a;
    if (width != width_) {
      marks_.push_back({t, closing ? MarkKind::close_start : MarkKind::open_start});
      marks_.push_back({t_stop, closing ? MarkKind::close_stop : MarkKind::open_stop});
    }
    width_ = width;
    return truth_.back();
  }

  /// Settled-plus-transient level of a nominal contacting pixel.
  double level(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.t_start; });
    const Segment& s = *std::prev(it);
    if (t < s.t_stop) {
      const double u = (t - s.t_start) / (s.t_stop - s.t_start);
      return s.start_level + (s.c + s.a - s.start_level) * u;
    }
    if (s.a == 0.0) return s.c;
    return s.c + s.a * std::exp(-params_.lambda * (t - s.t_stop));
  }

  double sample_time(std::size_t k) const { return static_cast<double>(k) / params_.sample_rate; }

  /// Noisy per-pixel relative resistance at sample k.
  std::vector<double> sample(std::size_t k) {
    const double base = level(sample_time(k));
    std::vector<double> rel(contact_.size());
    for (std::size_t p = 0; p < rel.size(); ++p) {
      double v = contact_[p] ? response_[p] * base : 0.0;
      if (params_.noise_sigma > 0.0) v += params_.noise_sigma * rng_.normal();
      rel[p] = std::max(v, kMinSample);
    }
    return rel;
  }

  void append_frames(double t, const std::vector<double>& rel, std::vector<SensorFrame>& out,
                     double drift = 1.0) const {
    const SensorLayout& layout = params_.layout;
    const std::size_t per_finger = static_cast<std::size_t>(layout.rows) * layout.cols;
    for (std::size_t f = 0; f < layout.finger_ids.size(); ++f) {
      SensorFrame frame{t, layout.finger_ids[f], layout.rows, layout.cols, {}};
      frame.adc_counts.reserve(per_finger);
      for (std::size_t j = 0; j < per_finger; ++j) {
        const double ohms = params_.base_resistance * drift * (1.0 + rel[f * per_finger + j] / 100.0);
        frame.adc_counts.push_back(resistance_to_adc(ohms, params_.divider));
      }
      out.push_back(std::move(frame));
    }
  }

  PixelBaseline nominal_baseline() const {
    return {params_.layout, std::vector<double>(params_.layout.pixel_count(), rest_ohms_)};
  }

  double width() const { return width_; }
  const std::vector<StepTruth>& truth() const { return truth_; }
  const std::vector<ActuationMark>& marks() const { return marks_; }
  const SimSensorParams& params() const { return params_; }
  double last_stop() const { return segments_.back().t_stop; }

  double force_at(double width) const {
    return object_.stiffness * std::max(0.0, object_.diameter - width);
  }

 private:
  StepTruth truth_for(std::size_t step, double t_stop, double width, double a) const {
    StepTruth t;
    t.step = step;
    t.t_close_stop = t_stop;
    t.width = width;
    t.compression = std::max(0.0, object_.diameter - width);
    t.force = object_.stiffness * t.compression;
    t.c_true = t.force > 0.0 ? params_.settled_level(t.force) : 0.0;
    t.a_true = a;
    return t;
  }

  SimObject object_;
  SimSensorParams params_;
  Rng rng_;
  double width_;
  std::vector<bool> contact_;
  std::vector<double> response_;
  std::vector<Segment> segments_;
  std::vector<StepTruth> truth_;
  std::vector<ActuationMark> marks_;
  double rest_ohms_ = 0.0;
};

double median(std::vector<double> v) {
  if (v.empty()) return kMissing;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

std::string technique_name(const char* kind, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s@%gs", kind, t);
  return buf;
}

}  // namespace

void SimObject::validate(std::size_t pixel_count) const {
  if (!(diameter > 0.0)) throw std::invalid_argument("object diameter must be positive");
  if (!(stiffness > 0.0)) throw std::invalid_argument("object stiffness must be positive");
  if (!contact_mask.empty() && contact_mask.size() != pixel_count) {
    throw ShapeError("contact mask has " + std::to_string(contact_mask.size()) +
                     " entries for " + std::to_string(pixel_count) + " pixels");
  }
  if (!pixel_response.empty() && pixel_response.size() != pixel_count) {
    throw ShapeError("pixel response has " + std::to_string(pixel_response.size()) +
                     " entries for " + std::to_string(pixel_count) + " pixels");
  }
}

std::vector<bool> contact_mask_for(double diameter, const SensorLayout& layout,
                                   double pixel_pitch_mm) {
  std::vector<bool> mask;
  mask.reserve(layout.pixel_count());
  const double radius = diameter / 2.0;
  for (std::size_t f = 0; f < layout.finger_ids.size(); ++f) {
    for (int r = 0; r < layout.rows; ++r) {
      for (int c = 0; c < layout.cols; ++c) {
        const double y = (r - (layout.rows - 1) / 2.0) * pixel_pitch_mm;
        const double x = (c - (layout.cols - 1) / 2.0) * pixel_pitch_mm;
        mask.push_back(std::hypot(x, y) <= radius);
      }
    }
  }
  return mask;
}

SimSensorParams SimSensorParams::from_force_line(const LinearModel& line, SimSensorParams base) {
  if (line.slope == 0.0) throw std::invalid_argument("force line with zero slope cannot be inverted");
  base.settled_slope = 1.0 / line.slope;
  base.settled_intercept = -line.intercept / line.slope;
  return base;
}

SimSensorParams SimSensorParams::from_force_line(const LinearModel& line) {
  return from_force_line(line, SimSensorParams{});
}

double SimSensorParams::settled_level(double force) const {
  return std::clamp(settled_slope * force + settled_intercept, kMinLevel, 0.0);
}

void SimSensorParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be non-negative");
  if (!(actuation_time > 0.0)) throw std::invalid_argument("actuation time must be positive");
  if (!(base_resistance > 0.0)) throw std::invalid_argument("base resistance must be positive");
  if (layout.finger_ids.empty() || layout.rows <= 0 || layout.cols <= 0) {
    throw std::invalid_argument("sensor layout must have at least one pixel");
  }
  divider.validate();
}

SimResult simulate_grasp(const SimObject& object, std::span<const WidthCommand> schedule,
                         const SimSensorParams& params, std::uint64_t seed, double duration) {
  params.validate();
  object.validate(params.layout.pixel_count());
  if (schedule.empty()) throw EmptySchedule("width schedule is empty");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i].time > schedule[i - 1].time)) {
      throw std::invalid_argument("width schedule times must be strictly increasing");
    }
  }

  Engine engine(object, params, seed, schedule.front().width);
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    engine.command(schedule[i].time, schedule[i].width);
  }

  SimResult out;
  out.baseline = engine.nominal_baseline();
  out.marks = engine.marks();
  out.truth = engine.truth();
  out.truth.front().t_close_stop = schedule.front().time;

  const auto n = static_cast<std::size_t>(std::floor(duration * params.sample_rate + kTimeSlack)) + 1;
  std::vector<double> times;
  std::vector<std::vector<double>> exact(params.layout.pixel_count());
  times.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = engine.sample_time(k);
    const std::vector<double> rel = engine.sample(k);
    engine.append_frames(t, rel, out.frames);
    times.push_back(t);
    if (!params.quantize_10bit) {
      for (std::size_t p = 0; p < rel.size(); ++p) exact[p].push_back(rel[p]);
    }
  }
  if (params.quantize_10bit) {
    out.trace = build_trace(out.frames, out.baseline, params.divider, out.marks);
  } else {
    std::vector<ActuationMark> marks = out.marks;
    out.trace = make_trace(params.layout, std::move(times), std::move(exact), std::move(marks));
  }
  return out;
}

std::vector<CyclePoint> simulate_cycling(const SimSensorParams& params, std::size_t n_points,
                                         std::size_t stride, bool rebaseline_each_cycle,
                                         std::uint64_t seed) {
  params.validate();
  SimObject nothing;
  nothing.contact_mask.assign(params.layout.pixel_count(), false);
  Engine engine(nothing, params, seed, 1e9);
  PixelBaseline baseline = engine.nominal_baseline();
  const double dt = 1.0 / params.sample_rate;

  std::vector<CyclePoint> out;
  out.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const std::size_t cycle = i * stride;
    const double drift = 1.0 + params.drift_rate / 100.0 * static_cast<double>(cycle) / 1000.0;
    std::vector<SensorFrame> quiet;
    std::vector<SensorFrame> reading;
    engine.append_frames(0.0, engine.sample(0), quiet, drift);
    engine.append_frames(dt, engine.sample(1), reading, drift);
    if (rebaseline_each_cycle) baseline = rebaseline(baseline, quiet, params.divider);
    const ResistanceTrace trace = build_trace(reading, baseline, params.divider);
    out.push_back({cycle, trace.aggregate_rel.front()});
  }
  return out;
}

// ---- SimulatedGripper -----------------------------------------------------------

struct SimulatedGripper::Impl {
  Impl(SimObject object, SimSensorParams params, std::uint64_t seed, double initial_width,
       double max)
      : engine(object, params, seed, std::clamp(initial_width, 0.0, max)), max_width(max) {}

  Engine engine;
  double max_width;
  std::size_t next_sample = 0;
  double motion_start = 0.0;
  std::size_t mark_count = 0;  // marks belonging to earlier motions
  PixelBaseline baseline;
};

SimulatedGripper::SimulatedGripper(SimObject object, SimSensorParams params, std::uint64_t seed,
                                   double initial_width, double max_width) {
  params.validate();
  object.validate(params.layout.pixel_count());
  if (!(max_width > 0.0)) throw std::invalid_argument("maximum width must be positive");
  impl_ = std::make_unique<Impl>(std::move(object), std::move(params), seed, initial_width,
                                 max_width);
  std::vector<SensorFrame> quiet;
  for (std::size_t k = 0; k < kQuietFrames; ++k) {
    impl_->engine.append_frames(impl_->engine.sample_time(k), impl_->engine.sample(k), quiet);
  }
  impl_->baseline = capture_baseline(quiet, impl_->engine.params().divider, kQuietFrames);
  impl_->next_sample = kQuietFrames;
  impl_->motion_start = impl_->engine.sample_time(kQuietFrames);
}

SimulatedGripper::~SimulatedGripper() = default;
SimulatedGripper::SimulatedGripper(SimulatedGripper&&) noexcept = default;
SimulatedGripper& SimulatedGripper::operator=(SimulatedGripper&&) noexcept = default;

double SimulatedGripper::set_width(double mm) {
  Engine& e = impl_->engine;
  const double target = std::clamp(mm, 0.0, impl_->max_width);
  const double t = std::max(e.sample_time(impl_->next_sample), e.last_stop());
  impl_->mark_count = e.marks().size();
  e.command(t, target);
  impl_->motion_start = t;
  return target;
}

double SimulatedGripper::current_width() const { return impl_->engine.width(); }

ResistanceTrace SimulatedGripper::capture(double duration) {
  if (!(duration >= 0.0)) throw std::invalid_argument("capture duration must be non-negative");
  Engine& e = impl_->engine;
  const SimSensorParams& p = e.params();
  const double t_end = std::max(e.last_stop(), impl_->motion_start) + duration;
  auto k = static_cast<std::size_t>(std::ceil(impl_->motion_start * p.sample_rate - kTimeSlack));
  k = std::max(k, impl_->next_sample);
  const auto k_end = static_cast<std::size_t>(std::floor(t_end * p.sample_rate + kTimeSlack));

  std::vector<ActuationMark> marks(e.marks().begin() + static_cast<std::ptrdiff_t>(impl_->mark_count),
                                   e.marks().end());
  std::vector<SensorFrame> frames;
  std::vector<double> times;
  std::vector<std::vector<double>> exact(p.layout.pixel_count());
  for (; k <= k_end; ++k) {
    const double t = e.sample_time(k);
    const std::vector<double> rel = e.sample(k);
    if (p.quantize_10bit) {
      e.append_frames(t, rel, frames);
    } else {
      times.push_back(t);
      for (std::size_t q = 0; q < rel.size(); ++q) exact[q].push_back(rel[q]);
    }
  }
  impl_->next_sample = k_end + 1;
  impl_->motion_start = e.sample_time(impl_->next_sample);
  impl_->mark_count = e.marks().size();
  if (p.quantize_10bit) {
    if (frames.empty()) return make_trace(p.layout, {}, exact, std::move(marks));
    return build_trace(frames, impl_->baseline, p.divider, std::move(marks));
  }
  return make_trace(p.layout, std::move(times), std::move(exact), std::move(marks));
}

const PixelBaseline& SimulatedGripper::baseline() const { return impl_->baseline; }

const std::vector<StepTruth>& SimulatedGripper::truth() const { return impl_->engine.truth(); }

double SimulatedGripper::true_force() const {
  return impl_->engine.force_at(impl_->engine.width());
}

// ---- experiments -----------------------------------------------------------------

std::vector<CorpusMaterial> default_materials() {
  return {{"dragonskin30", pad_lines::dragonskin30(), 2.0},
          {"dragonskin20", pad_lines::dragonskin20(), 1.6},
          {"dragonskin10", pad_lines::dragonskin10(), 1.2},
          {"ecoflex10", pad_lines::ecoflex10(), 0.9}};
}

CorpusTrial simulate_corpus_trial(const CorpusSpec& corpus, std::size_t index,
                                  const SimSensorParams& params, std::uint64_t seed,
                                  double horizon) {
  if (corpus.materials.empty() || corpus.compressions.empty() || corpus.repeats == 0) {
    throw std::invalid_argument("corpus is empty");
  }
  if (index >= corpus.trial_count()) throw std::out_of_range("corpus trial index out of range");
  constexpr double kPadThickness = 40.0;  // mm
  constexpr double kCloseAt = 1.0;        // s

  const std::size_t per_material = corpus.compressions.size() * corpus.repeats;
  CorpusTrial trial;
  trial.index = index;
  trial.material = &corpus.materials[index / per_material];
  trial.compression = corpus.compressions[(index % per_material) / corpus.repeats];

  const SimSensorParams p = SimSensorParams::from_force_line(trial.material->force_line, params);
  SimObject pad;
  pad.diameter = kPadThickness;
  pad.stiffness = trial.material->stiffness;
  const WidthCommand schedule[] = {{0.0, kPadThickness + 5.0},
                                   {kCloseAt, kPadThickness - trial.compression}};
  trial.t_stop = kCloseAt + p.actuation_time;
  trial.result = simulate_grasp(pad, schedule, p, split_seed(seed, index), trial.t_stop + horizon);
  return trial;
}

std::vector<SweepRow> run_cutoff_sweep(const CorpusSpec& corpus, std::span<const double> cutoffs,
                                       const SimSensorParams& params, std::uint64_t seed) {
  if (cutoffs.empty()) throw std::invalid_argument("no cutoffs given");
  const double horizon = *std::max_element(cutoffs.begin(), cutoffs.end()) + 0.1;
  std::vector<std::vector<double>> exp_err(cutoffs.size());
  std::vector<std::vector<double>> raw_err(cutoffs.size());
  std::vector<std::size_t> excluded(cutoffs.size(), 0);

  for (std::size_t i = 0; i < corpus.trial_count(); ++i) {
    const CorpusTrial trial = simulate_corpus_trial(corpus, i, params, seed, horizon);
    const ResistanceTrace& trace = trial.result.trace;
    const double c_true = trial.result.truth.back().c_true;
    for (std::size_t j = 0; j < cutoffs.size(); ++j) {
      try {
        const FitWindow w = make_window(trace, trial.t_stop, corpus.t_a, cutoffs[j]);
        const DecayFit fit = fit_decay(trace, w);
        const double raw = reading_at(trace, trial.t_stop + cutoffs[j]);
        exp_err[j].push_back(settled_error(fit.c_star, c_true));
        raw_err[j].push_back(settled_error(raw, c_true));
      } catch (const NumericalError&) {
        ++excluded[j];
      }
    }
  }

  std::vector<SweepRow> rows;
  for (std::size_t j = 0; j < cutoffs.size(); ++j) {
    SweepRow r;
    r.cutoff = cutoffs[j];
    r.exp_error = median(exp_err[j]);
    r.raw_error = median(raw_err[j]);
    r.reduction = r.raw_error > 0.0 ? 100.0 * (1.0 - r.exp_error / r.raw_error) : kMissing;
    r.n_trials = exp_err[j].size();
    r.n_excluded = excluded[j];
    rows.push_back(r);
  }
  return rows;
}

std::vector<BenchRow> run_force_benchmark(const CorpusSpec& corpus, const SimSensorParams& params,
                                          std::uint64_t seed, std::span<const double> raw_times,
                                          double fit_cutoff) {
  double horizon = fit_cutoff;
  for (double t : raw_times) horizon = std::max(horizon, t);
  horizon += 0.1;

  const std::size_t n_tech = raw_times.size() + 1;
  std::vector<std::vector<double>> abs_err(n_tech);
  std::vector<std::vector<double>> pct_err(n_tech);
  std::vector<std::size_t> excluded(n_tech, 0);

  for (std::size_t i = 0; i < corpus.trial_count(); ++i) {
    const CorpusTrial trial = simulate_corpus_trial(corpus, i, params, seed, horizon);
    const ResistanceTrace& trace = trial.result.trace;
    const double f_true = trial.result.truth.back().force;
    const LinearModel& line = trial.material->force_line;
    auto add = [&](std::size_t tech, double c) {
      const double err = std::abs(estimate_force(c, line).value - f_true);
      abs_err[tech].push_back(err);
      pct_err[tech].push_back(100.0 * err / f_true);
    };
    for (std::size_t j = 0; j < raw_times.size(); ++j) {
      try {
        add(j, reading_at(trace, trial.t_stop + raw_times[j]));
      } catch (const NumericalError&) {
        ++excluded[j];
      }
    }
    try {
      const FitWindow w = make_window(trace, trial.t_stop, corpus.t_a, fit_cutoff);
      add(raw_times.size(), fit_decay(trace, w).c_star);
    } catch (const NumericalError&) {
      ++excluded[raw_times.size()];
    }
  }

  std::vector<BenchRow> rows;
  for (std::size_t j = 0; j < n_tech; ++j) {
    BenchRow r;
    r.technique = j < raw_times.size() ? technique_name("raw", raw_times[j])
                                       : technique_name("exponential", fit_cutoff);
    const auto& e = abs_err[j];
    r.n_trials = e.size();
    r.n_excluded = excluded[j];
    if (!e.empty()) {
      double sum = 0.0;
      double pct = 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) {
        sum += e[k];
        pct += pct_err[j][k];
      }
      r.mean_error = sum / static_cast<double>(e.size());
      r.percent_error = pct / static_cast<double>(e.size());
      double ss = 0.0;
      for (double v : e) ss += (v - r.mean_error) * (v - r.mean_error);
      r.sd_error = e.size() > 1 ? std::sqrt(ss / static_cast<double>(e.size() - 1)) : 0.0;
    } else {
      r.mean_error = r.sd_error = r.percent_error = kMissing;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<BenchRow> run_force_benchmark(const CorpusSpec& corpus, const SimSensorParams& params,
                                          std::uint64_t seed) {
  static constexpr double kRawTimes[] = {2.5, 10.0, 20.0};
  return run_force_benchmark(corpus, params, seed, kRawTimes, kDefaultCutoff);
}

// ---- truth sidecar -----------------------------------------------------------------

namespace {
constexpr std::string_view kTruthColumns[] = {"step",          "t_close_stop_s", "width_mm",
                                              "compression_mm", "force_N",       "c_true_pct",
                                              "a_true_pct"};
}

void write_truth(std::ostream& out, std::span<const StepTruth> truth) {
  for (std::size_t i = 0; i < std::size(kTruthColumns); ++i) {
    out << (i ? "," : "") << kTruthColumns[i];
  }
  out << '\n';
  for (const auto& t : truth) {
    out << t.step << ',' << format_number(t.t_close_stop) << ',' << format_number(t.width) << ','
        << format_number(t.compression) << ',' << format_number(t.force) << ','
        << format_number(t.c_true) << ',' << format_number(t.a_true) << '\n';
  }
}

std::vector<StepTruth> parse_truth(std::string_view text) {
  const CsvTable table = parse_csv(text);
  if (table.rows.empty()) throw FormatError(1, "empty truth file");
  expect_header(table.rows.front(), kTruthColumns);
  std::vector<StepTruth> out;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const CsvRow& row = table.rows[i];
    if (row.cells.size() != std::size(kTruthColumns)) {
      throw FormatError(row.line, "expected " + std::to_string(std::size(kTruthColumns)) +
                                      " columns");
    }
    const long long step = csv_integer(row, 0);
    if (step < 0) throw FormatError(row.line, "negative step");
    out.push_back({static_cast<std::size_t>(step), csv_number(row, 1), csv_number(row, 2),
                   csv_number(row, 3), csv_number(row, 4), csv_number(row, 5),
                   csv_number(row, 6)});
  }
  return out;
}

}  // namespace tactile
