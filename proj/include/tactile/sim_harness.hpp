#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/calibration.hpp"
#include "tactile/core_model.hpp"
#include "tactile/grasp_control.hpp"

namespace tactile {

/// Linear-spring test object centred between the fingers.
struct SimObject {
  double diameter = 35.0;  // mm
  double stiffness = 2.0;  // N/mm
  /// Pixels touching the object, in trace order; empty means all of them.
  std::vector<bool> contact_mask;
  /// Per-pixel response scale (1 = nominal, < 1 = softer spot); empty means 1.
  std::vector<double> pixel_response;

  void validate(std::size_t pixel_count) const;
};

/// Pixels of each finger whose centres lie within the object's radius of the
/// grid centre, for a square grid with the given pitch.
std::vector<bool> contact_mask_for(double diameter, const SensorLayout& layout,
                                   double pixel_pitch_mm = 10.0);

/// Sensor response model.
///
/// A contacting pixel settles at C = clamp(settled_slope * F + settled_intercept)
/// with the clamp keeping C in [-95, 0] (no response below the line's zero
/// crossing, and resistance cannot reach zero).  Each closing motion ramps
/// the level linearly to C + A over `actuation_time`, A = spike_gain * F,
/// after which it decays as C + A * exp(-lambda * (t - t_stop)).  Gaussian
/// noise of `noise_sigma` percent is added per pixel and sample.
struct SimSensorParams {
  double lambda = 0.179;                       // 1/s
  double spike_gain = 10.0;                    // percent per N
  double settled_slope = -1.0 / 0.129;         // percent per N
  double settled_intercept = 1.42 / 0.129;     // percent
  double noise_sigma = 0.5;                    // percent, per pixel
  bool quantize_10bit = true;
  double sample_rate = 15.0;                   // Hz
  double drift_rate = 0.0;                     // percent of baseline per 1000 cycles
  double actuation_time = 0.1;                 // s, duration of every width motion
  SensorLayout layout{{0, 1}, 2, 2};
  double base_resistance = 4700.0;             // ohms, every pixel at rest
  DividerConfig divider;

  /// Settled response that inverts a force line F = m * C + b.
  static SimSensorParams from_force_line(const LinearModel& line, SimSensorParams base);
  static SimSensorParams from_force_line(const LinearModel& line);

  double settled_level(double force) const;
  void validate() const;
  bool operator==(const SimSensorParams&) const = default;
};

/// Width command: start moving to `width` at `time`.
struct WidthCommand {
  double time = 0.0;   // s
  double width = 0.0;  // mm
  bool operator==(const WidthCommand&) const = default;
};

/// Ground truth for one width command.
struct StepTruth {
  std::size_t step = 0;
  double t_close_stop = 0.0;  // end of the motion
  double width = 0.0;
  double compression = 0.0;   // mm
  double force = 0.0;         // N
  double c_true = 0.0;        // percent, settled level of a nominal contacting pixel
  double a_true = 0.0;        // percent, spike amplitude
};

struct SimResult {
  std::vector<SensorFrame> frames;
  std::vector<ActuationMark> marks;
  std::vector<StepTruth> truth;
  /// Relative-resistance trace: built from the frames against `baseline`
  /// when quantizing, otherwise the exact simulated values.
  ResistanceTrace trace;
  /// Resting resistance as seen through the ADC.
  PixelBaseline baseline;
};

/// Simulates a capture of `duration` seconds sampled at k / sample_rate.
///
/// The gripper rests at the first command's width from t = 0; every later
/// command starts a motion at its time, which must leave the previous motion
/// finished.  Empty schedules throw EmptySchedule.
SimResult simulate_grasp(const SimObject& object, std::span<const WidthCommand> schedule,
                         const SimSensorParams& params, std::uint64_t seed, double duration);

struct CyclePoint {
  std::size_t cycle = 0;
  double start_aggregate = 0.0;  // percent, pressure-free reading at cycle start
};

/// Pressure-free readings at the start of grasp cycles 0, stride, 2*stride, ...
/// while the resting resistance drifts by drift_rate percent per 1000 cycles.
/// With `rebaseline` each cycle first re-captures the baseline from one
/// quiet sample.
std::vector<CyclePoint> simulate_cycling(const SimSensorParams& params, std::size_t n_points,
                                         std::size_t stride, bool rebaseline, std::uint64_t seed);

/// GripperPort backed by the simulator.  The baseline is captured from
/// kQuietFrames pressure-free samples when the gripper is built.
class SimulatedGripper : public GripperPort {
 public:
  SimulatedGripper(SimObject object, SimSensorParams params, std::uint64_t seed,
                   double initial_width = 60.0, double max_width = 100.0);
  ~SimulatedGripper() override;
  SimulatedGripper(SimulatedGripper&&) noexcept;
  SimulatedGripper& operator=(SimulatedGripper&&) noexcept;

  double set_width(double mm) override;
  double current_width() const override;
  ResistanceTrace capture(double duration) override;

  const PixelBaseline& baseline() const;
  const std::vector<StepTruth>& truth() const;
  /// True force at the current width.
  double true_force() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---- experiments -------------------------------------------------------------

struct CorpusMaterial {
  std::string name;
  LinearModel force_line;  // the material's force model; the sensor inverts it
  double stiffness = 1.0;  // N/mm of the pad
};

/// The four silicone pads with their force lines and nominal pad stiffness.
std::vector<CorpusMaterial> default_materials();

struct CorpusSpec {
  std::vector<CorpusMaterial> materials = default_materials();
  std::vector<double> compressions{3.0, 4.0, 5.0, 6.0, 7.0};  // mm
  std::size_t repeats = 10;
  double t_a = kDefaultGuard;

  std::size_t trial_count() const { return materials.size() * compressions.size() * repeats; }
};

/// One simulated corpus grasp: closing at t = 1 s onto a pad, captured until
/// `horizon` seconds after the motion stopped.
struct CorpusTrial {
  std::size_t index = 0;
  const CorpusMaterial* material = nullptr;
  double compression = 0.0;
  SimResult result;
  double t_stop = 0.0;
};

/// Trial `index` of the corpus, seeded by split_seed(seed, index).
CorpusTrial simulate_corpus_trial(const CorpusSpec& corpus, std::size_t index,
                                  const SimSensorParams& params, std::uint64_t seed,
                                  double horizon);

struct SweepRow {
  double cutoff = 0.0;
  double exp_error = 0.0;   // median |C* - C_true|, percent
  double raw_error = 0.0;   // median |raw(t_c) - C_true|, percent
  double reduction = 0.0;   // percent, 100 * (1 - exp / raw)
  std::size_t n_trials = 0;
  std::size_t n_excluded = 0;  // fits that failed
};

std::vector<SweepRow> run_cutoff_sweep(const CorpusSpec& corpus, std::span<const double> cutoffs,
                                       const SimSensorParams& params, std::uint64_t seed);

struct BenchRow {
  std::string technique;  // "raw@2.5s", ..., "exponential@2.5s"
  double mean_error = 0.0;     // N
  double sd_error = 0.0;       // N
  double percent_error = 0.0;  // mean of |error| / F_true, percent
  std::size_t n_trials = 0;
  std::size_t n_excluded = 0;
};

/// Force errors of the raw readings at each of `raw_times` and of the decay
/// fit with cutoff `fit_cutoff`, every estimate mapped through the trial
/// material's force line.
std::vector<BenchRow> run_force_benchmark(const CorpusSpec& corpus, const SimSensorParams& params,
                                          std::uint64_t seed, std::span<const double> raw_times,
                                          double fit_cutoff = kDefaultCutoff);

std::vector<BenchRow> run_force_benchmark(const CorpusSpec& corpus, const SimSensorParams& params,
                                          std::uint64_t seed);

// ---- scenario and truth files ----------------------------------------------

struct Scenario {
  SimObject object;
  SimSensorParams params;
  std::vector<WidthCommand> schedule;
  std::uint64_t seed = 1;
  double duration = 10.0;
};

/// Parses a scenario document; see docs/formats.md.  Throws FormatError.
Scenario parse_scenario(std::string_view text);
std::string format_scenario(const Scenario& s);

void write_truth(std::ostream& out, std::span<const StepTruth> truth);
std::vector<StepTruth> parse_truth(std::string_view text);

}  // namespace tactile
