#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/calibration.hpp"
#include "tactile/core_model.hpp"
#include "tactile/transient_fit.hpp"

namespace tactile {

enum class ContactScope { aggregate, any_pixel };
enum class SettlePolicy { raw_at_tc, decay_fit };

std::string_view to_string(ContactScope scope);
std::string_view to_string(SettlePolicy policy);
ContactScope parse_contact_scope(std::string_view name);
SettlePolicy parse_settle_policy(std::string_view name);

struct ContactConfig {
  double epsilon = -10.0;  // percent; contact when the settled estimate is <= epsilon
  ContactScope scope = ContactScope::aggregate;
  SettlePolicy settle_policy = SettlePolicy::decay_fit;
  double t_a = kDefaultGuard;
  double t_c = kDefaultCutoff;
  /// Treat fits whose decay rate lands on an end of the search range as
  /// undecidable.  On a window without a transient the constant is poorly
  /// determined and such fits are where false contacts come from.
  bool reject_boundary_fits = true;

  /// Throws std::invalid_argument unless epsilon < 0 and 0 <= t_a < t_c.
  void validate() const;
};

/// Settled estimate of a capture whose motion stopped at `t_actuation`.
/// Scope any_pixel returns the most negative per-pixel estimate.  Throws
/// NoDecision when no estimate can be formed.
double settled_estimate(const ResistanceTrace& trace, const ContactConfig& cfg, double t_actuation);

/// Same, with an explicit window (its t_a and t_c override cfg's).
double settled_estimate(const ResistanceTrace& trace, const ContactConfig& cfg,
                        const FitWindow& window);

/// True iff the settled estimate is <= epsilon.  Throws NoDecision.
bool detect_contact(const ResistanceTrace& trace, const ContactConfig& cfg, const FitWindow& window);
bool detect_contact(const ResistanceTrace& trace, const ContactConfig& cfg, double t_actuation);

/// Width-controlled gripper.
///
/// capture(duration) returns the samples from the start of the most recent
/// width command until `duration` seconds after that motion stopped, with
/// close_start/close_stop (or open_*) marks for the motion.  Relative
/// resistance is against the gripper's own pressure-free baseline.
class GripperPort {
 public:
  virtual ~GripperPort() = default;
  /// Moves to `mm`, clamped to the mechanical range; returns the achieved width.
  virtual double set_width(double mm) = 0;
  virtual double current_width() const = 0;
  virtual ResistanceTrace capture(double duration) = 0;
};

struct SizeEstimationConfig {
  double w_start = 50.0;  // mm
  double w_min = 5.0;     // mm
  double delta_w = 1.0;   // mm
  ContactConfig contact;
  /// Extra closure after the size is found.  2 mm is an arbitrary default.
  double secure_extra = 2.0;

  void validate() const;
};

/// One line of a control-session log.
struct ControlEvent {
  std::size_t step = 0;
  double width_mm = 0.0;
  double c_star_pct = kMissing;  // missing when no decision could be made
  double force_n = kMissing;     // missing when no force model is in use
  std::string decision;
};

/// CSV with header `step,width_mm,c_star_pct,force_N,decision`.
void write_event_log(std::ostream& out, std::span<const ControlEvent> events);
std::vector<ControlEvent> read_event_log(std::string_view text);

struct SizeEstimate {
  double size_mm = 0.0;        // contact width + delta_w
  double contact_width = 0.0;  // width at which contact was first seen
  double c_star = 0.0;         // settled estimate at contact
  double final_width = 0.0;    // after the securing closure
  std::size_t steps = 0;       // closing steps taken before contact
};

/// Opens to w_start, then closes by delta_w at a time, capturing for t_c
/// after each step and testing for contact.  The first contact at width w
/// gives w + delta_w.  Undecidable steps count as no contact.  Throws
/// NoObjectError when the next step would pass w_min.
SizeEstimate estimate_size(GripperPort& gripper, const SizeEstimationConfig& cfg,
                           std::vector<ControlEvent>* log = nullptr);

struct ForceGraspResult {
  double final_width = 0.0;
  double force_n = 0.0;
  double c_star = 0.0;
  std::size_t steps = 0;  // every width command issued after opening
};

/// Closes until contact, then keeps closing until the estimated force lies in
/// [target - band, target + band].
///
/// Step sizes come from the local secant of estimated force against width:
/// when a full delta_w step is projected to land above the band the loop
/// takes the partial step aimed at the target instead.  A projected step
/// smaller than a twentieth of delta_w is refused with OvershootError
/// (projected = true); a measured force above the band raises OvershootError
/// (projected = false).  Passing w_min or exhausting the step budget
/// ceil((w_start - w_min) / delta_w) raises ForceUnreachable.
ForceGraspResult grasp_to_force(GripperPort& gripper, double target, double band,
                                const LinearModel& model, const SizeEstimationConfig& cfg,
                                std::vector<ControlEvent>* log = nullptr);

enum class Presence { absent, present };
std::string_view to_string(Presence p);

struct PresenceState {
  double t_start = 0.0;
  double t_end = 0.0;
  double level = kMissing;  // window level, missing for an undecided window
  Presence state = Presence::absent;
  bool decided = false;
  bool removed_event = false;  // present -> absent on this window
};

/// Streaming presence monitor.  A window's level is the mean aggregate (or
/// the mean of the most negative pixel for any_pixel scope) over its valid
/// samples; the object is present when the level is <= epsilon.  Windows
/// without valid samples keep the previous state.
class PresenceMonitor {
 public:
  explicit PresenceMonitor(ContactConfig cfg, Presence initial = Presence::absent);
  PresenceState push(const ResistanceTrace& window);
  Presence state() const { return state_; }

 private:
  ContactConfig cfg_;
  Presence state_;
};

std::vector<PresenceState> monitor_presence(std::span<const ResistanceTrace> windows,
                                            const ContactConfig& cfg);

/// Cuts a continuous capture into consecutive windows of `window_s` seconds
/// measured from the first sample.  Marks travel with their window.
std::vector<ResistanceTrace> segment_trace(const ResistanceTrace& trace, double window_s = 1.0);

}  // namespace tactile
