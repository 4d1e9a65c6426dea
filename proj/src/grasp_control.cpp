#include "tactile/grasp_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "tactile/text_util.hpp"

namespace tactile {

namespace {

constexpr double kWidthSlack = 1e-9;  // mm
constexpr double kTimeSlack = 1e-9;   // s
/// Captures run slightly past the cutoff so that the last sample of the fit
/// window is always present.
constexpr double kCaptureMargin = 0.1;  // s

double raw_pixel_at(const ResistanceTrace& trace, std::size_t pixel, double t) {
  const auto& series = trace.per_pixel_rel[pixel];
  for (std::size_t k = trace.sample_count(); k-- > 0;) {
    if (trace.times[k] <= t + kTimeSlack && !is_missing(series[k])) return series[k];
  }
  return kMissing;
}

bool usable(const DecayFit& fit, const ContactConfig& cfg) {
  return fit.degenerate || !(cfg.reject_boundary_fits && fit.lambda_at_bound);
}

double aggregate_estimate(const ResistanceTrace& trace, const ContactConfig& cfg,
                          const FitWindow& window) {
  if (cfg.settle_policy == SettlePolicy::raw_at_tc) return reading_at(trace, window.end());
  const DecayFit fit = fit_decay(trace, window);
  if (!usable(fit, cfg)) {
    throw NoDecision("decay rate " + format_number(fit.lambda_star) + " is on the search bound");
  }
  return fit.c_star;
}

double any_pixel_estimate(const ResistanceTrace& trace, const ContactConfig& cfg,
                          const FitWindow& window) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < trace.pixel_count(); ++p) {
    double v = kMissing;
    if (cfg.settle_policy == SettlePolicy::raw_at_tc) {
      v = raw_pixel_at(trace, p, window.end());
    } else {
      try {
        const DecayFit fit = fit_decay_pixel(trace, p, window);
        if (usable(fit, cfg)) v = fit.c_star;
      } catch (const NumericalError&) {
        // pixel without enough valid samples
      }
    }
    if (!is_missing(v)) best = std::min(best, v);
  }
  if (std::isinf(best)) throw NoDecision("no pixel produced a settled estimate");
  return best;
}

struct Reading {
  double width = 0.0;
  double c_star = kMissing;
};

struct ContactSearch {
  Reading contact;
  std::optional<Reading> previous;  // last decided reading before contact
  std::size_t steps = 0;
};

/// Settled estimate of the capture following the last width command, or
/// missing when it cannot be decided.
double measure(GripperPort& gripper, const ContactConfig& cfg) {
  const ResistanceTrace trace = gripper.capture(cfg.t_c + kCaptureMargin);
  const auto stop = trace.first_mark(MarkKind::close_stop);
  if (!stop) return kMissing;
  try {
    return settled_estimate(trace, cfg, *stop);
  } catch (const NumericalError&) {
    return kMissing;
  }
}

void record(std::vector<ControlEvent>* log, std::size_t step, double width, double c_star,
            double force, std::string decision) {
  if (log) log->push_back({step, width, c_star, force, std::move(decision)});
}

ContactSearch find_contact(GripperPort& gripper, const SizeEstimationConfig& cfg,
                           std::vector<ControlEvent>* log) {
  gripper.set_width(cfg.w_start);
  ContactSearch search;
  while (true) {
    const double next = cfg.w_start - static_cast<double>(search.steps + 1) * cfg.delta_w;
    if (next < cfg.w_min - kWidthSlack) {
      record(log, search.steps, gripper.current_width(), kMissing, kMissing, "no_object");
      throw NoObjectError("no contact before reaching the minimum width " +
                          format_number(cfg.w_min) + " mm");
    }
    ++search.steps;
    const double achieved = gripper.set_width(next);
    const double c = measure(gripper, cfg.contact);
    if (is_missing(c)) {
      record(log, search.steps, achieved, c, kMissing, "no_decision");
      continue;
    }
    if (c <= cfg.contact.epsilon) {
      record(log, search.steps, achieved, c, kMissing, "contact");
      search.contact = {achieved, c};
      return search;
    }
    record(log, search.steps, achieved, c, kMissing, "no_contact");
    search.previous = Reading{achieved, c};
  }
}

}  // namespace

std::string_view to_string(ContactScope scope) {
  return scope == ContactScope::aggregate ? "aggregate" : "any_pixel";
}

std::string_view to_string(SettlePolicy policy) {
  return policy == SettlePolicy::decay_fit ? "decay_fit" : "raw_at_tc";
}

ContactScope parse_contact_scope(std::string_view name) {
  if (name == "aggregate") return ContactScope::aggregate;
  if (name == "any_pixel") return ContactScope::any_pixel;
  throw std::invalid_argument("unknown contact scope '" + std::string(name) + "'");
}

SettlePolicy parse_settle_policy(std::string_view name) {
  if (name == "decay_fit") return SettlePolicy::decay_fit;
  if (name == "raw_at_tc") return SettlePolicy::raw_at_tc;
  throw std::invalid_argument("unknown settle policy '" + std::string(name) + "'");
}

void ContactConfig::validate() const {
  if (!(epsilon < 0.0)) throw std::invalid_argument("epsilon must be negative");
  if (!(t_a >= 0.0) || !(t_c > t_a)) throw std::invalid_argument("need 0 <= t_a < t_c");
}

void SizeEstimationConfig::validate() const {
  contact.validate();
  if (!(w_min >= 0.0) || !(w_start > w_min)) {
    throw std::invalid_argument("need w_start > w_min >= 0");
  }
  if (!(delta_w > 0.0)) throw std::invalid_argument("delta_w must be positive");
  if (!(secure_extra >= 0.0)) throw std::invalid_argument("secure_extra must be non-negative");
}

double settled_estimate(const ResistanceTrace& trace, const ContactConfig& cfg,
                        const FitWindow& window) {
  try {
    return cfg.scope == ContactScope::aggregate ? aggregate_estimate(trace, cfg, window)
                                                : any_pixel_estimate(trace, cfg, window);
  } catch (const NoDecision&) {
    throw;
  } catch (const NumericalError& e) {
    throw NoDecision(e.what());
  } catch (const NoValidPixel& e) {
    throw NoDecision(e.what());
  }
}

double settled_estimate(const ResistanceTrace& trace, const ContactConfig& cfg, double t_actuation) {
  FitWindow window;
  try {
    window = make_window(trace, t_actuation, cfg.t_a, cfg.t_c);
  } catch (const NumericalError& e) {
    throw NoDecision(e.what());
  }
  return settled_estimate(trace, cfg, window);
}

bool detect_contact(const ResistanceTrace& trace, const ContactConfig& cfg, const FitWindow& window) {
  return settled_estimate(trace, cfg, window) <= cfg.epsilon;
}

bool detect_contact(const ResistanceTrace& trace, const ContactConfig& cfg, double t_actuation) {
  return settled_estimate(trace, cfg, t_actuation) <= cfg.epsilon;
}

void write_event_log(std::ostream& out, std::span<const ControlEvent> events) {
  out << "step,width_mm,c_star_pct,force_N,decision\n";
  for (const auto& e : events) {
    out << e.step << ',' << format_number(e.width_mm) << ',' << format_number(e.c_star_pct) << ','
        << format_number(e.force_n) << ',' << e.decision << '\n';
  }
}

std::vector<ControlEvent> read_event_log(std::string_view text) {
  static constexpr std::string_view kColumns[] = {"step", "width_mm", "c_star_pct", "force_N",
                                                  "decision"};
  const CsvTable table = parse_csv(text);
  if (table.rows.empty()) throw FormatError(1, "empty event log");
  expect_header(table.rows.front(), kColumns);
  std::vector<ControlEvent> events;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const CsvRow& row = table.rows[i];
    if (row.cells.size() != 5) throw FormatError(row.line, "expected 5 columns");
    const long long step = csv_integer(row, 0);
    if (step < 0 || row.cells[4].empty()) throw FormatError(row.line, "malformed event");
    events.push_back({static_cast<std::size_t>(step), csv_number(row, 1), csv_number(row, 2),
                      csv_number(row, 3), row.cells[4]});
  }
  return events;
}

SizeEstimate estimate_size(GripperPort& gripper, const SizeEstimationConfig& cfg,
                           std::vector<ControlEvent>* log) {
  cfg.validate();
  const ContactSearch search = find_contact(gripper, cfg, log);
  SizeEstimate out;
  out.contact_width = search.contact.width;
  out.size_mm = search.contact.width + cfg.delta_w;
  out.c_star = search.contact.c_star;
  out.steps = search.steps;
  out.final_width = out.contact_width;
  if (cfg.secure_extra > 0.0) {
    out.final_width = gripper.set_width(std::max(cfg.w_min, out.contact_width - cfg.secure_extra));
    record(log, search.steps + 1, out.final_width, kMissing, kMissing, "secure");
  }
  return out;
}

ForceGraspResult grasp_to_force(GripperPort& gripper, double target, double band,
                                const LinearModel& model, const SizeEstimationConfig& cfg,
                                std::vector<ControlEvent>* log) {
  cfg.validate();
  if (!(target > 0.0)) throw std::invalid_argument("target force must be positive");
  if (!(band >= 0.0)) throw std::invalid_argument("band must be non-negative");
  estimate_force(0.0, model);  // unit check before moving

  const auto budget =
      static_cast<std::size_t>(std::ceil((cfg.w_start - cfg.w_min) / cfg.delta_w - 1e-9));
  const double upper = target + band;
  const double lower = target - band;
  auto force_of = [&](double c) { return estimate_force(c, model).value; };

  ContactSearch search = find_contact(gripper, cfg, log);
  std::size_t steps = search.steps;
  double width = search.contact.width;
  double c_star = search.contact.c_star;
  double force = force_of(c_star);
  std::optional<std::pair<double, double>> previous;  // (width, force)
  if (search.previous) previous = {{search.previous->width, force_of(search.previous->c_star)}};

  auto fail_overshoot = [&](bool projected) {
    record(log, steps, width, c_star, force, projected ? "overshoot_projected" : "overshoot");
    throw OvershootError("estimated force " + format_number(force) + " N" +
                             (projected ? " would exceed " : " exceeds ") + format_number(upper) +
                             " N",
                         force, width, projected);
  };
  auto fail_unreachable = [&](const std::string& why) {
    record(log, steps, width, c_star, force, "unreachable");
    throw ForceUnreachable(why + "; last estimate " + format_number(force) + " N", force);
  };

  while (true) {
    if (force > upper) fail_overshoot(false);
    if (force >= lower) {
      record(log, steps, width, c_star, force, "in_band");
      return {width, force, c_star, steps};
    }

    double step = cfg.delta_w;
    if (previous && force > previous->second && previous->first > width) {
      const double rate = (force - previous->second) / (previous->first - width);  // N per mm
      if (force + rate * cfg.delta_w > upper) {
        step = std::min(cfg.delta_w, (target - force) / rate);
        if (step < cfg.delta_w / 20.0) fail_overshoot(true);
      }
    }
    const double next = width - step;
    if (next < cfg.w_min - kWidthSlack) fail_unreachable("minimum width reached");
    if (steps >= budget) fail_unreachable("step budget exhausted");

    record(log, steps, width, c_star, force, "close");
    ++steps;
    const double achieved = gripper.set_width(next);
    const double c = measure(gripper, cfg.contact);
    if (is_missing(c)) {
      record(log, steps, achieved, c, kMissing, "no_decision");
      previous.reset();
      width = achieved;
      continue;
    }
    previous = {{width, force}};
    width = achieved;
    c_star = c;
    force = force_of(c);
  }
}

std::string_view to_string(Presence p) { return p == Presence::present ? "present" : "absent"; }

PresenceMonitor::PresenceMonitor(ContactConfig cfg, Presence initial)
    : cfg_(std::move(cfg)), state_(initial) {
  cfg_.validate();
}

PresenceState PresenceMonitor::push(const ResistanceTrace& window) {
  PresenceState out;
  if (window.sample_count() > 0) {
    out.t_start = window.times.front();
    out.t_end = window.times.back();
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < window.sample_count(); ++k) {
    double v = kMissing;
    if (cfg_.scope == ContactScope::aggregate) {
      v = window.aggregate_rel[k];
    } else {
      for (const auto& series : window.per_pixel_rel) {
        if (!is_missing(series[k]) && (is_missing(v) || series[k] < v)) v = series[k];
      }
    }
    if (!is_missing(v)) {
      sum += v;
      ++n;
    }
  }
  const Presence before = state_;
  if (n > 0) {
    out.decided = true;
    out.level = sum / static_cast<double>(n);
    state_ = out.level <= cfg_.epsilon ? Presence::present : Presence::absent;
  }
  out.state = state_;
  out.removed_event = before == Presence::present && state_ == Presence::absent;
  return out;
}

std::vector<PresenceState> monitor_presence(std::span<const ResistanceTrace> windows,
                                            const ContactConfig& cfg) {
  PresenceMonitor monitor(cfg);
  std::vector<PresenceState> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(monitor.push(w));
  return out;
}

std::vector<ResistanceTrace> segment_trace(const ResistanceTrace& trace, double window_s) {
  if (!(window_s > 0.0)) throw std::invalid_argument("window length must be positive");
  std::vector<ResistanceTrace> out;
  if (trace.sample_count() == 0) return out;
  const double t0 = trace.times.front();
  const auto n_windows =
      static_cast<std::size_t>(std::floor((trace.times.back() - t0) / window_s + kTimeSlack)) + 1;
  out.resize(n_windows);
  for (auto& w : out) {
    w.layout = trace.layout;
    w.per_pixel_rel.resize(trace.pixel_count());
  }
  auto index_of = [&](double t) {
    const auto i = static_cast<std::size_t>(std::floor((t - t0) / window_s + kTimeSlack));
    return std::min(i, n_windows - 1);
  };
  for (std::size_t k = 0; k < trace.sample_count(); ++k) {
    ResistanceTrace& w = out[index_of(trace.times[k])];
    w.times.push_back(trace.times[k]);
    w.aggregate_rel.push_back(trace.aggregate_rel[k]);
    for (std::size_t p = 0; p < trace.pixel_count(); ++p) {
      w.per_pixel_rel[p].push_back(trace.per_pixel_rel[p][k]);
    }
  }
  for (const auto& m : trace.marks) {
    if (m.time >= t0 - kTimeSlack) out[index_of(std::max(m.time, t0))].marks.push_back(m);
  }
  return out;
}

}  // namespace tactile
