#include <set>
#include <sstream>
#include <string>

#include "tactile/sim_harness.hpp"
#include "tactile/text_util.hpp"

namespace tactile {

namespace {

class ScenarioReader {
 public:
  explicit ScenarioReader(const KvDocument& doc) : doc_(doc) {}

  const KvEntry* get(const std::string& section, const std::string& key) {
    const KvEntry* e = doc_.find(section, key);
    if (e) used_.insert(e);
    return e;
  }

  void number(const std::string& section, const std::string& key, double& out) {
    if (const KvEntry* e = get(section, key)) {
      const auto v = parse_number(e->value);
      if (!v) throw FormatError(e->line, section + "." + key + ": not a number");
      out = *v;
    }
  }

  void integer(const std::string& section, const std::string& key, long long& out) {
    if (const KvEntry* e = get(section, key)) {
      const auto v = parse_integer(e->value);
      if (!v) throw FormatError(e->line, section + "." + key + ": not an integer");
      out = *v;
    }
  }

  void boolean(const std::string& section, const std::string& key, bool& out) {
    if (const KvEntry* e = get(section, key)) {
      if (e->value == "true") {
        out = true;
      } else if (e->value == "false") {
        out = false;
      } else {
        throw FormatError(e->line, section + "." + key + ": expected true or false");
      }
    }
  }

  std::vector<double> numbers(const KvEntry& e) {
    std::vector<double> out;
    for (const auto& item : split(e.value, ',')) {
      const auto v = parse_number(item);
      if (!v) throw FormatError(e.line, e.section + "." + e.key + ": bad list item '" + item + "'");
      out.push_back(*v);
    }
    return out;
  }

  void reject_unused() const {
    for (const auto& e : doc_.entries()) {
      if (!used_.count(&e)) throw FormatError(e.line, "unknown entry " + e.section + "." + e.key);
    }
  }

 private:
  const KvDocument& doc_;
  std::set<const KvEntry*> used_;
};

std::string join(const std::vector<double>& v) { return format_numbers(v); }

}  // namespace

Scenario parse_scenario(std::string_view text) {
  const KvDocument doc = KvDocument::parse(text);
  ScenarioReader rd(doc);
  Scenario s;

  rd.number("object", "diameter", s.object.diameter);
  rd.number("object", "stiffness", s.object.stiffness);

  SimSensorParams& p = s.params;
  if (const KvEntry* e = rd.get("sensor", "force_line")) {
    bool found = false;
    for (const auto& [name, line] : pad_lines::all()) {
      if (name == e->value) {
        p = SimSensorParams::from_force_line(line, p);
        found = true;
      }
    }
    if (!found) throw FormatError(e->line, "unknown force line '" + e->value + "'");
    if (doc.find("sensor", "settled_slope") || doc.find("sensor", "settled_intercept")) {
      throw FormatError(e->line, "force_line conflicts with an explicit settled line");
    }
  }
  rd.number("sensor", "lambda", p.lambda);
  rd.number("sensor", "spike_gain", p.spike_gain);
  rd.number("sensor", "settled_slope", p.settled_slope);
  rd.number("sensor", "settled_intercept", p.settled_intercept);
  rd.number("sensor", "noise_sigma", p.noise_sigma);
  rd.boolean("sensor", "quantize_10bit", p.quantize_10bit);
  rd.number("sensor", "sample_rate", p.sample_rate);
  rd.number("sensor", "drift_rate", p.drift_rate);
  rd.number("sensor", "actuation_time", p.actuation_time);
  rd.number("sensor", "base_resistance", p.base_resistance);
  rd.number("sensor", "v_ref", p.divider.v_ref);
  rd.number("sensor", "r_fixed", p.divider.r_fixed);
  long long rows = p.layout.rows;
  long long cols = p.layout.cols;
  rd.integer("sensor", "rows", rows);
  rd.integer("sensor", "cols", cols);
  p.layout.rows = static_cast<int>(rows);
  p.layout.cols = static_cast<int>(cols);
  if (const KvEntry* e = rd.get("sensor", "fingers")) {
    p.layout.finger_ids.clear();
    for (double f : rd.numbers(*e)) p.layout.finger_ids.push_back(static_cast<int>(f));
  }

  if (const KvEntry* e = rd.get("object", "contact_mask")) {
    for (double v : rd.numbers(*e)) {
      if (v != 0.0 && v != 1.0) throw FormatError(e->line, "contact_mask entries must be 0 or 1");
      s.object.contact_mask.push_back(v == 1.0);
    }
  }
  if (const KvEntry* e = rd.get("object", "pixel_response")) {
    s.object.pixel_response = rd.numbers(*e);
  }

  if (const KvEntry* e = rd.get("schedule", "commands")) {
    for (const auto& item : split(e->value, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw FormatError(e->line, "schedule entry '" + item + "' is not time:width");
      }
      const auto t = parse_number(item.substr(0, colon));
      const auto w = parse_number(item.substr(colon + 1));
      if (!t || !w) throw FormatError(e->line, "schedule entry '" + item + "' is not time:width");
      s.schedule.push_back({*t, *w});
    }
  }

  long long seed = static_cast<long long>(s.seed);
  rd.integer("run", "seed", seed);
  if (seed < 0) throw FormatError(doc.find("run", "seed")->line, "seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);
  rd.number("run", "duration", s.duration);
  rd.reject_unused();
  return s;
}

std::string format_scenario(const Scenario& s) {
  const SimSensorParams& p = s.params;
  std::ostringstream out;
  out << "[object]\ndiameter = " << format_number(s.object.diameter)
      << "\nstiffness = " << format_number(s.object.stiffness) << '\n';
  if (!s.object.contact_mask.empty()) {
    out << "contact_mask = ";
    for (std::size_t i = 0; i < s.object.contact_mask.size(); ++i) {
      out << (i ? ", " : "") << (s.object.contact_mask[i] ? 1 : 0);
    }
    out << '\n';
  }
  if (!s.object.pixel_response.empty()) {
    out << "pixel_response = " << join(s.object.pixel_response) << '\n';
  }
  out << "\n[sensor]\nlambda = " << format_number(p.lambda)
      << "\nspike_gain = " << format_number(p.spike_gain)
      << "\nsettled_slope = " << format_number(p.settled_slope)
      << "\nsettled_intercept = " << format_number(p.settled_intercept)
      << "\nnoise_sigma = " << format_number(p.noise_sigma)
      << "\nquantize_10bit = " << (p.quantize_10bit ? "true" : "false")
      << "\nsample_rate = " << format_number(p.sample_rate)
      << "\ndrift_rate = " << format_number(p.drift_rate)
      << "\nactuation_time = " << format_number(p.actuation_time)
      << "\nbase_resistance = " << format_number(p.base_resistance)
      << "\nv_ref = " << format_number(p.divider.v_ref)
      << "\nr_fixed = " << format_number(p.divider.r_fixed) << "\nfingers = ";
  for (std::size_t i = 0; i < p.layout.finger_ids.size(); ++i) {
    out << (i ? ", " : "") << p.layout.finger_ids[i];
  }
  out << "\nrows = " << p.layout.rows << "\ncols = " << p.layout.cols << "\n\n[schedule]\ncommands = ";
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    out << (i ? ", " : "") << format_number(s.schedule[i].time) << ':'
        << format_number(s.schedule[i].width);
  }
  out << "\n\n[run]\nseed = " << s.seed << "\nduration = " << format_number(s.duration) << '\n';
  return out.str();
}

}  // namespace tactile
