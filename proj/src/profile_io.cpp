#include <set>
#include <sstream>
#include <string>

#include "tactile/calibration.hpp"
#include "tactile/text_util.hpp"

namespace tactile {

namespace {

void write_model(std::ostringstream& out, const std::string& section, const LinearModel& m) {
  out << '[' << section << "]\n"
      << "slope = " << format_number(m.slope) << '\n'
      << "intercept = " << format_number(m.intercept) << '\n'
      << "r_squared = " << format_number(m.r_squared) << '\n'
      << "n_points = " << m.n_points << '\n'
      << "output_unit = " << to_string(m.output_unit) << "\n\n";
}

class ProfileReader {
 public:
  explicit ProfileReader(const KvDocument& doc) : doc_(doc) {}

  const KvEntry& require(const std::string& section, const std::string& key) {
    const KvEntry* e = doc_.find(section, key);
    if (e == nullptr) {
      throw ProfileParseError(doc_.section_line(section), section + "." + key, "missing entry");
    }
    used_.insert(e);
    return *e;
  }

  double number(const std::string& section, const std::string& key) {
    const KvEntry& e = require(section, key);
    const auto v = parse_number(e.value);
    if (!v) throw ProfileParseError(e.line, section + "." + key, "not a number: '" + e.value + "'");
    return *v;
  }

  long long integer(const std::string& section, const std::string& key) {
    const KvEntry& e = require(section, key);
    const auto v = parse_integer(e.value);
    if (!v) {
      throw ProfileParseError(e.line, section + "." + key, "not an integer: '" + e.value + "'");
    }
    return *v;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) {
    const KvEntry& e = require(section, key);
    std::vector<double> out;
    for (const auto& item : split(e.value, ',')) {
      const auto v = parse_number(item);
      if (!v) throw ProfileParseError(e.line, section + "." + key, "bad list item '" + item + "'");
      out.push_back(*v);
    }
    return out;
  }

  LinearModel model(const std::string& section) {
    LinearModel m;
    m.slope = number(section, "slope");
    m.intercept = number(section, "intercept");
    m.r_squared = number(section, "r_squared");
    const long long n = integer(section, "n_points");
    if (n < 2) throw ProfileParseError(require(section, "n_points").line, section + ".n_points",
                                       "a model needs at least two points");
    m.n_points = static_cast<std::size_t>(n);
    const KvEntry& unit = require(section, "output_unit");
    try {
      m.output_unit = parse_output_unit(unit.value);
    } catch (const std::invalid_argument& ex) {
      throw ProfileParseError(unit.line, section + ".output_unit", ex.what());
    }
    return m;
  }

  void reject_unused() const {
    for (const auto& e : doc_.entries()) {
      if (!used_.count(&e)) {
        throw ProfileParseError(e.line, e.section + "." + e.key, "unknown entry");
      }
    }
  }

 private:
  const KvDocument& doc_;
  std::set<const KvEntry*> used_;
};

}  // namespace

std::string format_profile(const CalibrationProfile& p) {
  std::ostringstream out;
  out << "# tactile calibration profile\n[profile]\ncreated_at = " << p.created_at << "\n\n";

  out << "[baseline]\nfingers = ";
  for (std::size_t i = 0; i < p.baseline.layout.finger_ids.size(); ++i) {
    out << (i ? ", " : "") << p.baseline.layout.finger_ids[i];
  }
  out << "\nrows = " << p.baseline.layout.rows << "\ncols = " << p.baseline.layout.cols
      << "\nr_avg = " << format_numbers(p.baseline.r_avg) << "\n\n";

  out << "[divider]\nv_ref = " << format_number(p.divider.v_ref)
      << "\nr_fixed = " << format_number(p.divider.r_fixed) << "\n\n";

  for (const auto& [name, model] : p.force_models) write_model(out, "force." + name, model);
  if (p.stiffness_model) write_model(out, "stiffness", *p.stiffness_model);
  return out.str();
}

CalibrationProfile parse_profile(std::string_view text) {
  KvDocument doc;
  try {
    doc = KvDocument::parse(text);
  } catch (const FormatError& ex) {
    throw ProfileParseError(ex.line(), "", ex.what());
  }
  ProfileReader rd(doc);
  CalibrationProfile p;

  if (doc.find("profile", "created_at")) p.created_at = rd.require("profile", "created_at").value;

  if (doc.section_line("baseline") == 0 && doc.find("baseline", "r_avg") == nullptr) {
    throw ProfileParseError(0, "baseline", "profile has no [baseline] section");
  }
  p.baseline.layout.finger_ids.clear();
  for (double f : rd.numbers("baseline", "fingers")) {
    p.baseline.layout.finger_ids.push_back(static_cast<int>(f));
  }
  p.baseline.layout.rows = static_cast<int>(rd.integer("baseline", "rows"));
  p.baseline.layout.cols = static_cast<int>(rd.integer("baseline", "cols"));
  p.baseline.r_avg = rd.numbers("baseline", "r_avg");
  try {
    p.baseline.validate();
  } catch (const DataError& ex) {
    throw ProfileParseError(rd.require("baseline", "r_avg").line, "baseline.r_avg", ex.what());
  }

  p.divider.v_ref = rd.number("divider", "v_ref");
  p.divider.r_fixed = rd.number("divider", "r_fixed");

  for (const auto& section : doc.sections()) {
    if (section.rfind("force.", 0) == 0) {
      const std::string name = section.substr(6);
      if (name.empty()) throw ProfileParseError(doc.section_line(section), section, "empty name");
      p.force_models.emplace(name, rd.model(section));
    } else if (section == "stiffness") {
      p.stiffness_model = rd.model(section);
    } else if (section != "profile" && section != "baseline" && section != "divider") {
      throw ProfileParseError(doc.section_line(section), section, "unknown section");
    }
  }
  rd.reject_unused();
  return p;
}

void save_profile(const CalibrationProfile& profile, const std::filesystem::path& path) {
  const std::string text = format_profile(profile);
  write_file_atomic(path, [&](std::ostream& out) { out << text; });
}

CalibrationProfile load_profile(const std::filesystem::path& path) {
  return parse_profile(read_file(path));
}

}  // namespace tactile
