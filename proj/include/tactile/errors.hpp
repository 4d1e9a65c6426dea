#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace tactile {

/// Failure class, used by the CLI to pick an exit code.
enum class ErrorCategory {
  data,       ///< malformed or inconsistent input (exit 2)
  numerical,  ///< a computation or control loop could not produce a result (exit 3)
};

/// Root of every error raised by the library.  `kind()` is a stable,
/// machine-readable name ("InsufficientData", "FormatError", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message, ErrorCategory category)
      : std::runtime_error(message), kind_(std::move(kind)), category_(category) {}

  const std::string& kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_; }

 private:
  std::string kind_;
  ErrorCategory category_;
};

class DataError : public Error {
 public:
  DataError(std::string kind, const std::string& message)
      : Error(std::move(kind), message, ErrorCategory::data) {}
};

class NumericalError : public Error {
 public:
  NumericalError(std::string kind, const std::string& message)
      : Error(std::move(kind), message, ErrorCategory::numerical) {}
};

// ---- core_model -------------------------------------------------------------

class SaturationError : public DataError {
 public:
  explicit SaturationError(const std::string& m) : DataError("SaturationError", m) {}
};

class InvalidBaseline : public DataError {
 public:
  explicit InvalidBaseline(const std::string& m) : DataError("InvalidBaseline", m) {}
};

class ShapeError : public DataError {
 public:
  explicit ShapeError(const std::string& m) : DataError("ShapeError", m) {}
};

class EmptyCapture : public DataError {
 public:
  explicit EmptyCapture(const std::string& m) : DataError("EmptyCapture", m) {}
};

class NoValidPixel : public DataError {
 public:
  explicit NoValidPixel(const std::string& m) : DataError("NoValidPixel", m) {}
};

// ---- transient_fit ----------------------------------------------------------

class EmptyWindow : public NumericalError {
 public:
  explicit EmptyWindow(const std::string& m) : NumericalError("EmptyWindow", m) {}
};

class InsufficientData : public NumericalError {
 public:
  explicit InsufficientData(const std::string& m) : NumericalError("InsufficientData", m) {}
};

// ---- calibration ------------------------------------------------------------

class DegenerateAbscissa : public NumericalError {
 public:
  explicit DegenerateAbscissa(const std::string& m)
      : NumericalError("DegenerateAbscissa", m) {}
};

class UnitMismatch : public DataError {
 public:
  explicit UnitMismatch(const std::string& m) : DataError("UnitMismatch", m) {}
};

class ProfileParseError : public DataError {
 public:
  ProfileParseError(std::size_t line, std::string field, const std::string& m)
      : DataError("ProfileParseError", "line " + std::to_string(line) + ", field '" +
                                           field + "': " + m),
        line_(line),
        field_(std::move(field)) {}

  /// 1-based line number; 0 when the problem is a missing entry.
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// ---- grasp_control ----------------------------------------------------------

class NoDecision : public NumericalError {
 public:
  explicit NoDecision(const std::string& m) : NumericalError("NoDecision", m) {}
};

class NoObjectError : public NumericalError {
 public:
  explicit NoObjectError(const std::string& m) : NumericalError("NoObjectError", m) {}
};

class ForceUnreachable : public NumericalError {
 public:
  ForceUnreachable(const std::string& m, double last_force)
      : NumericalError("ForceUnreachable", m), last_force_(last_force) {}
  double last_force() const noexcept { return last_force_; }

 private:
  double last_force_;
};

class OvershootError : public NumericalError {
 public:
  /// `projected` is true when the loop stopped before stepping because the
  /// secant projection predicted an overshoot; false when the measured force
  /// already exceeds the band.
  OvershootError(const std::string& m, double final_force, double final_width, bool projected)
      : NumericalError("OvershootError", m),
        final_force_(final_force),
        final_width_(final_width),
        projected_(projected) {}

  double final_force() const noexcept { return final_force_; }
  double final_width() const noexcept { return final_width_; }
  bool projected() const noexcept { return projected_; }

 private:
  double final_force_;
  double final_width_;
  bool projected_;
};

// ---- produce_analysis -------------------------------------------------------

class IncomparableSessions : public DataError {
 public:
  explicit IncomparableSessions(const std::string& m) : DataError("IncomparableSessions", m) {}
};

// ---- sim_harness ------------------------------------------------------------

class EmptySchedule : public DataError {
 public:
  explicit EmptySchedule(const std::string& m) : DataError("EmptySchedule", m) {}
};

// ---- file formats -----------------------------------------------------------

/// Base for errors tied to a line of an input file.
class LineError : public DataError {
 public:
  LineError(std::string kind, std::size_t line, const std::string& m)
      : DataError(std::move(kind), "line " + std::to_string(line) + ": " + m), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public LineError {
 public:
  FormatError(std::size_t line, const std::string& m) : LineError("FormatError", line, m) {}
};

class OrderError : public LineError {
 public:
  OrderError(std::size_t line, const std::string& m) : LineError("OrderError", line, m) {}
};

class RangeError : public LineError {
 public:
  RangeError(std::size_t line, const std::string& m) : LineError("RangeError", line, m) {}
};

}  // namespace tactile
