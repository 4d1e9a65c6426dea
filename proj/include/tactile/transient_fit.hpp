#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tactile/core_model.hpp"

namespace tactile {

/// Search range for the decay rate (1/s).  Below the lower end the
/// exponential is indistinguishable from the constant over a 2 s window;
/// above the upper end it has vanished within one 15 Hz sample.
inline constexpr double kLambdaMin = 0.01;
inline constexpr double kLambdaMax = 50.0;
inline constexpr std::size_t kLambdaGridPoints = 64;
/// Width of the final golden-section bracket in log(lambda).  Near the lower
/// end of the range a rate error is amplified into the amplitude and offset,
/// so the bracket is taken well below the 1e-6 wanted on the parameters.
inline constexpr double kLambdaRelTol = 1e-10;

inline constexpr double kDefaultGuard = 0.5;   // t_a, seconds
inline constexpr double kDefaultCutoff = 2.5;  // t_c, seconds
inline constexpr std::size_t kMinFitSamples = 4;

/// Samples used by a fit: t in [t_p + t_a, t_actuation + t_c].
struct FitWindow {
  double t_actuation = 0.0;  // close_stop mark
  double t_p = 0.0;          // peak time, >= t_actuation
  double t_a = kDefaultGuard;
  double t_c = kDefaultCutoff;

  double start() const { return t_p + t_a; }
  double end() const { return t_actuation + t_c; }
};

/// Model A * exp(-lambda * (t - t_p)) + C fitted over a window.
struct DecayFit {
  double a_star = 0.0;       // percent
  double lambda_star = 0.0;  // 1/s
  double c_star = 0.0;       // percent, settled estimate
  double rms_residual = 0.0; // percent
  std::size_t n_samples = 0;
  FitWindow window;
  bool degenerate = false;       // flat input: A = 0, lambda = lambda_min, C = mean
  bool lambda_at_bound = false;  // optimum sits on an end of the search range

  double value_at(double t) const;
};

/// Optional trace of the solver's progress.
struct FitDiagnostics {
  std::vector<double> grid_lambda;
  std::vector<double> grid_objective;
  /// Best objective in the golden-section bracket after each iteration.
  std::vector<double> refinement_objective;
};

/// Time of the largest aggregate value in [t_actuation, t_actuation + t_c];
/// the earliest sample wins ties.  Throws EmptyWindow if no valid sample lies
/// in the window.
double detect_peak(const ResistanceTrace& trace, double t_actuation, double t_c = kDefaultCutoff);

/// Window anchored at `t_actuation` with the peak located by detect_peak.
FitWindow make_window(const ResistanceTrace& trace, double t_actuation, double t_a = kDefaultGuard,
                      double t_c = kDefaultCutoff);

/// Least-squares decay fit of raw samples by variable projection: for each
/// candidate lambda the amplitude and offset come from a two-column linear
/// least-squares solve, and lambda itself is located on a 64-point log grid
/// over [0.01, 50] then refined by golden-section search in log(lambda).
///
/// Missing (NaN) values are skipped.  Fewer than four usable samples throws
/// InsufficientData.  Identical input always yields bit-identical output.
DecayFit fit_decay_series(std::span<const double> times, std::span<const double> values,
                          const FitWindow& window, FitDiagnostics* diagnostics = nullptr);

/// Fit of the aggregate series.
DecayFit fit_decay(const ResistanceTrace& trace, const FitWindow& window,
                   FitDiagnostics* diagnostics = nullptr);

/// Fit of a single pixel's series (used for bruise localization).
DecayFit fit_decay_pixel(const ResistanceTrace& trace, std::size_t pixel, const FitWindow& window);

/// Aggregate reading of the last valid sample at or before `t`.
double reading_at(const ResistanceTrace& trace, double t);

/// |estimate - reference| in percentage points.
double settled_error(double estimate, double reference);

}  // namespace tactile
