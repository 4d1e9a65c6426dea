#include "tactile/transient_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tactile {

namespace {

// Sample grids such as k/15 do not land exactly on window edges.
constexpr double kTimeSlack = 1e-9;

struct LinearSolve {
  double a = 0.0;
  double c = 0.0;
  double objective = 0.0;  // sum of squared residuals
  bool collinear = false;
};

/// Centered data for one window: s = t - t_p, y with its mean removed.
struct Window {
  std::vector<double> s;
  std::vector<double> y;
  double y_mean = 0.0;
  double syy = 0.0;
};

LinearSolve solve_linear(const Window& w, double lambda) {
  const std::size_t n = w.s.size();
  std::vector<double> e(n);
  double e_sum = 0.0;
  double e_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = std::exp(-lambda * w.s[i]);
    e_sum += e[i];
    e_sq += e[i] * e[i];
  }
  const double e_mean = e_sum / static_cast<double>(n);
  double see = 0.0;
  double sey = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double de = e[i] - e_mean;
    see += de * de;
    sey += de * (w.y[i] - w.y_mean);
  }

  LinearSolve out;
  if (!(see > 1e-12 * e_sq)) {
    out.collinear = true;
    out.c = w.y_mean;
    out.objective = w.syy;
    return out;
  }
  out.a = sey / see;
  out.c = w.y_mean - out.a * e_mean;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = w.y[i] - out.a * e[i] - out.c;
    ss += r * r;
  }
  out.objective = ss;
  return out;
}

/// Sign-carrying multiple of d(objective)/d(lambda) with the linear
/// parameters held at their optimum: a * sum(r * s * exp(-lambda * s)).
double objective_slope(const Window& w, double lambda) {
  const LinearSolve sol = solve_linear(w, lambda);
  if (sol.collinear) return 0.0;
  double g = 0.0;
  for (std::size_t i = 0; i < w.s.size(); ++i) {
    const double e = std::exp(-lambda * w.s[i]);
    g += (w.y[i] - sol.a * e - sol.c) * w.s[i] * e;
  }
  return sol.a * g;
}

/// Comparing objective values resolves a quadratic minimum only to about
/// sqrt(machine epsilon).  The slope changes sign at the minimum and is
/// resolved to about machine epsilon, so the golden-section result is
/// polished by bisecting on it inside [lo, hi].
double polish_minimum(const Window& w, double u, double lo, double hi) {
  auto slope = [&](double v) { return objective_slope(w, std::exp(v)); };
  double a = u, b = u;
  double fa = 0.0, fb = 0.0;
  bool bracketed = false;
  for (double step = 1e-9; step < 1e-2; step *= 4.0) {
    a = std::max(lo, u - step);
    b = std::min(hi, u + step);
    fa = slope(a);
    fb = slope(b);
    if (fa < 0.0 && fb > 0.0) {
      bracketed = true;
      break;
    }
    if (a == lo && b == hi) break;
  }
  if (!bracketed) return u;
  for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = slope(m);
    if (fm == 0.0) return m;
    (fm < 0.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

double grid_lambda(std::size_t i) {
  const double frac = static_cast<double>(i) / static_cast<double>(kLambdaGridPoints - 1);
  return kLambdaMin * std::pow(kLambdaMax / kLambdaMin, frac);
}

}  // namespace

double DecayFit::value_at(double t) const {
  return a_star * std::exp(-lambda_star * (t - window.t_p)) + c_star;
}

double detect_peak(const ResistanceTrace& trace, double t_actuation, double t_c) {
  const double end = t_actuation + t_c + kTimeSlack;
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < trace.sample_count(); ++k) {
    const double t = trace.times[k];
    if (t < t_actuation - kTimeSlack) continue;
    if (t > end) break;
    const double v = trace.aggregate_rel[k];
    if (is_missing(v)) continue;
    if (!best || v > trace.aggregate_rel[*best]) best = k;
  }
  if (!best) {
    throw EmptyWindow("no samples between t=" + std::to_string(t_actuation) + " and t=" +
                      std::to_string(t_actuation + t_c));
  }
  return trace.times[*best];
}

FitWindow make_window(const ResistanceTrace& trace, double t_actuation, double t_a, double t_c) {
  return FitWindow{t_actuation, detect_peak(trace, t_actuation, t_c), t_a, t_c};
}

DecayFit fit_decay_series(std::span<const double> times, std::span<const double> values,
                          const FitWindow& window, FitDiagnostics* diagnostics) {
  if (times.size() != values.size()) {
    throw ShapeError("fit: times and values differ in length");
  }
  if (window.t_p < window.t_actuation - kTimeSlack) {
    throw std::invalid_argument("fit window: peak precedes actuation");
  }

  Window w;
  const double lo = window.start() - kTimeSlack;
  const double hi = window.end() + kTimeSlack;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < lo || times[k] > hi || is_missing(values[k])) continue;
    if (!std::isfinite(values[k])) throw InsufficientData("fit window holds a non-finite value");
    w.s.push_back(times[k] - window.t_p);
    w.y.push_back(values[k]);
  }
  const std::size_t n = w.s.size();
  if (n < kMinFitSamples) {
    throw InsufficientData("fit window [" + std::to_string(window.start()) + ", " +
                           std::to_string(window.end()) + "] holds " + std::to_string(n) +
                           " usable samples, need " + std::to_string(kMinFitSamples));
  }
  double y_sum = 0.0;
  double y_absmax = 0.0;
  for (double v : w.y) {
    y_sum += v;
    y_absmax = std::max(y_absmax, std::abs(v));
  }
  w.y_mean = y_sum / static_cast<double>(n);
  for (double v : w.y) w.syy += (v - w.y_mean) * (v - w.y_mean);

  DecayFit fit;
  fit.window = window;
  fit.n_samples = n;

  auto finish = [&](double lambda, const LinearSolve& sol) {
    fit.lambda_star = lambda;
    fit.a_star = sol.a;
    fit.c_star = sol.c;
    fit.rms_residual = std::sqrt(sol.objective / static_cast<double>(n));
    return fit;
  };

  const double flat_tol = 1e-12 * std::max(1.0, y_absmax);
  if (w.syy <= static_cast<double>(n) * flat_tol * flat_tol) {
    fit.degenerate = true;
    return finish(kLambdaMin, LinearSolve{0.0, w.y_mean, w.syy, true});
  }

  // Coarse log-spaced grid.
  std::size_t best_i = 0;
  double best_obj = 0.0;
  bool any_independent = false;
  for (std::size_t i = 0; i < kLambdaGridPoints; ++i) {
    const double lambda = grid_lambda(i);
    const LinearSolve sol = solve_linear(w, lambda);
    any_independent = any_independent || !sol.collinear;
    if (diagnostics) {
      diagnostics->grid_lambda.push_back(lambda);
      diagnostics->grid_objective.push_back(sol.objective);
    }
    if (i == 0 || sol.objective < best_obj) {
      best_obj = sol.objective;
      best_i = i;
    }
  }
  if (!any_independent) {
    fit.degenerate = true;
    return finish(kLambdaMin, LinearSolve{0.0, w.y_mean, w.syy, true});
  }

  // Golden-section refinement in log(lambda) inside the neighbouring grid cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(grid_lambda(best_i == 0 ? 0 : best_i - 1));
  double b = std::log(grid_lambda(std::min(best_i + 1, kLambdaGridPoints - 1)));
  auto objective = [&](double u) { return solve_linear(w, std::exp(u)).objective; };

  double best_u = std::log(grid_lambda(best_i));
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > kLambdaRelTol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
    if (diagnostics) diagnostics->refinement_objective.push_back(std::min(fc, fd));
  }
  if (fc < best_obj) {
    best_obj = fc;
    best_u = c;
  }
  if (fd < best_obj) {
    best_obj = fd;
    best_u = d;
  }

  const double grid_lo = std::log(grid_lambda(best_i == 0 ? 0 : best_i - 1));
  const double grid_hi = std::log(grid_lambda(std::min(best_i + 1, kLambdaGridPoints - 1)));
  best_u = polish_minimum(w, best_u, grid_lo, grid_hi);

  const double lambda = std::exp(best_u);
  fit.lambda_at_bound = lambda <= kLambdaMin * (1.0 + 1e-4) || lambda >= kLambdaMax * (1.0 - 1e-4);
  return finish(lambda, solve_linear(w, lambda));
}

DecayFit fit_decay(const ResistanceTrace& trace, const FitWindow& window,
                   FitDiagnostics* diagnostics) {
  return fit_decay_series(trace.times, trace.aggregate_rel, window, diagnostics);
}

DecayFit fit_decay_pixel(const ResistanceTrace& trace, std::size_t pixel, const FitWindow& window) {
  if (pixel >= trace.pixel_count()) throw std::out_of_range("pixel index out of range");
  return fit_decay_series(trace.times, trace.per_pixel_rel[pixel], window);
}

double reading_at(const ResistanceTrace& trace, double t) {
  for (std::size_t k = trace.sample_count(); k-- > 0;) {
    if (trace.times[k] <= t + kTimeSlack && !is_missing(trace.aggregate_rel[k])) {
      return trace.aggregate_rel[k];
    }
  }
  throw EmptyWindow("no valid sample at or before t=" + std::to_string(t));
}

double settled_error(double estimate, double reference) { return std::abs(estimate - reference); }

}  // namespace tactile
