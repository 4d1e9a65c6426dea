#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/sim_harness.hpp"

namespace tactile {

/// `cutoff_s,exp_error_pct,raw_error_pct,reduction_pct,n_trials,n_excluded`
void write_sweep(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> parse_sweep(std::string_view text);

/// `technique,mean_error_N,sd_error_N,percent_error,n_trials,n_excluded`
void write_bench(std::ostream& out, std::span<const BenchRow> rows);
std::vector<BenchRow> parse_bench(std::string_view text);

enum class ReportKind { sweep, bench };
std::string_view to_string(ReportKind kind);
ReportKind parse_report_kind(std::string_view name);
/// Kind named by the header row; FormatError for anything else.
ReportKind detect_report_kind(std::string_view text);

/// Aligned text: one row per cutoff with the fit error, the raw error and
/// the reduction ratio.
std::string render_sweep_table(std::span<const SweepRow> rows);
/// Aligned text: one row per technique with mean error +- sd and percent error.
std::string render_bench_table(std::span<const BenchRow> rows);

}  // namespace tactile
