#pragma once

#include <string>
#include <vector>

#include "hvs/metrics.hpp"
#include "hvs/scenario.hpp"

namespace hvs::report {

/// Writes `<arm>_hourly.csv`, `<arm>_summary.txt` and the plot CSVs
/// `<arm>_temperature.csv` .. `<arm>_setpoints.csv`. These files
/// depend only on the inputs. Wall-clock numbers go to `<arm>_timing.txt`.
/// Returns the paths written.
std::vector<std::string> emit_report(const scenario::RunReport& report, const std::string& dir);

/// Per-hour produced/consumed as read back from an hourly CSV.
struct HourlyTable {
    std::vector<std::string> timestamps;
    std::vector<int> hours_of_day;
    metrics::EnergyLedger ledger;
    std::vector<std::string> modes;
};
HourlyTable read_hourly_csv(const std::string& path);

/// Compares two hourly CSVs over the same timestamps; writes
/// `comparison_summary.txt` and `hourly_ratios.csv` into `dir`.
metrics::ComparisonSummary emit_comparison(const std::string& controlled_csv, const std::string& baseline_csv,
                                           const std::string& dir);
std::string format_comparison(const metrics::ComparisonSummary& c);

/// `threshold_sweep.csv`.
std::string emit_sweep(const std::vector<scenario::SweepRow>& rows, const std::string& dir);

/// `poc_1d.csv`, `poc_2d.csv` (grid, exhaustive and surrogate values),
/// `poc_{1d,2d}.table` and `poc_summary.txt`.
std::vector<std::string> emit_poc(const scenario::PocResult& result, const std::string& dir);

/// `monolithic.table`, `init_comparison.csv` and `monolithic_summary.txt`.
std::vector<std::string> emit_monolithic(const scenario::MonolithicResult& result, const std::string& dir);

/// Optional value as text; "undefined" when empty.
std::string fmt_opt(const std::optional<double>& v);

}  // namespace hvs::report
