#pragma once

#include <optional>
#include <span>
#include <vector>

namespace hvs::metrics {

/// One hour of energy flows [kWh]. No storage: surplus PV is exported,
/// deficit is imported.
struct HourEnergy {
    double produced = 0.0;
    double consumed = 0.0;
    double exported = 0.0;
    double imported = 0.0;

    static HourEnergy from(double produced, double consumed);
    double self_consumed() const { return produced - exported; }
};

class EnergyLedger {
public:
    void add(double produced, double consumed);
    void push(const HourEnergy& h);

    std::size_t size() const { return hours_.size(); }
    const std::vector<HourEnergy>& hours() const { return hours_; }
    const HourEnergy& operator[](std::size_t i) const { return hours_[i]; }

    double total_produced() const;
    double total_consumed() const;
    double total_exported() const;
    double total_imported() const;

    /// Sub-window [first, first + count).
    EnergyLedger window(std::size_t first, std::size_t count) const;

private:
    std::vector<HourEnergy> hours_;
};

/// Window self-consumption rate sum(produced - exported) / sum(produced).
/// Empty when nothing was produced.
std::optional<double> scr(const EnergyLedger& ledger);
/// Window self-sufficiency rate sum(produced - exported) / sum(consumed).
/// Empty when nothing was consumed.
std::optional<double> ssr(const EnergyLedger& ledger);

/// Mean of the per-hour ratios over hours with production > 0. This is a
/// different quantity from the window ratios above.
std::optional<double> mean_hourly_scr(const EnergyLedger& ledger);
std::optional<double> mean_hourly_ssr(const EnergyLedger& ledger);

struct ArmSummary {
    double total_consumed = 0.0;
    double total_produced = 0.0;
    double total_exported = 0.0;
    double total_imported = 0.0;
    std::optional<double> scr;
    std::optional<double> ssr;
    std::optional<double> mean_hourly_scr;
    std::optional<double> mean_hourly_ssr;
};

ArmSummary summarize(const EnergyLedger& ledger);

struct ComparisonSummary {
    ArmSummary controlled;
    ArmSummary baseline;
    std::optional<double> consumption_delta_pct;  ///< (controlled - baseline) / baseline * 100
    std::optional<double> scr_delta_pct;
    std::optional<double> ssr_delta_pct;
    std::optional<double> mean_hourly_scr_delta_pct;
    std::optional<double> mean_hourly_ssr_delta_pct;
};

/// Relative change in percent; empty when either side is missing or the
/// reference is zero.
std::optional<double> percent_delta(std::optional<double> value, std::optional<double> reference);

/// Throws InputError when the ledgers cover different numbers of hours.
ComparisonSummary compare(const EnergyLedger& controlled, const EnergyLedger& baseline);

}  // namespace hvs::metrics
