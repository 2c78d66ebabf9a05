#include "hvs/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hvs/error.hpp"

namespace hvs::metrics {

HourEnergy HourEnergy::from(double produced, double consumed) {
    if (!std::isfinite(produced) || !std::isfinite(consumed) || produced < 0.0 || consumed < 0.0)
        throw InputError(fmt::format("energy values must be finite and >= 0 (produced {}, consumed {})", produced, consumed));
    HourEnergy h;
    h.produced = produced;
    h.consumed = consumed;
    // self-consumed = min(produced, consumed) on both sides of the identity
    if (produced >= consumed) {
        h.exported = produced - consumed;
        h.imported = 0.0;
    } else {
        h.exported = 0.0;
        h.imported = consumed - produced;
    }
    return h;
}

void EnergyLedger::add(double produced, double consumed) { hours_.push_back(HourEnergy::from(produced, consumed)); }

void EnergyLedger::push(const HourEnergy& h) { hours_.push_back(h); }

double EnergyLedger::total_produced() const {
    double s = 0.0;
    for (const auto& h : hours_) s += h.produced;
    return s;
}

double EnergyLedger::total_consumed() const {
    double s = 0.0;
    for (const auto& h : hours_) s += h.consumed;
    return s;
}

double EnergyLedger::total_exported() const {
    double s = 0.0;
    for (const auto& h : hours_) s += h.exported;
    return s;
}

double EnergyLedger::total_imported() const {
    double s = 0.0;
    for (const auto& h : hours_) s += h.imported;
    return s;
}

EnergyLedger EnergyLedger::window(std::size_t first, std::size_t count) const {
    if (first > hours_.size() || count > hours_.size() - first)
        throw InputError(fmt::format("ledger window [{}, {}) exceeds {} hours", first, first + count, hours_.size()));
    EnergyLedger w;
    w.hours_.assign(hours_.begin() + static_cast<std::ptrdiff_t>(first),
                    hours_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return w;
}

namespace {

double self_consumed_sum(const EnergyLedger& l) {
    double s = 0.0;
    for (const auto& h : l.hours()) s += h.self_consumed();
    return s;
}

}  // namespace

std::optional<double> scr(const EnergyLedger& ledger) {
    const double p = ledger.total_produced();
    if (!(p > 0.0)) return std::nullopt;
    return self_consumed_sum(ledger) / p;
}

std::optional<double> ssr(const EnergyLedger& ledger) {
    const double c = ledger.total_consumed();
    if (!(c > 0.0)) return std::nullopt;
    return self_consumed_sum(ledger) / c;
}

std::optional<double> mean_hourly_scr(const EnergyLedger& ledger) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& h : ledger.hours()) {
        if (h.produced > 0.0) {
            s += h.self_consumed() / h.produced;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
}

std::optional<double> mean_hourly_ssr(const EnergyLedger& ledger) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& h : ledger.hours()) {
        if (h.produced > 0.0 && h.consumed > 0.0) {
            s += h.self_consumed() / h.consumed;
            ++n;
        } else if (h.produced > 0.0) {
            // daylight hour with no demand: fully self-sufficient by convention
            s += 1.0;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
}

ArmSummary summarize(const EnergyLedger& ledger) {
    ArmSummary a;
    a.total_consumed = ledger.total_consumed();
    a.total_produced = ledger.total_produced();
    a.total_exported = ledger.total_exported();
    a.total_imported = ledger.total_imported();
    a.scr = scr(ledger);
    a.ssr = ssr(ledger);
    a.mean_hourly_scr = mean_hourly_scr(ledger);
    a.mean_hourly_ssr = mean_hourly_ssr(ledger);
    return a;
}

std::optional<double> percent_delta(std::optional<double> value, std::optional<double> reference) {
    if (!value || !reference || *reference == 0.0) return std::nullopt;
    return (*value - *reference) / *reference * 100.0;
}

ComparisonSummary compare(const EnergyLedger& controlled, const EnergyLedger& baseline) {
    if (controlled.size() != baseline.size())
        throw InputError(fmt::format("compare: horizons differ ({} vs {} hours)", controlled.size(), baseline.size()));
    ComparisonSummary c;
    c.controlled = summarize(controlled);
    c.baseline = summarize(baseline);
    c.consumption_delta_pct = percent_delta(c.controlled.total_consumed, c.baseline.total_consumed);
    c.scr_delta_pct = percent_delta(c.controlled.scr, c.baseline.scr);
    c.ssr_delta_pct = percent_delta(c.controlled.ssr, c.baseline.ssr);
    c.mean_hourly_scr_delta_pct = percent_delta(c.controlled.mean_hourly_scr, c.baseline.mean_hourly_scr);
    c.mean_hourly_ssr_delta_pct = percent_delta(c.controlled.mean_hourly_ssr, c.baseline.mean_hourly_ssr);
    return c;
}

}  // namespace hvs::metrics
