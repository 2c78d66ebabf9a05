#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hvs/active_learner.hpp"
#include "hvs/committee.hpp"
#include "hvs/config.hpp"
#include "hvs/metrics.hpp"
#include "hvs/series.hpp"

namespace hvs::scenario {

// ---- grids and ground-truth simulators -------------------------------------

/// One axis per room holding the policy's setpoint deltas.
learn::InputGrid delta_grid(const control::ComfortPolicy& policy, std::size_t rooms);

/// Hourly consumption [kWh] of the building driven at base + delta from a
/// state where every room sits at `base` with heaters off.
learn::PointSimulator building_simulator(const thermal::BuildingModel& building, double base, double external_temp,
                                         double timestep);
committee::SimulatorFactory building_factory(const thermal::BuildingModel& building, double base, double timestep);

/// Delta axes plus an external-temperature axis.
learn::InputGrid monolithic_grid(const control::ComfortPolicy& policy, std::size_t rooms,
                                 const config::MonolithicSettings& settings);
learn::PointSimulator monolithic_simulator(const thermal::BuildingModel& building, double base, double timestep);

/// Reference temperature 0..3 degC (step 0.1) by external temperature 0..15
/// degC (step 0.5).
learn::InputGrid single_room_grid();
/// One room held at the reference temperature for an hour, starting there.
learn::PointSimulator single_room_simulator(const thermal::RoomParams& room, double timestep);

// ---- scenario runs ---------------------------------------------------------

struct HourlyRecord {
    std::string timestamp;
    double t_ext = 0.0;
    committee::TempBucket bucket;
    std::string mode;
    std::vector<double> setpoints;
    double consumed_kwh = 0.0;
    double pv_kwh = 0.0;
    double exported_kwh = 0.0;
    double imported_kwh = 0.0;
    std::vector<double> room_temps;  ///< end of hour
    bool new_model = false;
    std::size_t cum_models = 0;
    std::size_t cum_sims = 0;
    std::optional<double> predicted_kwh;
};

struct Timings {
    double training_s = 0.0;
    double decision_s = 0.0;
    double execution_s = 0.0;
    std::size_t training_simulations = 0;
    std::size_t decisions = 0;  ///< surrogate-based decisions
    std::size_t executions = 0;
};

struct RunReport {
    std::string arm;  ///< "controlled" or "baseline"
    std::vector<std::string> room_names;
    double comfort_floor = 0.0;
    int occupancy_start = 0;
    int occupancy_end = 24;
    std::vector<HourlyRecord> records;
    committee::Stats committee;
    metrics::EnergyLedger ledger;
    Timings timings;  ///< wall clock, not part of the deterministic outputs
};

struct RunOptions {
    /// Let the controller use a table that stopped before reaching the
    /// threshold instead of failing.
    bool allow_unconverged = false;
    std::function<void(const HourlyRecord&)> on_hour;
};

/// Committee-driven arm: every hour the external temperature is bucketed and
/// the matching member trained if missing; the controller picks setpoints and
/// the ground-truth simulator executes them, carrying room state forward.
/// On failure `partial` (when given) receives the hours completed so far and
/// the exception propagates.
RunReport run_controlled(const config::AppConfig& config, const series::WeatherSeries& weather,
                         const series::PvSeries& pv, const RunOptions& options = {}, RunReport* partial = nullptr);

/// Fixed occupied-hours setpoint; night setback and preheat as in the
/// controlled arm; no training.
RunReport run_baseline(const config::AppConfig& config, const series::WeatherSeries& weather,
                       const series::PvSeries& pv, const RunOptions& options = {}, RunReport* partial = nullptr);

/// Weather and PV truncated to config.scenario.horizon_hours (0 keeps all).
std::pair<series::WeatherSeries, series::PvSeries> apply_horizon(const config::AppConfig& config,
                                                                 const series::WeatherSeries& weather,
                                                                 const series::PvSeries& pv);

// ---- threshold sweep -------------------------------------------------------

struct SweepRow {
    double threshold = 0.0;
    std::size_t models = 0;
    std::size_t total_simulations = 0;
    double wall_seconds = 0.0;  ///< minimum over repeats
    bool all_converged = true;
    double max_abs_error_kwh = 0.0;  ///< against exhaustive grid evaluation
    double max_rel_error = 0.0;      ///< over points with truth >= 0.05 kWh
};

struct SweepOptions {
    std::size_t repeats = 1;
    bool grid_error = true;
};

/// Trains a fresh committee over the weather for each threshold.
std::vector<SweepRow> sweep_threshold(const config::AppConfig& config, const series::WeatherSeries& weather,
                                      const std::vector<double>& thresholds, const SweepOptions& options = {});

// ---- proof of concept and monolithic model ---------------------------------

struct PocArm {
    learn::SurrogateTable table;
    std::vector<double> exhaustive;  ///< current per grid point [A]
    double max_rel_error = 0.0;
    double mean_rel_error = 0.0;
};

struct PocResult {
    PocArm one_d;  ///< voltage only at fixed ambient
    PocArm two_d;  ///< voltage by ambient temperature
};

/// Electrical current of the self-heating resistor learned over the
/// configured voltage (and ambient) grids, compared against exhaustive
/// evaluation. `threshold` overrides the configured one when set.
PocResult run_poc(const config::PocSettings& settings, std::uint64_t seed, std::optional<double> threshold = {});

struct MonolithicResult {
    learn::SurrogateTable corner_table;
    learn::InitComparison comparison;
};

MonolithicResult run_monolithic(const config::AppConfig& config, std::uint64_t seed);

}  // namespace hvs::scenario
