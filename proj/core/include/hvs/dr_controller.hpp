#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hvs/active_learner.hpp"

namespace hvs::control {

struct ComfortPolicy {
    double comfort_floor = 19.0;
    double comfort_ceiling = 24.0;
    double night_setpoint = 17.0;
    int preheat_hour = 6;
    int occupancy_start = 8;
    int occupancy_end = 18;
    double pv_match_band = 0.10;  ///< relative half-width of the PV tracking band
    double pv_epsilon = 0.1;      ///< kWh floor for the band reference
    double preheat_boost = 2.0;   ///< preheat setpoint = comfort_floor + boost
    std::vector<double> deltas{-1.0, 0.0, 1.0, 2.0};

    void validate() const;
    double preheat_setpoint() const { return comfort_floor + preheat_boost; }
};

/// Current per-room setpoints [degC].
using SetpointState = std::vector<double>;

/// `fixed` is the constant-setpoint reference schedule.
enum class Mode { night, preheat, track_pv, no_pv_floor, fixed };
std::string to_string(Mode m);

struct FeasibleAction {
    /// Effective per-room change after clamping. Among all raw delta vectors
    /// that clamp to the same setpoints this is the smallest-magnitude one.
    std::vector<double> delta;
    std::vector<double> setpoints;
};

struct HourDecision {
    std::vector<double> delta;
    std::vector<double> setpoints;
    std::optional<double> predicted_kwh;  ///< set in track-pv mode
    double pv_available = 0.0;
    Mode mode = Mode::night;
};

/// Every |deltas|^rooms combination applied to `state`, clamped to
/// [floor, ceiling], deduplicated on the resulting setpoints. Output order
/// follows the first raw combination (lexicographic over policy.deltas) that
/// produced each setpoint vector.
std::vector<FeasibleAction> feasible_actions(const SetpointState& state, const ComfortPolicy& policy);

/// Room indices sorted by ascending temperature (stable on ties).
std::vector<std::size_t> coldest_first(std::span<const double> room_temps);

/// PV-tracking choice for an occupied hour. With no PV all rooms go to the
/// comfort floor. Otherwise the candidates are actions whose predicted
/// consumption is within pv_match_band * max(pv, pv_epsilon) of the PV
/// energy (falling back to the single closest action); the winner maximises
/// the delta vector read coldest room first, then has the lower predicted
/// consumption.
HourDecision select_action(const learn::SurrogateTable& table, double pv_available,
                           std::span<const double> room_temps, const SetpointState& state,
                           const ComfortPolicy& policy, bool allow_unconverged = false);

/// Mode dispatch by hour of day: night before preheat_hour and from
/// occupancy_end, preheat until occupancy_start, select_action in between.
/// `table` may be null outside occupied hours.
HourDecision schedule_hour(int hour_of_day, double pv_available, std::span<const double> room_temps,
                           const SetpointState& state, const learn::SurrogateTable* table,
                           const ComfortPolicy& policy, bool allow_unconverged = false);

}  // namespace hvs::control
