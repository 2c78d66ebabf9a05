#include "hvs/dr_controller.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "hvs/error.hpp"

namespace hvs::control {

void ComfortPolicy::validate() const {
    if (!(night_setpoint <= comfort_floor && comfort_floor <= comfort_ceiling))
        throw InvalidParamsError("policy: need night_setpoint <= comfort_floor <= comfort_ceiling");
    if (!(preheat_hour >= 0 && preheat_hour < occupancy_start))
        throw InvalidParamsError("policy: need 0 <= preheat_hour < occupancy_start");
    if (!(occupancy_start < occupancy_end && occupancy_end <= 24))
        throw InvalidParamsError("policy: need occupancy_start < occupancy_end <= 24");
    if (!(pv_match_band >= 0.0) || !(pv_epsilon > 0.0))
        throw InvalidParamsError("policy: pv_match_band must be >= 0 and pv_epsilon > 0");
    if (deltas.empty()) throw InvalidParamsError("policy: no setpoint deltas");
    if (!std::is_sorted(deltas.begin(), deltas.end()) ||
        std::adjacent_find(deltas.begin(), deltas.end()) != deltas.end())
        throw InvalidParamsError("policy: deltas must be strictly increasing");
    if (comfort_floor + preheat_boost > comfort_ceiling || preheat_boost < 0.0)
        throw InvalidParamsError("policy: preheat setpoint must lie in [floor, ceiling]");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::night: return "night";
        case Mode::preheat: return "preheat";
        case Mode::track_pv: return "track-pv";
        case Mode::no_pv_floor: return "no-pv-floor";
        case Mode::fixed: return "fixed";
    }
    return "unknown";
}

std::vector<FeasibleAction> feasible_actions(const SetpointState& state, const ComfortPolicy& policy) {
    const std::size_t n = state.size();
    const std::size_t k = policy.deltas.size();
    if (n == 0) throw InputError("feasible_actions: empty state");
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= k;

    std::vector<FeasibleAction> out;
    std::map<std::vector<double>, std::size_t> seen;
    std::vector<std::size_t> digits(n, 0);
    for (std::size_t c = 0; c < total; ++c) {
        FeasibleAction a;
        a.setpoints.resize(n);
        a.delta.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            a.setpoints[r] = std::clamp(state[r] + policy.deltas[digits[r]], policy.comfort_floor, policy.comfort_ceiling);
            a.delta[r] = a.setpoints[r] - state[r];
        }
        if (seen.emplace(a.setpoints, out.size()).second) out.push_back(std::move(a));
        for (std::size_t r = n; r-- > 0;) {
            if (++digits[r] < k) break;
            digits[r] = 0;
        }
    }
    return out;
}

std::vector<std::size_t> coldest_first(std::span<const double> room_temps) {
    std::vector<std::size_t> order(room_temps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return room_temps[a] < room_temps[b]; });
    return order;
}

namespace {

SetpointState clamp_state(const SetpointState& state, const ComfortPolicy& policy) {
    SetpointState s = state;
    for (double& v : s) v = std::clamp(v, policy.comfort_floor, policy.comfort_ceiling);
    return s;
}

HourDecision uniform_decision(const SetpointState& state, double value, Mode mode, double pv) {
    HourDecision d;
    d.mode = mode;
    d.pv_available = pv;
    d.setpoints.assign(state.size(), value);
    d.delta.resize(state.size());
    for (std::size_t r = 0; r < state.size(); ++r) d.delta[r] = value - state[r];
    return d;
}

}  // namespace

HourDecision select_action(const learn::SurrogateTable& table, double pv_available,
                           std::span<const double> room_temps, const SetpointState& state,
                           const ComfortPolicy& policy, bool allow_unconverged) {
    if (!table.converged && !allow_unconverged)
        throw UnconvergedTableError(fmt::format("select_action: surrogate table did not converge (max std {} >= {})",
                                                table.final_max_std, table.std_threshold));
    if (room_temps.size() != state.size())
        throw InputError("select_action: room temperatures and setpoints differ in length");
    if (table.grid.dims() != state.size())
        throw InputError(fmt::format("select_action: table has {} inputs for {} rooms", table.grid.dims(), state.size()));
    if (!std::isfinite(pv_available) || pv_available < 0.0)
        throw InputError("select_action: PV energy must be finite and >= 0");

    if (pv_available <= 0.0) return uniform_decision(state, policy.comfort_floor, Mode::no_pv_floor, pv_available);

    const SetpointState base = clamp_state(state, policy);
    const auto actions = feasible_actions(base, policy);
    std::vector<double> predicted(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) predicted[i] = table.lookup(actions[i].delta);

    const double band = policy.pv_match_band * std::max(pv_available, policy.pv_epsilon);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (std::abs(predicted[i] - pv_available) <= band) candidates.push_back(i);
    if (candidates.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < actions.size(); ++i)
            if (std::abs(predicted[i] - pv_available) < std::abs(predicted[best] - pv_available)) best = i;
        candidates.push_back(best);
    }

    const auto order = coldest_first(room_temps);
    auto better = [&](std::size_t a, std::size_t b) {
        for (std::size_t r : order) {
            if (actions[a].delta[r] != actions[b].delta[r]) return actions[a].delta[r] > actions[b].delta[r];
        }
        return predicted[a] < predicted[b];
    };
    std::size_t winner = candidates.front();
    for (std::size_t c : candidates)
        if (better(c, winner)) winner = c;

    HourDecision d;
    d.mode = Mode::track_pv;
    d.pv_available = pv_available;
    d.setpoints = actions[winner].setpoints;
    d.delta.resize(state.size());
    for (std::size_t r = 0; r < state.size(); ++r) d.delta[r] = d.setpoints[r] - state[r];
    d.predicted_kwh = predicted[winner];
    return d;
}

HourDecision schedule_hour(int hour_of_day, double pv_available, std::span<const double> room_temps,
                           const SetpointState& state, const learn::SurrogateTable* table,
                           const ComfortPolicy& policy, bool allow_unconverged) {
    if (hour_of_day < 0 || hour_of_day >= 24)
        throw InputError(fmt::format("schedule_hour: hour {} outside [0, 24)", hour_of_day));
    if (hour_of_day < policy.preheat_hour || hour_of_day >= policy.occupancy_end)
        return uniform_decision(state, policy.night_setpoint, Mode::night, pv_available);
    if (hour_of_day < policy.occupancy_start)
        return uniform_decision(state, policy.preheat_setpoint(), Mode::preheat, pv_available);
    if (!table) throw InputError("schedule_hour: occupied hour without a surrogate table");
    return select_action(*table, pv_available, room_temps, state, policy, allow_unconverged);
}

}  // namespace hvs::control
