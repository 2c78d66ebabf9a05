#include "hvs/thermal_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "hvs/error.hpp"

namespace hvs::thermal {

namespace {

constexpr int kMaxSolverIterations = 200;
constexpr double kResidualTolerance = 1e-9;
constexpr double kSecondsPerHour = 3600.0;
constexpr double kJoulesPerKwh = 3.6e6;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void ResistorParams::validate() const {
    if (!finite_positive(resistance))
        throw InvalidParamsError(fmt::format("resistor: resistance must be > 0, got {}", resistance));
    if (!std::isfinite(temp_coefficient) || temp_coefficient < 0.0)
        throw InvalidParamsError(fmt::format("resistor: temp_coefficient must be >= 0, got {}", temp_coefficient));
    if (!std::isfinite(thermal_resistance) || thermal_resistance < 0.0)
        throw InvalidParamsError(fmt::format("resistor: thermal_resistance must be >= 0, got {}", thermal_resistance));
    if (!std::isfinite(reference_temp))
        throw InvalidParamsError("resistor: reference_temp must be finite");
}

ResistorEquilibrium resistor_equilibrium(const ResistorParams& params, double voltage,
                                         double ambient_temp) {
    params.validate();
    if (!std::isfinite(voltage) || voltage < 0.0)
        throw InputError(fmt::format("resistor: voltage must be finite and >= 0, got {}", voltage));
    if (!std::isfinite(ambient_temp))
        throw InputError("resistor: ambient temperature must be finite");

    const double r_ambient = params.equivalent_resistance(ambient_temp);
    if (!(r_ambient > 0.0))
        throw InvalidParamsError(fmt::format(
            "resistor: equivalent resistance {} at ambient {} K is not positive", r_ambient, ambient_temp));

    const double v2 = voltage * voltage;
    // f is strictly increasing because R_eq grows with T when alpha >= 0.
    auto residual = [&](double t) { return t - ambient_temp - params.thermal_resistance * v2 / params.equivalent_resistance(t); };
    auto slope = [&](double t) {
        const double r = params.equivalent_resistance(t);
        return 1.0 + params.thermal_resistance * v2 * params.resistance * params.temp_coefficient / (r * r);
    };

    double lo = ambient_temp;
    double hi = ambient_temp + params.thermal_resistance * v2 / r_ambient;
    double t = lo;
    bool converged = false;
    for (int it = 0; it < kMaxSolverIterations; ++it) {
        const double f = residual(t);
        if (std::abs(f) <= kResidualTolerance * std::max(std::abs(t), 1.0)) {
            converged = true;
            break;
        }
        if (f < 0.0)
            lo = t;
        else
            hi = t;
        double next = t - f / slope(t);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == t) {
            converged = std::abs(f) <= kResidualTolerance * std::max(std::abs(t), 1.0);
            break;
        }
        t = next;
    }
    if (!converged)
        throw SolverFailure(fmt::format("resistor: no equilibrium after {} iterations at V = {}",
                                        kMaxSolverIterations, voltage));

    ResistorEquilibrium eq;
    eq.heatport_temp = t;
    eq.equivalent_resistance = params.equivalent_resistance(t);
    eq.current = voltage / eq.equivalent_resistance;
    return eq;
}

std::vector<ResistorEquilibrium> sweep_resistor(const ResistorParams& params,
                                                std::span<const double> voltages,
                                                double ambient_temp) {
    if (voltages.empty()) throw InputError("sweep_resistor: empty voltage list");
    std::vector<ResistorEquilibrium> out;
    out.reserve(voltages.size());
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        try {
            out.push_back(resistor_equilibrium(params, voltages[i], ambient_temp));
        } catch (const SolverFailure& e) {
            throw SolverFailure(fmt::format("sweep_resistor[{}]: {}", i, e.what()));
        } catch (const InvalidParamsError& e) {
            throw InvalidParamsError(fmt::format("sweep_resistor[{}]: {}", i, e.what()));
        } catch (const InputError& e) {
            throw InputError(fmt::format("sweep_resistor[{}]: {}", i, e.what()));
        }
    }
    return out;
}

void write_sweep_csv(std::ostream& out, std::span<const double> voltages,
                     std::span<const ResistorEquilibrium> results) {
    if (voltages.size() != results.size())
        throw InputError("write_sweep_csv: voltages and results differ in length");
    out << "voltage,current,resistance,heatport_temp\n";
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        out << fmt::format("{},{},{},{}\n", voltages[i], results[i].current,
                           results[i].equivalent_resistance, results[i].heatport_temp);
    }
}

void RoomParams::validate() const {
    if (!finite_positive(air_mass)) throw InvalidParamsError("room: air_mass must be > 0");
    if (!finite_positive(heat_capacity)) throw InvalidParamsError("room: heat_capacity must be > 0");
    if (!finite_positive(conductance)) throw InvalidParamsError("room: conductance must be > 0");
    if (!std::isfinite(ventilation_flow) || ventilation_flow < 0.0)
        throw InvalidParamsError("room: ventilation_flow must be >= 0");
    if (!finite_positive(heater_power)) throw InvalidParamsError("room: heater_power must be > 0");
    if (!(hysteresis > 0.0 && hysteresis <= 2.0))
        throw InvalidParamsError(fmt::format("room: hysteresis must be in (0, 2], got {}", hysteresis));
}

void BuildingModel::validate() const {
    if (rooms.empty()) throw InvalidParamsError("building: at least one room is required");
    if (!names.empty() && names.size() != rooms.size())
        throw InvalidParamsError("building: names and rooms differ in length");
    for (const auto& r : rooms) r.validate();
}

RoomState RoomState::uniform(std::size_t rooms, double temperature, bool heater_on) {
    RoomState s;
    s.temperatures.assign(rooms, temperature);
    s.heater_on.assign(rooms, heater_on);
    return s;
}

HourResult simulate_hour(const BuildingModel& building, std::span<const double> setpoints,
                         double external_temp, const RoomState& start, double timestep) {
    const std::size_t n = building.size();
    if (n == 0) throw InputError("simulate_hour: building has no rooms");
    if (setpoints.size() != n || start.temperatures.size() != n || start.heater_on.size() != n)
        throw InputError(fmt::format("simulate_hour: expected {} rooms, got {} setpoints / {} temperatures",
                                     n, setpoints.size(), start.temperatures.size()));
    if (!(timestep > 0.0) || !std::isfinite(timestep))
        throw InputError("simulate_hour: timestep must be > 0");
    const double steps_real = kSecondsPerHour / timestep;
    const auto steps = static_cast<long>(std::llround(steps_real));
    if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9)
        throw InputError(fmt::format("simulate_hour: timestep {} s does not divide 3600", timestep));
    if (!std::isfinite(external_temp)) throw InputError("simulate_hour: external temperature must be finite");

    HourResult result;
    result.final_state = start;
    result.balance.resize(n);
    double heater_joules = 0.0;

    for (std::size_t r = 0; r < n; ++r) {
        const RoomParams& room = building.rooms[r];
        const double c = room.capacitance();
        const double loss_k = room.loss_coefficient();
        if (timestep * loss_k / c >= 2.0)
            throw NumericalBlowup(fmt::format(
                "simulate_hour: room {} is unstable at dt = {} s (limit {} s)", r, timestep, 2.0 * c / loss_k));

        const double sp = setpoints[r];
        if (!std::isfinite(sp)) throw InputError(fmt::format("simulate_hour: setpoint {} is not finite", r));
        double t = start.temperatures[r];
        bool on = start.heater_on[r];
        const double t0 = t;
        RoomEnergyBalance& bal = result.balance[r];

        for (long k = 0; k < steps; ++k) {
            if (t < sp - room.hysteresis)
                on = true;
            else if (t > sp + room.hysteresis)
                on = false;
            const double q_heat = on ? room.heater_power * timestep : 0.0;
            const double q_env = room.conductance * (t - external_temp) * timestep;
            const double q_vent = room.ventilation_flow * room.heat_capacity * (t - external_temp) * timestep;
            bal.heater += q_heat;
            bal.envelope_loss += q_env;
            bal.ventilation_loss += q_vent;
            t += (q_heat - q_env - q_vent) / c;
            if (!std::isfinite(t))
                throw NumericalBlowup(fmt::format("simulate_hour: room {} temperature diverged at step {}", r, k));
        }
        bal.stored = c * (t - t0);
        heater_joules += bal.heater;
        result.final_state.temperatures[r] = t;
        result.final_state.heater_on[r] = on;
    }
    result.energy_kwh = heater_joules / kJoulesPerKwh;
    return result;
}

std::vector<HourResult> simulate_horizon(const BuildingModel& building,
                                         const std::vector<std::vector<double>>& setpoint_schedule,
                                         std::span<const double> external_series,
                                         const RoomState& start, double timestep) {
    if (setpoint_schedule.size() != external_series.size())
        throw InputError(fmt::format("simulate_horizon: schedule has {} hours but weather has {}",
                                     setpoint_schedule.size(), external_series.size()));
    std::vector<HourResult> out;
    out.reserve(setpoint_schedule.size());
    RoomState state = start;
    for (std::size_t h = 0; h < setpoint_schedule.size(); ++h) {
        out.push_back(simulate_hour(building, setpoint_schedule[h], external_series[h], state, timestep));
        state = out.back().final_state;
    }
    return out;
}

}  // namespace hvs::thermal
