#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hvs::thermal {

// ---------------------------------------------------------------------------
// Self-heating thermo-resistor
// ---------------------------------------------------------------------------

/// Resistor with a linear temperature coefficient, thermally coupled to an
/// ambient node through a lumped thermal resistance.
struct ResistorParams {
    double resistance = 10.0;           ///< intrinsic resistance R [ohm]
    double temp_coefficient = 0.004;    ///< alpha [1/K]
    double reference_temp = 293.15;     ///< T_ref [K]
    double thermal_resistance = 0.5;    ///< R_th to ambient [K/W]

    void validate() const;
    double equivalent_resistance(double heatport_temp) const {
        return resistance * (1.0 + temp_coefficient * (heatport_temp - reference_temp));
    }
};

struct ResistorEquilibrium {
    double current = 0.0;                ///< [A]
    double equivalent_resistance = 0.0;  ///< [ohm]
    double heatport_temp = 0.0;          ///< [K]
};

/// Steady state of T = ambient + R_th * V^2 / R_eq(T).
///
/// Solved by Newton's method safeguarded with a bisection bracket
/// [ambient, ambient + R_th * V^2 / R_eq(ambient)]; the residual of the
/// fixed-point equation is at most 1e-9 relative to T on return.
/// Throws InvalidParamsError when R_eq would be non-positive at ambient and
/// SolverFailure when the iteration cap is hit.
ResistorEquilibrium resistor_equilibrium(const ResistorParams& params, double voltage,
                                         double ambient_temp);

/// Element-wise resistor_equilibrium. Failures are rethrown with the index of
/// the offending voltage in the message.
std::vector<ResistorEquilibrium> sweep_resistor(const ResistorParams& params,
                                                std::span<const double> voltages,
                                                double ambient_temp);

/// Writes `voltage,current,resistance,heatport_temp` with a header row.
void write_sweep_csv(std::ostream& out, std::span<const double> voltages,
                     std::span<const ResistorEquilibrium> results);

// ---------------------------------------------------------------------------
// Multi-room building with hysteresis thermostats
// ---------------------------------------------------------------------------

struct RoomParams {
    double air_mass = 0.0;            ///< m [kg], effective thermal mass
    double heat_capacity = 718.0;     ///< c_v [J/(kg K)]
    double conductance = 0.0;         ///< UA = h_c * A [W/K]
    double ventilation_flow = 0.0;    ///< mdot [kg/s]
    double heater_power = 0.0;        ///< P_heat [W], electrical = thermal
    double hysteresis = 0.5;          ///< half-width of the dead band [K]

    double capacitance() const { return air_mass * heat_capacity; }
    /// Total loss coefficient towards outdoor air [W/K].
    double loss_coefficient() const { return conductance + ventilation_flow * heat_capacity; }
    void validate() const;
};

struct BuildingModel {
    std::vector<RoomParams> rooms;
    std::vector<std::string> names;  ///< optional, same length as rooms when set

    std::size_t size() const { return rooms.size(); }
    void validate() const;
};

struct RoomState {
    std::vector<double> temperatures;  ///< indoor temperature per room [degC]
    std::vector<bool> heater_on;

    static RoomState uniform(std::size_t rooms, double temperature, bool heater_on = false);
    std::size_t size() const { return temperatures.size(); }
};

/// Per-room energy bookkeeping for one simulated hour [J].
struct RoomEnergyBalance {
    double heater = 0.0;
    double envelope_loss = 0.0;
    double ventilation_loss = 0.0;
    double stored = 0.0;  ///< m c_v (T_end - T_start)
};

struct HourResult {
    double energy_kwh = 0.0;  ///< electrical energy drawn by all heaters
    RoomState final_state;
    std::vector<RoomEnergyBalance> balance;
};

/// One hour of explicit-Euler integration of
///   m c_v dT/dt = P on - UA (T - T_ext) - mdot c_v (T - T_ext)
/// with a symmetric hysteresis thermostat per room. The heater switches on
/// below setpoint - delta and off above setpoint + delta; between the two it
/// keeps its previous state.
///
/// Throws InputError when timestep does not divide 3600 or lengths disagree,
/// NumericalBlowup when the step exceeds the explicit stability limit or the
/// state stops being finite.
HourResult simulate_hour(const BuildingModel& building, std::span<const double> setpoints,
                         double external_temp, const RoomState& start, double timestep = 60.0);

/// Chains simulate_hour, carrying the final state of hour h into hour h + 1.
std::vector<HourResult> simulate_horizon(const BuildingModel& building,
                                         const std::vector<std::vector<double>>& setpoint_schedule,
                                         std::span<const double> external_series,
                                         const RoomState& start, double timestep = 60.0);

}  // namespace hvs::thermal
