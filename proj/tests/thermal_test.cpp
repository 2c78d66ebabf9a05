#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "hvs/error.hpp"
#include "hvs/thermal_sim.hpp"
#include "oracles.hpp"

using namespace hvs;
using namespace hvs::thermal;

namespace {

ResistorParams small_resistor() { return {10.0, 0.004, 293.15, 0.5}; }

RoomParams reference_room() {
    RoomParams r;
    r.air_mass = 2.4e5 / 718.0;
    r.heat_capacity = 718.0;
    r.conductance = 100.0;
    r.ventilation_flow = 0.0;
    r.heater_power = 3000.0;
    r.hysteresis = 0.5;
    return r;
}

BuildingModel one_room(const RoomParams& r) { return BuildingModel{{r}, {"room"}}; }

// Frozen from the bisection oracle (the closed form of this case is
// T - 293.15 = 250 K, R_eq = 20 ohm, I = 5 A).
constexpr double kRefTemp = 543.15;
constexpr double kRefCurrent = 5.0;
constexpr double kRefResistance = 20.0;

// Frozen from the 1 s Euler oracle on the reference room.
constexpr double kRoomEnergy1s = 1.5825;
constexpr double kRoom24hEnergy1s = 19.2;

}  // namespace

TEST(Resistor, NoFeedbackIsOhmic) {
    ResistorParams p{10.0, 0.0, 293.15, 0.5};
    const auto e = resistor_equilibrium(p, 50.0, 280.0);
    EXPECT_DOUBLE_EQ(e.current, 5.0);
    EXPECT_NEAR(e.heatport_temp, 280.0 + 0.5 * 2500.0 / 10.0, 405.0 * 1e-9);
}

TEST(Resistor, ZeroVoltage) {
    const auto p = small_resistor();
    const auto e = resistor_equilibrium(p, 0.0, 300.0);
    EXPECT_EQ(e.current, 0.0);
    EXPECT_DOUBLE_EQ(e.heatport_temp, 300.0);
    EXPECT_DOUBLE_EQ(e.equivalent_resistance, 10.0 * (1.0 + 0.004 * (300.0 - 293.15)));
}

TEST(Resistor, MatchesBisectionAt100V) {
    const auto p = small_resistor();
    const auto oracle = oracle::resistor_bisection(10.0, 0.004, 293.15, 0.5, 100.0, 293.15);
    EXPECT_NEAR(oracle.temp, kRefTemp, 1e-9);
    EXPECT_NEAR(oracle.current, kRefCurrent, 1e-12);

    const auto e = resistor_equilibrium(p, 100.0, 293.15);
    EXPECT_NEAR(e.heatport_temp, kRefTemp, 1e-6 * kRefTemp);
    EXPECT_NEAR(e.current, kRefCurrent, 1e-6 * kRefCurrent);
    EXPECT_NEAR(e.equivalent_resistance, kRefResistance, 1e-6 * kRefResistance);
}

TEST(Resistor, ResidualIsTiny) {
    const auto p = small_resistor();
    for (double v : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
        const auto e = resistor_equilibrium(p, v, 293.15);
        const double rhs = 293.15 + p.thermal_resistance * v * v / p.equivalent_resistance(e.heatport_temp);
        EXPECT_LE(std::abs(e.heatport_temp - rhs), 1e-9 * e.heatport_temp) << v;
    }
}

TEST(Resistor, SweepMatchesOracleAndIsMonotone) {
    const auto p = small_resistor();
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 10.0 + (10000.0 - 10.0) * static_cast<double>(i) / 999.0;
    const auto out = sweep_resistor(p, v, 293.15);
    ASSERT_EQ(out.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto o = oracle::resistor_bisection(10.0, 0.004, 293.15, 0.5, v[i], 293.15);
        ASSERT_NEAR(out[i].current, o.current, 1e-6 * o.current) << i;
        if (i > 0) ASSERT_GE(out[i].current, out[i - 1].current);
    }
    // saturating: increments shrink
    EXPECT_LT(out[999].current - out[998].current, out[1].current - out[0].current);
}

TEST(Resistor, SingleElementSweep) {
    const auto p = small_resistor();
    const std::vector<double> v{123.0};
    const auto s = sweep_resistor(p, v, 290.0);
    const auto e = resistor_equilibrium(p, 123.0, 290.0);
    EXPECT_EQ(s[0].current, e.current);
}

TEST(Resistor, Errors) {
    auto p = small_resistor();
    EXPECT_THROW(resistor_equilibrium(p, -1.0, 293.15), InputError);
    p.temp_coefficient = 0.004;
    // R_eq(ambient) = 10 (1 + 0.004 (0 - 293.15)) < 0
    EXPECT_THROW(resistor_equilibrium(p, 10.0, 0.0), InvalidParamsError);
    const std::vector<double> v{10.0, -5.0};
    try {
        sweep_resistor(small_resistor(), v, 293.15);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("[1]"), std::string::npos);
    }
}

TEST(Resistor, SweepCsv) {
    const auto p = small_resistor();
    const std::vector<double> v{0.0, 100.0};
    const auto out = sweep_resistor(p, v, 293.15);
    std::ostringstream s;
    write_sweep_csv(s, v, out);
    EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "voltage,current,resistance,heatport_temp");
}

TEST(Room, EquilibriumDrawsNothing) {
    auto r = reference_room();
    const auto res = simulate_hour(one_room(r), std::vector<double>{5.0}, 5.0, RoomState::uniform(1, 5.0));
    EXPECT_EQ(res.energy_kwh, 0.0);
    EXPECT_EQ(res.final_state.temperatures[0], 5.0);
}

TEST(Room, OffBranchDecaysTowardOutside) {
    auto r = reference_room();
    const auto res = simulate_hour(one_room(r), std::vector<double>{20.0}, 20.0, RoomState::uniform(1, 22.0));
    EXPECT_EQ(res.energy_kwh, 0.0);
    EXPECT_LT(res.final_state.temperatures[0], 22.0);
    EXPECT_GT(res.final_state.temperatures[0], 20.0);
}

TEST(Room, ReferenceRoomWithinThreePercentOfFineOracle) {
    const auto o = oracle::room_euler(2.4e5, 100.0, 0.0, 3000.0, 0.5, 21.0, 5.0, 21.0, false, 1.0, 3600.0);
    EXPECT_NEAR(o.energy_j / 3.6e6, kRoomEnergy1s, 1e-9);
    const auto res = simulate_hour(one_room(reference_room()), std::vector<double>{21.0}, 5.0,
                                   RoomState::uniform(1, 21.0), 60.0);
    EXPECT_LE(std::abs(res.energy_kwh - kRoomEnergy1s), 0.03 * kRoomEnergy1s);
    // identical scheme at the same step
    const auto same = oracle::room_euler(2.4e5, 100.0, 0.0, 3000.0, 0.5, 21.0, 5.0, 21.0, false, 60.0, 3600.0);
    EXPECT_NEAR(res.energy_kwh, same.energy_j / 3.6e6, 1e-12);
    EXPECT_NEAR(res.final_state.temperatures[0], same.final_temp, 1e-9);
}

TEST(Room, StepDifferenceIsOrderDt) {
    const BuildingModel b = one_room(reference_room());
    for (double dt : {120.0, 60.0, 30.0, 15.0}) {
        const double e1 = simulate_hour(b, std::vector<double>{21.0}, 5.0, RoomState::uniform(1, 21.0), dt).energy_kwh;
        const double e2 =
            simulate_hour(b, std::vector<double>{21.0}, 5.0, RoomState::uniform(1, 21.0), dt / 2).energy_kwh;
        // each thermostat edge can move by one step; count edges from the
        // band crossing times at the set point
        const double c = 2.4e5, loss = 100.0 * (21.0 - 5.0);
        const double cycle = c * 1.0 / (3000.0 - loss) + c * 1.0 / loss;
        const double edges = 2.0 * std::ceil(3600.0 / cycle) + 2.0;
        EXPECT_LE(std::abs(e1 - e2), edges * 3000.0 * dt / 3.6e6) << dt;
    }
}

// Heater energy over a fixed hour of a cycling thermostat depends on where in
// its on/off cycle the hour ends, which moves with dt; see the notes in the
// README on timestep convergence.
TEST(Room, HalvingStepReducesErrorAtReferenceRoom) {
    const BuildingModel b = one_room(reference_room());
    const double e60 = simulate_hour(b, std::vector<double>{21.0}, 5.0, RoomState::uniform(1, 21.0), 60.0).energy_kwh;
    const double e30 = simulate_hour(b, std::vector<double>{21.0}, 5.0, RoomState::uniform(1, 21.0), 30.0).energy_kwh;
    EXPECT_LT(std::abs(e30 - kRoomEnergy1s), std::abs(e60 - kRoomEnergy1s));
}

TEST(Room, ForcedHeaterConvergesFirstOrder) {
    // heater always on (setpoint far above), compare against the exponential
    const RoomParams r = reference_room();
    const BuildingModel b = one_room(r);
    const double c = r.capacitance(), k = r.loss_coefficient();
    const double t_inf = 5.0 + r.heater_power / k;
    const double exact = t_inf + (10.0 - t_inf) * std::exp(-k * 3600.0 / c);
    const double err60 = std::abs(
        simulate_hour(b, std::vector<double>{90.0}, 5.0, RoomState::uniform(1, 10.0), 60.0).final_state.temperatures[0] -
        exact);
    const double err30 = std::abs(
        simulate_hour(b, std::vector<double>{90.0}, 5.0, RoomState::uniform(1, 10.0), 30.0).final_state.temperatures[0] -
        exact);
    EXPECT_LT(err30, err60);
    EXPECT_NEAR(err60 / err30, 2.0, 0.1);
}

TEST(Room, TwentyFourHourChain) {
    const BuildingModel b = one_room(reference_room());
    std::vector<std::vector<double>> sched;
    std::vector<double> ext(24, 5.0);
    for (int h = 0; h < 24; ++h) sched.push_back({h < 12 ? 21.0 : 5.0});
    const auto out = simulate_horizon(b, sched, ext, RoomState::uniform(1, 21.0), 60.0);
    ASSERT_EQ(out.size(), 24u);

    double total = 0.0, chained = 0.0;
    double t = 21.0;
    bool on = false;
    for (int h = 0; h < 24; ++h) {
        total += out[h].energy_kwh;
        const auto o = oracle::room_euler(2.4e5, 100.0, 0.0, 3000.0, 0.5, sched[h][0], 5.0, t, on, 60.0, 3600.0);
        chained += o.energy_j / 3.6e6;
        EXPECT_NEAR(out[h].energy_kwh, o.energy_j / 3.6e6, 1e-9) << h;
        t = o.final_temp;
        on = o.final_on;
        if (h >= 12) EXPECT_EQ(out[h].energy_kwh, 0.0) << h;
    }
    EXPECT_NEAR(total, chained, 1e-9);
    EXPECT_LE(std::abs(total - kRoom24hEnergy1s), 0.03 * kRoom24hEnergy1s);
}

TEST(Room, HorizonOfOneHourEqualsHour) {
    const BuildingModel b = one_room(reference_room());
    const auto h = simulate_hour(b, std::vector<double>{21.0}, 3.0, RoomState::uniform(1, 18.0));
    const auto z = simulate_horizon(b, {{21.0}}, std::vector<double>{3.0}, RoomState::uniform(1, 18.0));
    EXPECT_EQ(z[0].energy_kwh, h.energy_kwh);
    EXPECT_EQ(z[0].final_state.temperatures, h.final_state.temperatures);
}

TEST(Room, EquilibriumHorizon) {
    const BuildingModel b = one_room(reference_room());
    std::vector<std::vector<double>> sched(24, {8.0});
    const auto z = simulate_horizon(b, sched, std::vector<double>(24, 8.0), RoomState::uniform(1, 8.0));
    for (const auto& h : z) EXPECT_EQ(h.energy_kwh, 0.0);
}

TEST(Room, EnergyBalanceCloses) {
    RoomParams r = reference_room();
    r.ventilation_flow = 0.01;
    const auto res = simulate_hour(one_room(r), std::vector<double>{22.0}, -3.0, RoomState::uniform(1, 15.0));
    const auto& bal = res.balance[0];
    const double lhs = bal.heater - bal.envelope_loss - bal.ventilation_loss;
    EXPECT_LE(std::abs(lhs - bal.stored), 1e-6 * std::max(std::abs(bal.heater), 1.0));
    EXPECT_NEAR(res.energy_kwh, bal.heater / 3.6e6, 1e-12);
}

TEST(Room, LossSignWithHeaterOff) {
    RoomParams r = reference_room();
    r.heater_power = 0.0;
    double prev = 25.0;
    RoomState s = RoomState::uniform(1, 25.0);
    for (int h = 0; h < 5; ++h) {
        s = simulate_hour(one_room(r), std::vector<double>{0.0}, 10.0, s).final_state;
        EXPECT_LE(s.temperatures[0], prev);
        prev = s.temperatures[0];
    }
}

TEST(Room, Errors) {
    const BuildingModel b = one_room(reference_room());
    EXPECT_THROW(simulate_hour(b, std::vector<double>{21.0}, 5.0, RoomState::uniform(1, 21.0), 7.0), InputError);
    EXPECT_THROW(simulate_hour(b, std::vector<double>{21.0, 21.0}, 5.0, RoomState::uniform(1, 21.0)), InputError);
    EXPECT_THROW(simulate_horizon(b, {{21.0}}, std::vector<double>{1.0, 2.0}, RoomState::uniform(1, 21.0)),
                 InputError);
    // tiny capacitance: explicit Euler unstable at 60 s
    RoomParams r = reference_room();
    r.air_mass = 1.0;
    EXPECT_THROW(simulate_hour(one_room(r), std::vector<double>{21.0}, 5.0, RoomState::uniform(1, 21.0), 60.0),
                 NumericalBlowup);
}

TEST(Room, Validation) {
    RoomParams r = reference_room();
    EXPECT_NO_THROW(r.validate());
    r.hysteresis = 0.0;
    EXPECT_THROW(r.validate(), InputError);
    r = reference_room();
    r.air_mass = -1.0;
    EXPECT_THROW(r.validate(), InputError);
}
