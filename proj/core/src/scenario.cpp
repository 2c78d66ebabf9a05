#include "hvs/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hvs/error.hpp"

namespace hvs::scenario {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

learn::InputGrid delta_grid(const control::ComfortPolicy& policy, std::size_t rooms) {
    if (rooms == 0) throw InputError("delta_grid: no rooms");
    return learn::InputGrid(std::vector<std::vector<double>>(rooms, policy.deltas));
}

learn::PointSimulator building_simulator(const thermal::BuildingModel& building, double base, double external_temp,
                                         double timestep) {
    const thermal::RoomState start = thermal::RoomState::uniform(building.size(), base);
    return [building, base, external_temp, timestep, start](std::span<const double> delta) {
        std::vector<double> sp(delta.size());
        for (std::size_t r = 0; r < delta.size(); ++r) sp[r] = base + delta[r];
        return thermal::simulate_hour(building, sp, external_temp, start, timestep).energy_kwh;
    };
}

committee::SimulatorFactory building_factory(const thermal::BuildingModel& building, double base, double timestep) {
    return [building, base, timestep](committee::TempBucket b) {
        return building_simulator(building, base, b.celsius(), timestep);
    };
}

learn::InputGrid monolithic_grid(const control::ComfortPolicy& policy, std::size_t rooms,
                                 const config::MonolithicSettings& s) {
    std::vector<std::vector<double>> axes(rooms, policy.deltas);
    std::vector<double> ext;
    const auto n = static_cast<std::size_t>(std::llround((s.t_ext_max - s.t_ext_min) / s.t_ext_step)) + 1;
    for (std::size_t i = 0; i < n; ++i) ext.push_back(s.t_ext_min + static_cast<double>(i) * s.t_ext_step);
    axes.push_back(std::move(ext));
    return learn::InputGrid(std::move(axes));
}

learn::PointSimulator monolithic_simulator(const thermal::BuildingModel& building, double base, double timestep) {
    const std::size_t rooms = building.size();
    const thermal::RoomState start = thermal::RoomState::uniform(rooms, base);
    return [building, base, timestep, start, rooms](std::span<const double> x) {
        if (x.size() != rooms + 1) throw InputError("monolithic simulator: wrong input length");
        std::vector<double> sp(rooms);
        for (std::size_t r = 0; r < rooms; ++r) sp[r] = base + x[r];
        return thermal::simulate_hour(building, sp, x[rooms], start, timestep).energy_kwh;
    };
}

learn::InputGrid single_room_grid() {
    return learn::InputGrid({learn::InputGrid::linspace(0.0, 3.0, 31), learn::InputGrid::linspace(0.0, 15.0, 31)});
}

learn::PointSimulator single_room_simulator(const thermal::RoomParams& room, double timestep) {
    thermal::BuildingModel b;
    b.rooms = {room};
    return [b, timestep](std::span<const double> x) {
        const double sp[1] = {x[0]};
        return thermal::simulate_hour(b, sp, x[1], thermal::RoomState::uniform(1, x[0]), timestep).energy_kwh;
    };
}

std::pair<series::WeatherSeries, series::PvSeries> apply_horizon(const config::AppConfig& config,
                                                                 const series::WeatherSeries& weather,
                                                                 const series::PvSeries& pv) {
    series::check_aligned(weather, pv);
    const std::size_t h = config.scenario.horizon_hours;
    if (h == 0) return {weather, pv};
    if (h > weather.size())
        throw InputError(fmt::format("horizon of {} h exceeds the {} h series", h, weather.size()));
    return {weather.head(h), pv.head(h)};
}

namespace {

struct Decision {
    control::HourDecision hour;
    bool new_model = false;
};

template <class Decide>
RunReport run_arm(const std::string& arm, const config::AppConfig& cfg, const series::WeatherSeries& weather,
                  const series::PvSeries& pv, const RunOptions& options, RunReport* partial, Decide decide) {
    series::check_aligned(weather, pv);
    cfg.validate();
    RunReport rep;
    rep.arm = arm;
    rep.room_names = cfg.building.names;
    rep.comfort_floor = cfg.policy.comfort_floor;
    rep.occupancy_start = cfg.policy.occupancy_start;
    rep.occupancy_end = cfg.policy.occupancy_end;
    const std::size_t rooms = cfg.building.size();
    thermal::RoomState state = thermal::RoomState::uniform(rooms, cfg.policy.night_setpoint);
    control::SetpointState setpoints(rooms, cfg.policy.night_setpoint);

    try {
        for (std::size_t h = 0; h < weather.size(); ++h) {
            const double t_ext = weather.values[h];
            const double pv_kwh = pv.values[h];
            Decision d = decide(h, weather.hour_of_day(h), t_ext, pv_kwh, state, setpoints, rep);

            const auto t0 = Clock::now();
            thermal::HourResult res = thermal::simulate_hour(cfg.building, d.hour.setpoints, t_ext, state, cfg.timestep);
            rep.timings.execution_s += seconds_since(t0);
            ++rep.timings.executions;

            const metrics::HourEnergy e = metrics::HourEnergy::from(pv_kwh, res.energy_kwh);
            rep.ledger.push(e);

            HourlyRecord r;
            r.timestamp = weather.timestamps[h];
            r.t_ext = t_ext;
            r.bucket = committee::bucket_of(t_ext);
            r.mode = control::to_string(d.hour.mode);
            r.setpoints = d.hour.setpoints;
            r.consumed_kwh = e.consumed;
            r.pv_kwh = e.produced;
            r.exported_kwh = e.exported;
            r.imported_kwh = e.imported;
            r.room_temps = res.final_state.temperatures;
            r.new_model = d.new_model;
            r.cum_models = rep.committee.models_created;
            r.cum_sims = rep.committee.total_simulations;
            r.predicted_kwh = d.hour.predicted_kwh;
            rep.records.push_back(r);
            if (options.on_hour) options.on_hour(r);

            state = std::move(res.final_state);
            setpoints = d.hour.setpoints;
        }
    } catch (...) {
        if (partial) *partial = rep;
        throw;
    }
    return rep;
}

}  // namespace

RunReport run_controlled(const config::AppConfig& cfg, const series::WeatherSeries& weather,
                         const series::PvSeries& pv, const RunOptions& options, RunReport* partial) {
    committee::Committee committee(delta_grid(cfg.policy, cfg.building.size()), cfg.learner);
    const auto factory = building_factory(cfg.building, cfg.scenario.surrogate_base, cfg.timestep);

    auto decide = [&](std::size_t h, int hour, double t_ext, double pv_kwh, const thermal::RoomState& state,
                      const control::SetpointState& setpoints, RunReport& rep) {
        Decision d;
        auto t0 = Clock::now();
        const learn::SurrogateTable* table = nullptr;
        try {
            table = &committee.get_or_train(t_ext, factory, static_cast<std::int64_t>(h), &d.new_model);
        } catch (const Error& e) {
            spdlog::error("training failed at hour {} ({}): {}", h, weather.timestamps[h], e.what());
            throw;
        }
        if (d.new_model) {
            rep.timings.training_s += seconds_since(t0);
            rep.timings.training_simulations += table->simulation_count;
            if (!table->converged && !options.allow_unconverged)
                throw UnconvergedTableError(fmt::format(
                    "model for {} degC stopped at max std {} (threshold {}) after {} simulations",
                    committee::bucket_of(t_ext).celsius(), table->final_max_std, table->std_threshold,
                    table->simulation_count));
        }
        rep.committee = committee.stats();

        t0 = Clock::now();
        d.hour = control::schedule_hour(hour, pv_kwh, state.temperatures, setpoints, table, cfg.policy,
                                        options.allow_unconverged);
        if (d.hour.mode == control::Mode::track_pv) {
            rep.timings.decision_s += seconds_since(t0);
            ++rep.timings.decisions;
        }
        return d;
    };
    return run_arm("controlled", cfg, weather, pv, options, partial, decide);
}

RunReport run_baseline(const config::AppConfig& cfg, const series::WeatherSeries& weather,
                       const series::PvSeries& pv, const RunOptions& options, RunReport* partial) {
    const double fixed = cfg.scenario.baseline_setpoint;
    if (!std::isfinite(fixed)) throw InvalidParamsError("scenario.baseline_setpoint_c must be finite");
    auto decide = [&](std::size_t, int hour, double, double pv_kwh, const thermal::RoomState& state,
                      const control::SetpointState& setpoints, RunReport&) {
        Decision d;
        const auto& p = cfg.policy;
        if (hour < p.occupancy_start || hour >= p.occupancy_end) {
            d.hour = control::schedule_hour(hour, pv_kwh, state.temperatures, setpoints, nullptr, p);
        } else {
            d.hour.mode = control::Mode::fixed;
            d.hour.pv_available = pv_kwh;
            d.hour.setpoints.assign(setpoints.size(), fixed);
            d.hour.delta.resize(setpoints.size());
            for (std::size_t r = 0; r < setpoints.size(); ++r) d.hour.delta[r] = fixed - setpoints[r];
        }
        return d;
    };
    return run_arm("baseline", cfg, weather, pv, options, partial, decide);
}

std::vector<SweepRow> sweep_threshold(const config::AppConfig& cfg, const series::WeatherSeries& weather,
                                      const std::vector<double>& thresholds, const SweepOptions& options) {
    if (thresholds.empty()) throw InputError("sweep_threshold: no thresholds");
    if (options.repeats == 0) throw InputError("sweep_threshold: repeats must be >= 1");
    const learn::InputGrid grid = delta_grid(cfg.policy, cfg.building.size());
    const auto factory = building_factory(cfg.building, cfg.scenario.surrogate_base, cfg.timestep);
    std::map<committee::TempBucket, std::vector<double>> truth;

    std::vector<SweepRow> rows;
    for (double th : thresholds) {
        learn::LearnerConfig lc = cfg.learner;
        lc.std_threshold = th;
        lc.validate();
        SweepRow row;
        row.threshold = th;
        row.wall_seconds = -1.0;
        std::optional<committee::Committee> kept;
        for (std::size_t rep = 0; rep < options.repeats; ++rep) {
            committee::Committee c(grid, lc);
            const auto t0 = Clock::now();
            for (std::size_t h = 0; h < weather.size(); ++h)
                c.get_or_train(weather.values[h], factory, static_cast<std::int64_t>(h));
            const double dt = seconds_since(t0);
            if (row.wall_seconds < 0.0 || dt < row.wall_seconds) row.wall_seconds = dt;
            if (!kept) kept.emplace(std::move(c));
        }
        const committee::Stats st = kept->stats();
        row.models = st.models_created;
        row.total_simulations = st.total_simulations;
        for (const auto& [b, t] : kept->members()) row.all_converged = row.all_converged && t.converged;

        if (options.grid_error) {
            for (const auto& [b, t] : kept->members()) {
                auto it = truth.find(b);
                if (it == truth.end()) {
                    const auto sim = factory(b);
                    std::vector<double> v(grid.size());
                    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = sim(grid.point(i));
                    it = truth.emplace(b, std::move(v)).first;
                }
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double err = std::abs(t.predicted[i] - it->second[i]);
                    row.max_abs_error_kwh = std::max(row.max_abs_error_kwh, err);
                    if (it->second[i] >= 0.05) row.max_rel_error = std::max(row.max_rel_error, err / it->second[i]);
                }
            }
        }
        spdlog::info("sweep: threshold {} -> {} models, {} simulations, {:.3f} s", th, row.models,
                     row.total_simulations, row.wall_seconds);
        rows.push_back(row);
    }
    return rows;
}

namespace {

PocArm poc_arm(const learn::InputGrid& grid, const learn::LearnerConfig& lc, const learn::PointSimulator& sim) {
    PocArm a;
    a.table = learn::build_surrogate(grid, lc, sim);
    a.exhaustive.resize(grid.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        a.exhaustive[i] = sim(grid.point(i));
        const double rel = std::abs(a.table.predicted[i] - a.exhaustive[i]) / std::abs(a.exhaustive[i]);
        a.max_rel_error = std::max(a.max_rel_error, rel);
        sum += rel;
    }
    a.mean_rel_error = sum / static_cast<double>(grid.size());
    return a;
}

}  // namespace

PocResult run_poc(const config::PocSettings& s, std::uint64_t seed, std::optional<double> threshold) {
    learn::LearnerConfig lc;
    lc.std_threshold = threshold.value_or(s.std_threshold);
    lc.lengthscale.kind = gp::LengthscalePolicy::Kind::fixed;
    lc.lengthscale.value = s.lengthscale;
    lc.validate();
    const thermal::ResistorParams params = s.resistor;
    params.validate();

    PocResult r;
    {
        const double ambient = s.ambient_1d;
        learn::LearnerConfig c1 = lc;
        c1.init = {learn::InitStrategy::Kind::random, s.random_init_1d, seed};
        const learn::InputGrid grid({learn::InputGrid::linspace(s.v_min_1d, s.v_max, s.v_points_1d)});
        r.one_d = poc_arm(grid, c1, [params, ambient](std::span<const double> x) {
            return thermal::resistor_equilibrium(params, x[0], ambient).current;
        });
    }
    {
        learn::LearnerConfig c2 = lc;
        c2.init = {learn::InitStrategy::Kind::random, s.random_init_2d, seed};
        const learn::InputGrid grid({learn::InputGrid::linspace(s.v_min, s.v_max, s.v_points_2d),
                                     learn::InputGrid::linspace(s.ambient_min, s.ambient_max, s.ambient_points)});
        r.two_d = poc_arm(grid, c2, [params](std::span<const double> x) {
            return thermal::resistor_equilibrium(params, x[0], x[1]).current;
        });
    }
    return r;
}

MonolithicResult run_monolithic(const config::AppConfig& cfg, std::uint64_t seed) {
    const learn::InputGrid grid = monolithic_grid(cfg.policy, cfg.building.size(), cfg.monolithic);
    const auto sim = monolithic_simulator(cfg.building, cfg.scenario.surrogate_base, cfg.timestep);
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < cfg.monolithic.random_seeds; ++i) seeds.push_back(seed + i);
    MonolithicResult r;
    r.comparison = learn::compare_init_strategies(grid, cfg.learner, sim, seeds, &r.corner_table);
    return r;
}

}  // namespace hvs::scenario
