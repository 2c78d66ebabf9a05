// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hvs/committee.hpp"
#include "hvs/config.hpp"
#include "hvs/dr_controller.hpp"
#include "hvs/gp.hpp"
#include "hvs/report.hpp"
#include "hvs/scenario.hpp"
#include "instances.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hvs;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kOracleTol = 1e-8;
constexpr double kOracleSeconds = 10.0;
constexpr double kConditionLimit = 1e7;
constexpr double kInterpStd = 1e-3;
constexpr double kFarStd = 0.999;
constexpr double kPocMaxRelError = 0.02;
constexpr std::size_t kPocMaxSims = 250;
constexpr double kPocSeconds = 120.0;
constexpr double kScenarioSeconds = 600.0;
constexpr double kMinSpeedup = 10.0;
constexpr double kConservationTol = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

config::AppConfig shipped() { return config::load_config(test::config_path()); }

gp::Matrix to_eigen(const oracle::Mat& m) {
    gp::Matrix out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.front().size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
    return out;
}

struct GpInstance {
    oracle::Mat x;
    std::vector<double> y;
    double lengthscale = 1.0;
};

/// Random training set; instances whose kernel matrix is too ill-conditioned
/// for a 1e-8 comparison to be meaningful are redrawn.
GpInstance draw_gp_instance(std::mt19937_64& rng, std::size_t* redraws) {
    std::uniform_int_distribution<int> n_d(1, 30), d_d(1, 7);
    std::uniform_real_distribution<double> u(-5.0, 5.0), l_d(0.3, 1.5);
    for (;;) {
        GpInstance g;
        const int n = n_d(rng), d = d_d(rng);
        g.lengthscale = l_d(rng);
        for (int i = 0; i < n; ++i) {
            std::vector<double> row(static_cast<std::size_t>(d));
            for (auto& v : row) v = u(rng);
            g.x.push_back(row);
            g.y.push_back(u(rng) * 3.0);
        }
        const oracle::DenseGp o(g.x, g.y, g.lengthscale, 1e-8);
        if (o.condition <= kConditionLimit) return g;
        ++*redraws;
    }
}

gp::FitOptions fit_options(double l) {
    gp::FitOptions f;
    f.lengthscale.value = l;
    f.jitter = 1e-8;
    return f;
}

// ---------------------------------------------------------------------------

Outcome ac1_oracle_equivalence() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    std::size_t redraws = 0, compared = 0;
    double worst_mean = 0.0, worst_std = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const auto g = draw_gp_instance(rng, &redraws);
        const oracle::DenseGp o(g.x, g.y, g.lengthscale, 1e-8);
        const auto m = gp::GpModel::fit(to_eigen(g.x), g.y, fit_options(g.lengthscale));
        if (m.jitter() != 1e-8) return {false, fmt::format("instance {}: jitter escalated to {}", inst, m.jitter())};
        const std::size_t d = g.x.front().size();
        for (int q = 0; q < 20; ++q) {
            std::vector<double> p(d);
            for (auto& v : p) v = u(rng);
            const auto [om, os] = o.predict(p);
            const auto pr = m.predict_one(p);
            worst_mean = std::max(worst_mean, std::abs(pr.mean - om));
            worst_std = std::max(worst_std, std::abs(pr.std - os));
            ++compared;
        }
    }
    const double secs = seconds_since(t0);
    const bool pass = worst_mean <= kOracleTol && worst_std <= kOracleTol && secs < kOracleSeconds;
    return {pass, fmt::format("50 instances, {} queries, max |dmean| {:.2e}, max |dstd| {:.2e}, {} redraws, {:.2f} s",
                              compared, worst_mean, worst_std, redraws, secs)};
}

Outcome ac2_interpolation_and_reversion() {
    std::mt19937_64 rng(202);
    std::size_t redraws = 0;
    double worst_std = 0.0, worst_resid_ratio = 0.0, min_far = 1.0, worst_alpha = 0.0;
    int over = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const auto g = draw_gp_instance(rng, &redraws);
        const auto m = gp::GpModel::fit(to_eigen(g.x), g.y, fit_options(g.lengthscale));
        const auto& y = m.training_targets();
        double inst_ratio = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const auto p = m.predict_one(g.x[i], false);
            worst_std = std::max(worst_std, p.std);
            inst_ratio = std::max(inst_ratio, std::abs(p.mean - y(static_cast<Eigen::Index>(i))) / (10.0 * m.jitter()));
        }
        worst_resid_ratio = std::max(worst_resid_ratio, inst_ratio);
        if (inst_ratio > 1.0) ++over;
        // the residual at x_i is jitter * alpha_i with alpha = (K + jitter I)^-1 y
        const oracle::Mat kinv = oracle::invert([&] {
            oracle::Mat k(g.x.size(), std::vector<double>(g.x.size()));
            for (std::size_t i = 0; i < k.size(); ++i)
                for (std::size_t j = 0; j < k.size(); ++j) {
                    std::vector<double> a(g.x[i].size()), b(a.size());
                    for (std::size_t c = 0; c < a.size(); ++c) {
                        a[c] = (g.x[i][c] - m.input_scaler().mean()[c]) / m.input_scaler().scale()[c];
                        b[c] = (g.x[j][c] - m.input_scaler().mean()[c]) / m.input_scaler().scale()[c];
                    }
                    k[i][j] = oracle::rbf(a, b, g.lengthscale) + (i == j ? m.jitter() : 0.0);
                }
            return k;
        }());
        for (std::size_t i = 0; i < kinv.size(); ++i) {
            double a = 0.0;
            for (std::size_t j = 0; j < kinv.size(); ++j) a += kinv[i][j] * y(static_cast<Eigen::Index>(j));
            worst_alpha = std::max(worst_alpha, std::abs(a));
        }
        // 10 lengthscales beyond every training point along the first axis,
        // measured in standardized units
        const auto& sc = m.input_scaler();
        std::vector<double> far(g.x.front().size());
        for (std::size_t j = 0; j < far.size(); ++j) far[j] = sc.mean()[j];
        double max_z = 0.0;
        for (Eigen::Index i = 0; i < m.training_inputs().rows(); ++i)
            max_z = std::max(max_z, m.training_inputs()(i, 0));
        far[0] = sc.inverse_transform(max_z + 10.0 * g.lengthscale, 0);
        min_far = std::min(min_far, m.predict_one(far).std);
    }
    const bool pass = worst_std <= kInterpStd && worst_resid_ratio <= 1.0 && min_far >= kFarStd;
    return {pass, fmt::format("max std at training points {:.2e}, max residual {:.2f} x (10 jitter) with {} of 50 "
                              "instances over, max |alpha| {:.1f}, min far-field std {:.6f}",
                              worst_std, worst_resid_ratio, over, worst_alpha, min_far)};
}

Outcome ac3_poc() {
    const auto t0 = Clock::now();
    const auto c = shipped();
    const auto r = scenario::run_poc(c.poc, c.scenario.seed);
    const double secs = seconds_since(t0);
    const auto& a = r.two_d;
    const bool pass = a.table.converged && a.max_rel_error <= kPocMaxRelError &&
                      a.table.simulation_count <= kPocMaxSims && secs < kPocSeconds;
    return {pass, fmt::format("50x50 grid: {} simulations ({} initial), max rel error {:.3f}%, mean {:.4f}%; "
                              "1-D: {} simulations, max rel error {:.3f}%; {:.2f} s",
                              a.table.simulation_count, a.table.initial_design_size, 100.0 * a.max_rel_error,
                              100.0 * a.mean_rel_error, r.one_d.table.simulation_count,
                              100.0 * r.one_d.max_rel_error, secs)};
}

Outcome ac4_corner_advantage() {
    const auto c = shipped();
    const auto grid = scenario::single_room_grid();
    const auto sim = scenario::single_room_simulator(c.building.rooms[0], c.timestep);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
    const auto r = learn::compare_init_strategies(grid, c.learner, sim, seeds);
    // same comparison at a short lengthscale, reported only
    auto short_l = c.learner;
    short_l.lengthscale.value = 1.0;
    const auto s = learn::compare_init_strategies(grid, short_l, sim, seeds);
    const bool pass = static_cast<double>(r.corner_iterations) <= r.random_median_iterations;
    return {pass, fmt::format("lengthscale {}: corner {} iterations vs random median {} (reference magnitude 17 vs "
                              "137); lengthscale 1: corner {} vs median {}",
                              c.learner.lengthscale.value, r.corner_iterations, r.random_median_iterations,
                              s.corner_iterations, s.random_median_iterations)};
}

Outcome ac5_committee_asymptote() {
    const auto c = shipped();
    const auto w = series::load_weather(c.scenario.weather_file);
    std::set<long> keys;
    for (double t : w.values) keys.insert(static_cast<long>(std::floor(2.0 * t + 0.5)));
    auto lc = c.learner;
    lc.std_threshold = 1.0;
    committee::Committee com(scenario::delta_grid(c.policy, c.building.size()), lc);
    const auto factory = scenario::building_factory(c.building, c.scenario.surrogate_base, c.timestep);
    for (std::size_t h = 0; h < w.size(); ++h) com.get_or_train(w.values[h], factory, static_cast<long>(h));
    const auto st = com.stats();
    const std::size_t k = keys.size();
    const bool pass = st.models_created == k && st.total_simulations == k * 64;
    return {pass, fmt::format("k = {} distinct buckets, {} models, {} simulations (k * 64 = {})", k,
                              st.models_created, st.total_simulations, k * 64)};
}

Outcome ac6_sweep() {
    const auto c = shipped();
    const auto w = series::load_weather(c.scenario.weather_file);
    const auto rows = scenario::sweep_threshold(c, w, {0.01, 0.02, 0.03, 0.05}, {3, false});
    bool pass = rows.size() == 4;
    std::string d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d += fmt::format("{}{}: {} sims {:.2f} s", i ? "; " : "", rows[i].threshold, rows[i].total_simulations,
                         rows[i].wall_seconds);
        if (i > 0) {
            pass = pass && rows[i].total_simulations <= rows[i - 1].total_simulations;
            pass = pass && rows[i].wall_seconds <= rows[i - 1].wall_seconds;
        }
    }
    if (rows.size() == 4)
        d += fmt::format(" | sims(0.01)/sims(0.03) = {:.2f} (reference 3.5)",
                         static_cast<double>(rows[0].total_simulations) / static_cast<double>(rows[2].total_simulations));
    return {pass, d};
}

struct ScenarioRun {
    scenario::RunReport controlled, baseline;
    double seconds = 0.0;
};

ScenarioRun run_shipped_scenario() {
    const auto t0 = Clock::now();
    const auto c = shipped();
    const auto w = series::load_weather(c.scenario.weather_file);
    const auto p = series::load_pv(c.scenario.pv_file);
    const auto [wh, ph] = scenario::apply_horizon(c, w, p);
    ScenarioRun r{scenario::run_controlled(c, wh, ph), scenario::run_baseline(c, wh, ph), 0.0};
    r.seconds = seconds_since(t0);
    return r;
}

Outcome ac7_scenario_direction(const ScenarioRun& run) {
    const auto cmp = metrics::compare(run.controlled.ledger, run.baseline.ledger);
    const auto& a = cmp.controlled;
    const auto& b = cmp.baseline;
    const bool pass = a.scr && b.scr && a.ssr && b.ssr && a.total_consumed <= b.total_consumed && *a.scr >= *b.scr &&
                      *a.ssr >= *b.ssr && run.seconds < kScenarioSeconds;
    return {pass, fmt::format("consumption {:.2f} vs {:.2f} kWh ({:+.2f}%), SCR {:.4f} vs {:.4f}, SSR {:.4f} vs {:.4f}, "
                              "{} models / {} simulations, {:.1f} s | reference figures: -12.5%, SCR 0.8349 vs "
                              "0.7874, SSR 0.6309 vs 0.5125",
                              a.total_consumed, b.total_consumed, *cmp.consumption_delta_pct, a.scr.value_or(NAN),
                              b.scr.value_or(NAN), a.ssr.value_or(NAN), b.ssr.value_or(NAN),
                              run.controlled.committee.models_created, run.controlled.committee.total_simulations,
                              run.seconds)};
}

Outcome ac8_speedup() {
    const auto c = shipped();
    const auto grid = scenario::delta_grid(c.policy, c.building.size());
    learn::SurrogateTable table;
    table.grid = grid;
    table.predicted.assign(grid.size(), 1.0);
    table.converged = true;
    const auto start = thermal::RoomState::uniform(c.building.size(), 20.0);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> di(-1, 2);

    constexpr int kSims = 200;
    double sink = 0.0;
    auto t0 = Clock::now();
    for (int i = 0; i < kSims; ++i) {
        std::vector<double> sp(c.building.size());
        for (auto& v : sp) v = 21.0 + di(rng);
        sink += thermal::simulate_hour(c.building, sp, 5.0, start, 60.0).energy_kwh;
    }
    const double per_sim = seconds_since(t0) / kSims;

    constexpr int kLookups = 200000;
    std::vector<std::vector<double>> queries(256, std::vector<double>(c.building.size()));
    for (auto& q : queries)
        for (auto& v : q) v = di(rng);
    t0 = Clock::now();
    for (int i = 0; i < kLookups; ++i) sink += table.lookup(queries[static_cast<std::size_t>(i) & 255u]);
    const double per_lookup = seconds_since(t0) / kLookups;
    if (sink == -1.0) spdlog::info("unreachable");
    const double speedup = per_sim / per_lookup;
    return {speedup >= kMinSpeedup,
            fmt::format("simulate_hour {:.3f} ms, table lookup {:.3f} us, speedup {:.0f}x", per_sim * 1e3,
                        per_lookup * 1e6, speedup)};
}

Outcome ac9_physics() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> mass(300.0, 3000.0), ua(5.0, 60.0), vent(0.0, 0.02), hyst(0.2, 1.0),
        ext(-10.0, 15.0), sp(17.0, 24.0);
    double worst_conservation = 0.0, worst_band = -1e9, worst_ratio_dev = 0.0;
    int failures = 0;
    for (int i = 0; i < 100; ++i) {
        thermal::RoomParams r;
        r.air_mass = mass(rng);
        r.heat_capacity = 718.0;
        r.conductance = ua(rng);
        r.ventilation_flow = vent(rng);
        r.hysteresis = hyst(rng);
        const double t_ext = ext(rng), t_sp = sp(rng);
        // enough power to hold the band
        r.heater_power = 2.0 * r.loss_coefficient() * (t_sp + r.hysteresis - t_ext) + 200.0;
        const thermal::BuildingModel b{{r}, {"r"}};
        const double c = r.capacitance();

        // conservation and confinement over 24 constant hours starting in band
        std::vector<std::vector<double>> sched(24, {t_sp});
        const auto hours = thermal::simulate_horizon(b, sched, std::vector<double>(24, t_ext),
                                                     thermal::RoomState::uniform(1, t_sp), 60.0);
        const double eps = r.heater_power * 60.0 / c;
        for (std::size_t h = 0; h < hours.size(); ++h) {
            const auto& bal = hours[h].balance[0];
            const double scale = std::max({std::abs(bal.heater), std::abs(bal.envelope_loss) + std::abs(bal.ventilation_loss), 1.0});
            worst_conservation = std::max(
                worst_conservation, std::abs(bal.heater - bal.envelope_loss - bal.ventilation_loss - bal.stored) / scale);
            if (h == 0) continue;
            const double t = hours[h].final_state.temperatures[0];
            const double excess = std::abs(t - t_sp) - (r.hysteresis + eps);
            worst_band = std::max(worst_band, excess);
        }

        // first-order convergence with the heater pinned on or off
        const bool on = i % 2 == 0;
        const double t0 = on ? t_ext + 2.0 : t_ext + 15.0;
        const double set = on ? 1e3 : -1e3;
        const double k = r.loss_coefficient();
        const double t_inf = t_ext + (on ? r.heater_power / k : 0.0);
        const double exact = t_inf + (t0 - t_inf) * std::exp(-k * 3600.0 / c);
        const auto run = [&](double dt) {
            return thermal::simulate_hour(b, std::vector<double>{set}, t_ext, thermal::RoomState::uniform(1, t0), dt)
                .final_state.temperatures[0];
        };
        const double e60 = std::abs(run(60.0) - exact), e30 = std::abs(run(30.0) - exact);
        const double ratio = e60 / e30;
        worst_ratio_dev = std::max(worst_ratio_dev, std::abs(ratio - 2.0));
        if (!(e30 < e60)) ++failures;
    }
    const bool pass = worst_conservation <= kConservationTol && worst_band <= 0.0 && worst_ratio_dev <= 0.2 &&
                      failures == 0;
    return {pass, fmt::format("100 rooms: max conservation residual {:.2e} (relative), max excursion beyond band "
                              "{:.3e} K, max |error ratio - 2| at dt 60/30 s {:.3f}",
                              worst_conservation, worst_band, worst_ratio_dev)};
}

Outcome ac10_controller_bruteforce() {
    std::mt19937_64 rng(1010);
    std::size_t max_actions = 0;
    for (int i = 0; i < 100; ++i) {
        const auto c = test::random_controller_case(rng);
        max_actions = std::max(max_actions, c.table.grid.size());
        const auto d = control::select_action(c.table, c.pv, c.temps, c.state, c.policy);
        const auto o = oracle::brute_select(
            c.state, c.temps, c.policy.deltas, c.policy.comfort_floor, c.policy.comfort_ceiling, c.pv,
            c.policy.pv_match_band, c.policy.pv_epsilon,
            [&](const std::vector<double>& eff) { return c.table.predicted[test::delta_index(eff)]; });
        if (d.setpoints != o.setpoints || !d.predicted_kwh || *d.predicted_kwh != o.predicted)
            return {false, fmt::format("instance {} differs", i)};
    }
    return {true, fmt::format("100 instances up to {} actions, all identical", max_actions)};
}

std::vector<std::string> write_all(const ScenarioRun& run, const std::string& dir) {
    report::emit_report(run.controlled, dir);
    report::emit_report(run.baseline, dir);
    report::emit_comparison(dir + "/controlled_hourly.csv", dir + "/baseline_hourly.csv", dir);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().find("timing") == std::string::npos)
            names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

Outcome ac11_determinism(const ScenarioRun& first) {
    const auto second = run_shipped_scenario();
    test::TempDir a, b;
    const auto na = write_all(first, a.path());
    const auto nb = write_all(second, b.path());
    if (na != nb) return {false, "different file sets"};
    for (const auto& n : na)
        if (test::slurp(a.file(n)) != test::slurp(b.file(n))) return {false, fmt::format("{} differs", n)};
    return {true, fmt::format("{} report files byte-identical across two runs", na.size())};
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    int failed = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        if (!o.pass) ++failed;
        fmt::print("AC{:<2} {} {}: {}\n", id, o.pass ? "PASS" : "FAIL", name, o.detail);
        std::fflush(stdout);
    };

    report(1, "gp-oracle-equivalence", ac1_oracle_equivalence);
    report(2, "interpolation-prior-reversion", ac2_interpolation_and_reversion);
    report(3, "2d-poc-fidelity", ac3_poc);
    report(4, "corner-init-advantage", ac4_corner_advantage);
    report(5, "committee-asymptote", ac5_committee_asymptote);
    report(6, "threshold-sweep-monotonicity", ac6_sweep);
    ScenarioRun run;
    bool have_run = false;
    report(7, "scenario-direction", [&] {
        run = run_shipped_scenario();
        have_run = true;
        return ac7_scenario_direction(run);
    });
    report(8, "lookup-speedup", ac8_speedup);
    report(9, "physics-properties", ac9_physics);
    report(10, "controller-bruteforce", ac10_controller_bruteforce);
    report(11, "determinism", [&] {
        if (!have_run) return Outcome{false, "scenario run unavailable"};
        return ac11_determinism(run);
    });
    fmt::print("{} of 11 criteria passed\n", 11 - failed);
    return failed == 0 ? 0 : 1;
}
