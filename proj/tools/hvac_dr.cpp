// hvac-dr: surrogate-driven setpoint scheduling experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hvs/config.hpp"
#include "hvs/error.hpp"
#include "hvs/report.hpp"
#include "hvs/scenario.hpp"
#include "hvs/series.hpp"

namespace fs = std::filesystem;
using namespace hvs;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int verbosity = 0;
    bool quiet = false;
};

config::AppConfig resolve(const Common& c, const std::string& command) {
    config::AppConfig cfg =
        c.config_path.empty() ? config::default_config(c.overrides) : config::load_config(c.config_path, c.overrides);
    if (c.seed) cfg.scenario.seed = *c.seed;
    cfg.validate();
    const std::string ini = config::to_ini(cfg);
    spdlog::info("{}: effective configuration{}\n{}", command,
                 cfg.source.empty() ? std::string(" (built-in defaults)") : fmt::format(" from {}", cfg.source), ini);
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", c.out_dir, ec.message()));
    const fs::path p = fs::path(c.out_dir) / fmt::format("{}_config.ini", command);
    std::ofstream f(p, std::ios::binary);
    if (!(f << ini)) throw IoError(fmt::format("cannot write {}", p.string()));
    return cfg;
}

struct Inputs {
    series::WeatherSeries weather;
    series::PvSeries pv;
};

Inputs load_inputs(const config::AppConfig& cfg, const std::string& weather_flag, const std::string& pv_flag) {
    const std::string wf = weather_flag.empty() ? cfg.scenario.weather_file : weather_flag;
    const std::string pf = pv_flag.empty() ? cfg.scenario.pv_file : pv_flag;
    if (wf.empty()) throw InputError("no weather file: pass --weather or set scenario.weather");
    if (pf.empty()) throw InputError("no PV file: pass --pv or set scenario.pv");
    Inputs in;
    auto [w, p] = scenario::apply_horizon(cfg, series::load_weather(wf), series::load_pv(pf));
    in.weather = std::move(w);
    in.pv = std::move(p);
    spdlog::info("inputs: {} hours from {} to {}", in.weather.size(), in.weather.timestamps.front(),
                 in.weather.timestamps.back());
    return in;
}

void print_files(const std::vector<std::string>& files) {
    for (const auto& f : files) fmt::print("  wrote {}\n", f);
}

void run_arm(const Common& common, const std::string& weather, const std::string& pv, bool allow_unconverged,
             bool controlled) {
    const std::string cmd = controlled ? "run-scenario" : "baseline";
    const auto cfg = resolve(common, cmd);
    const auto in = load_inputs(cfg, weather, pv);
    scenario::RunOptions opt;
    opt.allow_unconverged = allow_unconverged;
    opt.on_hour = [](const scenario::HourlyRecord& r) {
        if (r.new_model) spdlog::info("{}: new model for {} degC, {} simulations so far", r.timestamp, r.bucket.celsius(), r.cum_sims);
        spdlog::debug("{} {} consumed {:.3f} kWh, pv {:.3f} kWh", r.timestamp, r.mode, r.consumed_kwh, r.pv_kwh);
    };
    scenario::RunReport partial;
    scenario::RunReport rep;
    try {
        rep = controlled ? scenario::run_controlled(cfg, in.weather, in.pv, opt, &partial)
                         : scenario::run_baseline(cfg, in.weather, in.pv, opt, &partial);
    } catch (const Error&) {
        const std::string dir = (fs::path(common.out_dir) / "partial").string();
        report::emit_report(partial, dir);
        spdlog::error("run aborted after {} hours; partial report in {}", partial.records.size(), dir);
        throw;
    }
    print_files(report::emit_report(rep, common.out_dir));
    const auto s = metrics::summarize(rep.ledger);
    fmt::print("{}: {} h, consumption {:.2f} kWh, SCR {}, SSR {}, models {}, simulations {}\n", rep.arm,
               rep.records.size(), s.total_consumed, report::fmt_opt(s.scr), report::fmt_opt(s.ssr),
               rep.committee.models_created, rep.committee.total_simulations);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-learning surrogates for HVAC demand response"};
    app.require_subcommand(1);
    Common common;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config_path, "INI configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", common.overrides, "Override a config value, section.key=value (repeatable)");
        sub->add_option("-o,--out", common.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", common.seed, "Random seed (overrides scenario.seed)");
        sub->add_flag("-v,--verbose", common.verbosity, "More logging (repeat for debug)");
        sub->add_flag("-q,--quiet", common.quiet, "Only log warnings and errors");
    };

    auto* poc = app.add_subcommand("poc-resistor", "Learn the self-heating resistor current in 1-D and 2-D");
    add_common(poc);
    std::optional<double> poc_threshold;
    poc->add_option("--threshold", poc_threshold, "Posterior std threshold (overrides poc.std_threshold)")
        ->check(CLI::PositiveNumber);

    auto* mono = app.add_subcommand("train-monolithic", "Train one surrogate over setpoint deltas and external temperature");
    add_common(mono);

    std::string weather, pv;
    bool allow_unconverged = false;
    auto* run = app.add_subcommand("run-scenario", "Committee-driven controlled run over the weather file");
    auto* base = app.add_subcommand("baseline", "Fixed-setpoint reference run over the weather file");
    for (auto* sub : {run, base}) {
        add_common(sub);
        sub->add_option("--weather", weather, "Weather CSV (overrides scenario.weather)")->check(CLI::ExistingFile);
        sub->add_option("--pv", pv, "PV CSV (overrides scenario.pv)")->check(CLI::ExistingFile);
    }
    run->add_flag("--allow-unconverged", allow_unconverged, "Use surrogate tables that did not reach the threshold");

    auto* sweep = app.add_subcommand("sweep-threshold", "Committee training cost against the std threshold");
    add_common(sweep);
    std::vector<double> thresholds{0.01, 0.02, 0.03, 0.05};
    std::size_t repeats = 1;
    bool no_grid_error = false;
    sweep->add_option("thresholds", thresholds, "Thresholds to evaluate")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--weather", weather, "Weather CSV (overrides scenario.weather)")->check(CLI::ExistingFile);
    sweep->add_option("--repeats", repeats, "Timing repeats per threshold (minimum is kept)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_flag("--no-grid-error", no_grid_error, "Skip the exhaustive grid error evaluation");

    auto* rep = app.add_subcommand("report", "Compare a controlled and a baseline run");
    add_common(rep);
    std::string controlled_csv, baseline_csv;
    rep->add_option("--controlled", controlled_csv, "Controlled hourly CSV (default <out>/controlled_hourly.csv)");
    rep->add_option("--baseline", baseline_csv, "Baseline hourly CSV (default <out>/baseline_hourly.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    spdlog::set_default_logger(spdlog::stderr_color_st("hvac-dr"));
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(common.quiet            ? spdlog::level::warn
                      : common.verbosity >= 2 ? spdlog::level::trace
                      : common.verbosity == 1 ? spdlog::level::debug
                                              : spdlog::level::info);

    try {
        if (*poc) {
            const auto cfg = resolve(common, "poc-resistor");
            const auto r = scenario::run_poc(cfg.poc, cfg.scenario.seed, poc_threshold);
            print_files(report::emit_poc(r, common.out_dir));
            fmt::print("1-D: {} of {} points simulated, max relative error {:.3f}%\n", r.one_d.table.simulation_count,
                       r.one_d.table.grid.size(), 100.0 * r.one_d.max_rel_error);
            fmt::print("2-D: {} of {} points simulated, max relative error {:.3f}%\n", r.two_d.table.simulation_count,
                       r.two_d.table.grid.size(), 100.0 * r.two_d.max_rel_error);
        } else if (*mono) {
            const auto cfg = resolve(common, "train-monolithic");
            const auto r = scenario::run_monolithic(cfg, cfg.scenario.seed);
            print_files(report::emit_monolithic(r, common.out_dir));
            const auto& t = r.corner_table;
            fmt::print("grid {} points, corner design {}, simulations {} ({:.2f}% of grid)\n", t.grid.size(),
                       t.initial_design_size, t.simulation_count,
                       100.0 * static_cast<double>(t.simulation_count) / static_cast<double>(t.grid.size()));
            fmt::print("iterations: corners {}, random median {}\n", r.comparison.corner_iterations,
                       r.comparison.random_median_iterations);
        } else if (*run) {
            run_arm(common, weather, pv, allow_unconverged, true);
        } else if (*base) {
            run_arm(common, weather, pv, false, false);
        } else if (*sweep) {
            if (thresholds.size() < 2) spdlog::warn("sweep with a single threshold");
            const auto cfg = resolve(common, "sweep-threshold");
            const std::string wf = weather.empty() ? cfg.scenario.weather_file : weather;
            if (wf.empty()) throw InputError("no weather file: pass --weather or set scenario.weather");
            auto w = series::load_weather(wf);
            if (cfg.scenario.horizon_hours > 0) w = w.head(std::min(cfg.scenario.horizon_hours, w.size()));
            scenario::SweepOptions opt;
            opt.repeats = repeats;
            opt.grid_error = !no_grid_error;
            const auto rows = scenario::sweep_threshold(cfg, w, thresholds, opt);
            fmt::print("  wrote {}\n", report::emit_sweep(rows, common.out_dir));
            fmt::print("{:>10}{:>8}{:>13}{:>11}{:>16}{:>14}\n", "threshold", "models", "simulations", "seconds",
                       "max_err_kwh", "max_rel_err");
            for (const auto& r : rows)
                fmt::print("{:>10}{:>8}{:>13}{:>11.3f}{:>16.5f}{:>14.5f}\n", r.threshold, r.models,
                           r.total_simulations, r.wall_seconds, r.max_abs_error_kwh, r.max_rel_error);
        } else if (*rep) {
            resolve(common, "report");
            const std::string a =
                controlled_csv.empty() ? (fs::path(common.out_dir) / "controlled_hourly.csv").string() : controlled_csv;
            const std::string b =
                baseline_csv.empty() ? (fs::path(common.out_dir) / "baseline_hourly.csv").string() : baseline_csv;
            const auto c = report::emit_comparison(a, b, common.out_dir);
            fmt::print("{}", report::format_comparison(c));
            fmt::print("  wrote {}\n  wrote {}\n", (fs::path(common.out_dir) / "comparison_summary.txt").string(),
                       (fs::path(common.out_dir) / "hourly_ratios.csv").string());
        }
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const NumericalError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const IoError& e) {
        spdlog::error("{}", e.what());
        return 3;
    } catch (const std::exception& e) {
        spdlog::critical("internal error: {}", e.what());
        return 2;
    }
    return 0;
}
