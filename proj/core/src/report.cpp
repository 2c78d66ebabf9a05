#include "hvs/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "hvs/error.hpp"
#include "hvs/text.hpp"

namespace hvs::report {

namespace fs = std::filesystem;

namespace {

class FileWriter {
public:
    explicit FileWriter(const fs::path& path) : path_(path.string()), out_(path, std::ios::binary) {
        if (!out_) throw IoError(fmt::format("cannot open {} for writing", path_));
    }
    ~FileWriter() noexcept(false) {
        out_.flush();
        if (!out_ && std::uncaught_exceptions() == 0) throw IoError(fmt::format("write failed: {}", path_));
    }
    template <class... Args>
    void line(fmt::format_string<Args...> f, Args&&... args) {
        out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
    }
    std::ostream& raw() { return out_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

fs::path prepare(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", dir, ec.message()));
    return fs::path(dir);
}

std::vector<std::string> room_labels(const scenario::RunReport& r, std::size_t rooms) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < rooms; ++i)
        names.push_back(i < r.room_names.size() && !r.room_names[i].empty() ? r.room_names[i] : fmt::format("room{}", i));
    return names;
}

std::string join_values(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += fmt::format(",{}", x);
    return s;
}

bool occupied(const scenario::RunReport& r, const std::string& timestamp) {
    const int h = static_cast<int>(((series::parse_timestamp(timestamp) % 86400) + 86400) % 86400 / 3600);
    return h >= r.occupancy_start && h < r.occupancy_end;
}

}  // namespace

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string("undefined"); }

std::vector<std::string> emit_report(const scenario::RunReport& rep, const std::string& dir) {
    const fs::path base = prepare(dir);
    const std::size_t rooms = rep.records.empty() ? rep.room_names.size() : rep.records.front().setpoints.size();
    const auto names = room_labels(rep, rooms);
    std::vector<std::string> written;
    auto file = [&](const std::string& suffix) { return base / fmt::format("{}_{}", rep.arm, suffix); };

    {
        FileWriter w(file("hourly.csv"));
        std::string header = "timestamp,t_ext,bucket,mode";
        for (const auto& n : names) header += ",sp_" + n;
        header += ",consumed_kwh,pv_kwh,exported_kwh,imported_kwh";
        for (const auto& n : names) header += ",temp_" + n;
        header += ",new_model,cum_sims";
        w.line("{}", header);
        for (const auto& r : rep.records)
            w.line("{},{},{},{}{},{},{},{},{}{},{},{}", r.timestamp, r.t_ext, r.bucket.celsius(), r.mode,
                   join_values(r.setpoints), r.consumed_kwh, r.pv_kwh, r.exported_kwh, r.imported_kwh,
                   join_values(r.room_temps), r.new_model ? 1 : 0, r.cum_sims);
        written.push_back(w.path());
    }
    {
        FileWriter w(file("temperature.csv"));
        w.line("timestamp,t_ext,bucket");
        for (const auto& r : rep.records) w.line("{},{},{}", r.timestamp, r.t_ext, r.bucket.celsius());
        written.push_back(w.path());
    }
    {
        FileWriter w(file("models.csv"));
        w.line("hour,timestamp,models,cum_sims,new_model");
        for (std::size_t h = 0; h < rep.records.size(); ++h) {
            const auto& r = rep.records[h];
            w.line("{},{},{},{},{}", h, r.timestamp, r.cum_models, r.cum_sims, r.new_model ? 1 : 0);
        }
        written.push_back(w.path());
    }
    {
        FileWriter w(file("energy.csv"));
        w.line("timestamp,pv_kwh,consumed_kwh,predicted_kwh,exported_kwh,imported_kwh");
        for (const auto& r : rep.records)
            w.line("{},{},{},{},{},{}", r.timestamp, r.pv_kwh, r.consumed_kwh,
                   r.predicted_kwh ? fmt::format("{}", *r.predicted_kwh) : std::string(), r.exported_kwh,
                   r.imported_kwh);
        written.push_back(w.path());
    }
    {
        FileWriter w(file("setpoints.csv"));
        std::string header = "timestamp,mode";
        for (const auto& n : names) header += ",sp_" + n;
        for (const auto& n : names) header += ",temp_" + n;
        w.line("{}", header);
        for (const auto& r : rep.records)
            w.line("{},{}{}{}", r.timestamp, r.mode, join_values(r.setpoints), join_values(r.room_temps));
        written.push_back(w.path());
    }
    {
        const auto s = metrics::summarize(rep.ledger);
        std::size_t occupied_hours = 0, below_floor = 0, early_models = 0;
        double min_temp = 0.0;
        bool have_min = false;
        const std::size_t cutoff = rep.records.size() / 5;
        for (std::size_t h = 0; h < rep.records.size(); ++h) {
            const auto& r = rep.records[h];
            if (r.new_model && h < cutoff) ++early_models;
            if (!occupied(rep, r.timestamp)) continue;
            ++occupied_hours;
            for (double t : r.room_temps) {
                if (t < rep.comfort_floor) ++below_floor;
                if (!have_min || t < min_temp) min_temp = t;
                have_min = true;
            }
        }
        FileWriter w(file("summary.txt"));
        w.line("arm = {}", rep.arm);
        w.line("hours = {}", rep.records.size());
        w.line("start = {}", rep.records.empty() ? "" : rep.records.front().timestamp);
        w.line("end = {}", rep.records.empty() ? "" : rep.records.back().timestamp);
        w.line("total_consumed_kwh = {}", s.total_consumed);
        w.line("total_pv_kwh = {}", s.total_produced);
        w.line("total_exported_kwh = {}", s.total_exported);
        w.line("total_imported_kwh = {}", s.total_imported);
        w.line("scr_window = {}", fmt_opt(s.scr));
        w.line("ssr_window = {}", fmt_opt(s.ssr));
        w.line("scr_mean_hourly = {}", fmt_opt(s.mean_hourly_scr));
        w.line("ssr_mean_hourly = {}", fmt_opt(s.mean_hourly_ssr));
        w.line("models_created = {}", rep.committee.models_created);
        w.line("total_simulations = {}", rep.committee.total_simulations);
        w.line("simulations_per_model = {}",
               rep.committee.models_created == 0
                   ? std::string("undefined")
                   : fmt::format("{}", static_cast<double>(rep.committee.total_simulations) /
                                           static_cast<double>(rep.committee.models_created)));
        w.line("models_in_first_fifth = {}", early_models);
        w.line("occupied_hours = {}", occupied_hours);
        w.line("occupied_room_hours_below_floor = {}", below_floor);
        w.line("min_occupied_room_temp_c = {}", have_min ? fmt::format("{}", min_temp) : std::string("undefined"));
        written.push_back(w.path());
    }
    {
        const auto& t = rep.timings;
        auto mean = [](double total, std::size_t n) {
            return n == 0 ? std::string("undefined") : fmt::format("{:.6g}", total / static_cast<double>(n));
        };
        FileWriter w(file("timing.txt"));
        w.line("# wall clock, varies between runs");
        w.line("training_s = {:.6g}", t.training_s);
        w.line("training_simulations = {}", t.training_simulations);
        w.line("s_per_training_simulation = {}", mean(t.training_s, t.training_simulations));
        w.line("surrogate_decisions = {}", t.decisions);
        w.line("s_per_surrogate_decision = {}", mean(t.decision_s, t.decisions));
        w.line("executions = {}", t.executions);
        w.line("s_per_execution = {}", mean(t.execution_s, t.executions));
        written.push_back(w.path());
    }
    return written;
}

HourlyTable read_hourly_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open {}", path));
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> col;
    std::size_t ncols = 0;
    HourlyTable t;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const auto f = text::split(line, ',');
        if (col.empty()) {
            for (std::size_t i = 0; i < f.size(); ++i) col[text::trim(f[i])] = i;
            ncols = f.size();
            for (const char* need : {"timestamp", "mode", "consumed_kwh", "pv_kwh"})
                if (!col.count(need)) throw ParseError(path, lineno, fmt::format("missing column `{}`", need));
            continue;
        }
        if (f.size() != ncols) throw ParseError(path, lineno, fmt::format("expected {} fields, got {}", ncols, f.size()));
        const std::string stamp = text::trim(f[col["timestamp"]]);
        std::int64_t epoch = 0;
        try {
            epoch = series::parse_timestamp(stamp);
        } catch (const InputError&) {
            throw ParseError(path, lineno, fmt::format("bad timestamp `{}`", stamp));
        }
        t.timestamps.push_back(stamp);
        t.hours_of_day.push_back(static_cast<int>(((epoch % 86400) + 86400) % 86400 / 3600));
        t.modes.push_back(text::trim(f[col["mode"]]));
        t.ledger.add(text::parse_double(f[col["pv_kwh"]], path, lineno),
                     text::parse_double(f[col["consumed_kwh"]], path, lineno));
    }
    if (col.empty()) throw ParseError(path, lineno, "empty file");
    return t;
}

std::string format_comparison(const metrics::ComparisonSummary& c) {
    std::string s;
    auto row = [&](const char* name, const std::string& a, const std::string& b, const std::string& d) {
        s += fmt::format("{:<26}{:>14}{:>14}{:>12}\n", name, a, b, d);
    };
    auto num = [](const std::optional<double>& v, const char* spec) {
        return v ? fmt::format(fmt::runtime(spec), *v) : std::string("undefined");
    };
    row("", "controlled", "baseline", "delta %");
    row("consumption [kWh]", num(c.controlled.total_consumed, "{:.2f}"), num(c.baseline.total_consumed, "{:.2f}"),
        num(c.consumption_delta_pct, "{:+.2f}"));
    row("imported [kWh]", num(c.controlled.total_imported, "{:.2f}"), num(c.baseline.total_imported, "{:.2f}"), "");
    row("exported [kWh]", num(c.controlled.total_exported, "{:.2f}"), num(c.baseline.total_exported, "{:.2f}"), "");
    row("SCR (window)", num(c.controlled.scr, "{:.4f}"), num(c.baseline.scr, "{:.4f}"), num(c.scr_delta_pct, "{:+.2f}"));
    row("SSR (window)", num(c.controlled.ssr, "{:.4f}"), num(c.baseline.ssr, "{:.4f}"), num(c.ssr_delta_pct, "{:+.2f}"));
    row("SCR (mean hourly)", num(c.controlled.mean_hourly_scr, "{:.4f}"), num(c.baseline.mean_hourly_scr, "{:.4f}"),
        num(c.mean_hourly_scr_delta_pct, "{:+.2f}"));
    row("SSR (mean hourly)", num(c.controlled.mean_hourly_ssr, "{:.4f}"), num(c.baseline.mean_hourly_ssr, "{:.4f}"),
        num(c.mean_hourly_ssr_delta_pct, "{:+.2f}"));
    return s;
}

metrics::ComparisonSummary emit_comparison(const std::string& controlled_csv, const std::string& baseline_csv,
                                           const std::string& dir) {
    const HourlyTable a = read_hourly_csv(controlled_csv);
    const HourlyTable b = read_hourly_csv(baseline_csv);
    if (a.timestamps != b.timestamps)
        throw InputError(fmt::format("{} and {} cover different hours", controlled_csv, baseline_csv));
    const metrics::ComparisonSummary c = metrics::compare(a.ledger, b.ledger);

    const fs::path base = prepare(dir);
    {
        FileWriter w(base / "comparison_summary.txt");
        w.line("hours = {}", a.timestamps.size());
        auto arm = [&](const char* name, const metrics::ArmSummary& s) {
            w.line("{}_total_consumed_kwh = {}", name, s.total_consumed);
            w.line("{}_total_pv_kwh = {}", name, s.total_produced);
            w.line("{}_total_exported_kwh = {}", name, s.total_exported);
            w.line("{}_total_imported_kwh = {}", name, s.total_imported);
            w.line("{}_scr_window = {}", name, fmt_opt(s.scr));
            w.line("{}_ssr_window = {}", name, fmt_opt(s.ssr));
            w.line("{}_scr_mean_hourly = {}", name, fmt_opt(s.mean_hourly_scr));
            w.line("{}_ssr_mean_hourly = {}", name, fmt_opt(s.mean_hourly_ssr));
        };
        arm("controlled", c.controlled);
        arm("baseline", c.baseline);
        w.line("consumption_delta_pct = {}", fmt_opt(c.consumption_delta_pct));
        w.line("scr_window_delta_pct = {}", fmt_opt(c.scr_delta_pct));
        w.line("ssr_window_delta_pct = {}", fmt_opt(c.ssr_delta_pct));
        w.line("scr_mean_hourly_delta_pct = {}", fmt_opt(c.mean_hourly_scr_delta_pct));
        w.line("ssr_mean_hourly_delta_pct = {}", fmt_opt(c.mean_hourly_ssr_delta_pct));
    }
    {
        FileWriter w(base / "hourly_ratios.csv");
        w.line("timestamp,controlled_scr,baseline_scr,controlled_ssr,baseline_ssr");
        for (std::size_t i = 0; i < a.timestamps.size(); ++i) {
            const auto& x = a.ledger[i];
            const auto& y = b.ledger[i];
            if (!(x.produced > 0.0)) continue;
            auto ratio = [](double num, double den) {
                return den > 0.0 ? fmt::format("{}", num / den) : std::string("1");
            };
            w.line("{},{},{},{},{}", a.timestamps[i], ratio(x.self_consumed(), x.produced),
                   ratio(y.self_consumed(), y.produced), ratio(x.self_consumed(), x.consumed),
                   ratio(y.self_consumed(), y.consumed));
        }
    }
    return c;
}

std::string emit_sweep(const std::vector<scenario::SweepRow>& rows, const std::string& dir) {
    const fs::path base = prepare(dir);
    FileWriter w(base / "threshold_sweep.csv");
    w.line("threshold,models,total_simulations,wall_seconds,all_converged,max_abs_error_kwh,max_rel_error");
    for (const auto& r : rows)
        w.line("{},{},{},{:.6f},{},{},{}", r.threshold, r.models, r.total_simulations, r.wall_seconds,
               r.all_converged ? 1 : 0, r.max_abs_error_kwh, r.max_rel_error);
    return w.path();
}

namespace {

void write_poc_arm(const scenario::PocArm& a, const fs::path& csv, const fs::path& table) {
    FileWriter w(csv);
    std::string header = "grid_index";
    const std::size_t d = a.table.grid.dims();
    const char* names[] = {"voltage", "ambient_k"};
    for (std::size_t i = 0; i < d; ++i) header += fmt::format(",{}", i < 2 ? names[i] : "x");
    header += ",exhaustive_current,surrogate_current,rel_error,sampled";
    w.line("{}", header);
    std::vector<bool> sampled(a.table.grid.size(), false);
    for (std::size_t i : a.table.training_indices) sampled[i] = true;
    for (std::size_t i = 0; i < a.table.grid.size(); ++i) {
        const double rel = std::abs(a.table.predicted[i] - a.exhaustive[i]) / std::abs(a.exhaustive[i]);
        w.line("{}{},{},{},{},{}", i, join_values(a.table.grid.point(i)), a.exhaustive[i], a.table.predicted[i], rel,
               sampled[i] ? 1 : 0);
    }
    learn::save_table(table.string(), a.table);
}

}  // namespace

std::vector<std::string> emit_poc(const scenario::PocResult& r, const std::string& dir) {
    const fs::path base = prepare(dir);
    write_poc_arm(r.one_d, base / "poc_1d.csv", base / "poc_1d.table");
    write_poc_arm(r.two_d, base / "poc_2d.csv", base / "poc_2d.table");
    {
        FileWriter w(base / "poc_summary.txt");
        auto arm = [&](const char* name, const scenario::PocArm& a) {
            w.line("{}_grid_points = {}", name, a.table.grid.size());
            w.line("{}_simulations = {}", name, a.table.simulation_count);
            w.line("{}_iterations = {}", name, a.table.iteration_count);
            w.line("{}_converged = {}", name, a.table.converged ? 1 : 0);
            w.line("{}_final_max_std = {}", name, a.table.final_max_std);
            w.line("{}_max_rel_error = {}", name, a.max_rel_error);
            w.line("{}_mean_rel_error = {}", name, a.mean_rel_error);
        };
        arm("one_d", r.one_d);
        arm("two_d", r.two_d);
    }
    return {(base / "poc_1d.csv").string(), (base / "poc_2d.csv").string(), (base / "poc_1d.table").string(),
            (base / "poc_2d.table").string(), (base / "poc_summary.txt").string()};
}

std::vector<std::string> emit_monolithic(const scenario::MonolithicResult& r, const std::string& dir) {
    const fs::path base = prepare(dir);
    learn::save_table((base / "monolithic.table").string(), r.corner_table);
    const auto& c = r.comparison;
    {
        FileWriter w(base / "init_comparison.csv");
        w.line("strategy,seed,iterations,simulations");
        w.line("corners,,{},{}", c.corner_iterations, c.corner_simulations);
        for (std::size_t i = 0; i < c.seeds.size(); ++i)
            w.line("random,{},{},{}", c.seeds[i], c.random_iterations[i], c.random_simulations[i]);
    }
    {
        FileWriter w(base / "monolithic_summary.txt");
        const auto& t = r.corner_table;
        w.line("grid_points = {}", t.grid.size());
        w.line("initial_design_size = {}", t.initial_design_size);
        w.line("corner_iterations = {}", c.corner_iterations);
        w.line("corner_simulations = {}", c.corner_simulations);
        w.line("simulated_fraction = {}", static_cast<double>(t.simulation_count) / static_cast<double>(t.grid.size()));
        w.line("random_median_iterations = {}", c.random_median_iterations);
        w.line("converged = {}", t.converged ? 1 : 0);
        w.line("final_max_std = {}", t.final_max_std);
    }
    return {(base / "monolithic.table").string(), (base / "init_comparison.csv").string(),
            (base / "monolithic_summary.txt").string()};
}

}  // namespace hvs::report
