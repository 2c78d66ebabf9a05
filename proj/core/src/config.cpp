#include "hvs/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "hvs/error.hpp"
#include "hvs/text.hpp"

namespace hvs::config {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

namespace {

constexpr double kAirDensity = 1.2;  // kg/m3
constexpr const char* kRoomPrefix = "room:";

thermal::RoomParams make_room(double air_mass, double ua, double vent, double heater) {
    thermal::RoomParams r;
    r.air_mass = air_mass;
    r.conductance = ua;
    r.ventilation_flow = vent;
    r.heater_power = heater;
    return r;
}

/// Typed access to one INI section that remembers which keys were read.
class Section {
public:
    Section(const pt::ptree& tree, std::string name, std::string source)
        : tree_(tree), name_(std::move(name)), source_(std::move(source)) {}

    bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

    double number(const std::string& key, double fallback) {
        used_.insert(key);
        auto it = tree_.find(key);
        if (it == tree_.not_found()) return fallback;
        return parse(key, it->second.data(), [&](const std::string& v) { return text::parse_double(v, where(key), 0); });
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        used_.insert(key);
        auto it = tree_.find(key);
        if (it == tree_.not_found()) return fallback;
        return parse(key, it->second.data(), [&](const std::string& v) { return text::parse_int(v, where(key), 0); });
    }

    std::string string(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        auto it = tree_.find(key);
        return it == tree_.not_found() ? fallback : text::trim(it->second.data());
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
        used_.insert(key);
        auto it = tree_.find(key);
        if (it == tree_.not_found()) return fallback;
        return parse(key, it->second.data(), [&](const std::string& v) { return text::parse_doubles(v, where(key), 0); });
    }

    void reject_unknown() const {
        for (const auto& [key, _] : tree_)
            if (!used_.count(key)) throw InputError(fmt::format("{}: unknown key `{}.{}`", source_, name_, key));
    }

private:
    std::string where(const std::string& key) const { return fmt::format("{} [{}] {}", source_, name_, key); }

    template <class F>
    auto parse(const std::string& key, const std::string& raw, F f) -> decltype(f(std::string{})) {
        try {
            return f(text::trim(raw));
        } catch (const ParseError&) {
            throw InputError(fmt::format("{}: bad value `{}` for `{}.{}`", source_, raw, name_, key));
        }
    }

    const pt::ptree& tree_;
    std::string name_;
    std::string source_;
    std::set<std::string> used_;
};

std::size_t as_size(std::int64_t v, const std::string& what) {
    if (v < 0) throw InputError(fmt::format("{} must be >= 0", what));
    return static_cast<std::size_t>(v);
}

void apply_overrides(pt::ptree& tree, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw InputError(fmt::format("override `{}` is not section.key=value", o));
        const std::string path = text::trim(o.substr(0, eq));
        const auto dot = path.rfind('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
            throw InputError(fmt::format("override `{}` is not section.key=value", o));
        // ptree paths split on '.', so address the section and key separately.
        const pt::ptree::path_type section_path(path.substr(0, dot), '\0');
        auto existing = tree.get_child_optional(section_path);
        if (!existing && path.rfind(kRoomPrefix, 0) == 0)
            throw InputError(fmt::format("override `{}` names a room that is not configured", o));
        pt::ptree& section = existing ? *existing : tree.put_child(section_path, pt::ptree{});
        section.put(pt::ptree::path_type(path.substr(dot + 1), '\0'), text::trim(o.substr(eq + 1)));
    }
}

AppConfig from_tree(const pt::ptree& tree, const std::string& source) {
    AppConfig c = default_config();
    c.source = source;
    static const pt::ptree empty;
    auto child = [&](const char* name) -> const pt::ptree& {
        auto it = tree.find(name);
        return it == tree.not_found() ? empty : it->second;
    };

    for (const auto& [name, sub] : tree) {
        static const std::set<std::string> known{"building", "policy", "learner", "scenario", "monolithic", "poc"};
        if (!known.count(name) && name.rfind(kRoomPrefix, 0) != 0)
            throw InputError(fmt::format("{}: unknown section [{}]", source, name));
    }

    {
        Section s(child("building"), "building", source);
        c.timestep = s.number("timestep_s", c.timestep);
        s.reject_unknown();
    }

    thermal::BuildingModel parsed;
    for (const auto& [name, sub] : tree) {
        if (name.rfind(kRoomPrefix, 0) != 0) continue;
        Section s(sub, name, source);
        thermal::RoomParams r;
        r.heat_capacity = s.number("c_v", r.heat_capacity);
        if (s.has("air_mass_kg")) {
            r.air_mass = s.number("air_mass_kg", 0.0);
        } else {
            r.air_mass = s.number("volume_m3", 0.0) * kAirDensity * s.number("mass_factor", 1.0);
        }
        if (s.has("ua_w_per_k")) {
            r.conductance = s.number("ua_w_per_k", 0.0);
        } else {
            r.conductance = s.number("h_c_w_per_m2k", 0.0) * s.number("area_m2", 0.0);
        }
        r.ventilation_flow = s.number("ventilation_kg_s", 0.0);
        r.heater_power = s.number("heater_w", 0.0);
        r.hysteresis = s.number("hysteresis_k", r.hysteresis);
        s.reject_unknown();
        parsed.rooms.push_back(r);
        parsed.names.push_back(name.substr(std::string(kRoomPrefix).size()));
    }
    if (!parsed.rooms.empty()) c.building = std::move(parsed);

    {
        Section s(child("policy"), "policy", source);
        auto& p = c.policy;
        p.comfort_floor = s.number("comfort_floor_c", p.comfort_floor);
        p.comfort_ceiling = s.number("comfort_ceiling_c", p.comfort_ceiling);
        p.night_setpoint = s.number("night_setpoint_c", p.night_setpoint);
        p.preheat_hour = static_cast<int>(s.integer("preheat_hour", p.preheat_hour));
        p.occupancy_start = static_cast<int>(s.integer("occupancy_start", p.occupancy_start));
        p.occupancy_end = static_cast<int>(s.integer("occupancy_end", p.occupancy_end));
        p.pv_match_band = s.number("pv_match_band", p.pv_match_band);
        p.pv_epsilon = s.number("pv_epsilon_kwh", p.pv_epsilon);
        p.preheat_boost = s.number("preheat_boost_k", p.preheat_boost);
        p.deltas = s.numbers("deltas", p.deltas);
        s.reject_unknown();
    }
    {
        Section s(child("learner"), "learner", source);
        auto& l = c.learner;
        l.std_threshold = s.number("std_threshold", l.std_threshold);
        l.lengthscale.value = s.number("lengthscale", l.lengthscale.value);
        const std::string policy = s.string("lengthscale_policy", "fixed");
        if (policy == "fixed") {
            l.lengthscale.kind = gp::LengthscalePolicy::Kind::fixed;
        } else if (policy == "marginal_likelihood") {
            l.lengthscale.kind = gp::LengthscalePolicy::Kind::marginal_likelihood;
        } else {
            throw InputError(fmt::format("{}: learner.lengthscale_policy must be fixed or marginal_likelihood", source));
        }
        l.lengthscale.candidates = s.numbers("lengthscale_candidates", l.lengthscale.candidates);
        l.jitter = s.number("jitter", l.jitter);
        l.max_jitter = s.number("max_jitter", l.max_jitter);
        const auto max_it = s.integer("max_iterations", 0);
        if (max_it > 0) l.max_iterations = static_cast<std::size_t>(max_it);
        s.reject_unknown();
    }
    {
        Section s(child("scenario"), "scenario", source);
        auto& sc = c.scenario;
        sc.baseline_setpoint = s.number("baseline_setpoint_c", sc.baseline_setpoint);
        sc.surrogate_base = s.number("surrogate_base_c", sc.surrogate_base);
        sc.horizon_hours = as_size(s.integer("horizon_hours", 0), "scenario.horizon_hours");
        const auto seed = s.integer("seed", static_cast<std::int64_t>(sc.seed));
        sc.seed = static_cast<std::uint64_t>(seed);
        sc.weather_file = s.string("weather", "");
        sc.pv_file = s.string("pv", "");
        if (!source.empty()) {
            const fs::path base = fs::path(source).parent_path();
            if (!sc.weather_file.empty() && fs::path(sc.weather_file).is_relative())
                sc.weather_file = (base / sc.weather_file).lexically_normal().string();
            if (!sc.pv_file.empty() && fs::path(sc.pv_file).is_relative())
                sc.pv_file = (base / sc.pv_file).lexically_normal().string();
        }
        s.reject_unknown();
    }
    {
        Section s(child("monolithic"), "monolithic", source);
        auto& m = c.monolithic;
        m.t_ext_min = s.number("t_ext_min_c", m.t_ext_min);
        m.t_ext_max = s.number("t_ext_max_c", m.t_ext_max);
        m.t_ext_step = s.number("t_ext_step_k", m.t_ext_step);
        m.random_seeds = as_size(s.integer("random_seeds", static_cast<std::int64_t>(m.random_seeds)),
                                 "monolithic.random_seeds");
        s.reject_unknown();
    }
    {
        Section s(child("poc"), "poc", source);
        auto& p = c.poc;
        p.resistor.resistance = s.number("resistance_ohm", p.resistor.resistance);
        p.resistor.temp_coefficient = s.number("temp_coefficient", p.resistor.temp_coefficient);
        p.resistor.reference_temp = s.number("reference_temp_k", p.resistor.reference_temp);
        p.resistor.thermal_resistance = s.number("thermal_resistance_k_per_w", p.resistor.thermal_resistance);
        p.v_min = s.number("v_min", p.v_min);
        p.v_max = s.number("v_max", p.v_max);
        p.v_min_1d = s.number("v_min_1d", p.v_min_1d);
        p.v_points_1d = as_size(s.integer("v_points_1d", static_cast<std::int64_t>(p.v_points_1d)), "poc.v_points_1d");
        p.ambient_1d = s.number("ambient_1d_k", p.ambient_1d);
        p.v_points_2d = as_size(s.integer("v_points_2d", static_cast<std::int64_t>(p.v_points_2d)), "poc.v_points_2d");
        p.ambient_min = s.number("ambient_min_k", p.ambient_min);
        p.ambient_max = s.number("ambient_max_k", p.ambient_max);
        p.ambient_points =
            as_size(s.integer("ambient_points", static_cast<std::int64_t>(p.ambient_points)), "poc.ambient_points");
        p.random_init_1d =
            as_size(s.integer("random_init_1d", static_cast<std::int64_t>(p.random_init_1d)), "poc.random_init_1d");
        p.random_init_2d =
            as_size(s.integer("random_init_2d", static_cast<std::int64_t>(p.random_init_2d)), "poc.random_init_2d");
        p.std_threshold = s.number("std_threshold", p.std_threshold);
        p.lengthscale = s.number("lengthscale", p.lengthscale);
        s.reject_unknown();
    }
    c.validate();
    return c;
}

}  // namespace

void AppConfig::validate() const {
    building.validate();
    if (!(timestep > 0.0)) throw InvalidParamsError("building.timestep_s must be > 0");
    policy.validate();
    learner.validate();
    if (!(monolithic.t_ext_step > 0.0) || !(monolithic.t_ext_max > monolithic.t_ext_min))
        throw InvalidParamsError("monolithic: need t_ext_min < t_ext_max and t_ext_step > 0");
    if (monolithic.random_seeds == 0) throw InvalidParamsError("monolithic.random_seeds must be >= 1");
    poc.resistor.validate();
    if (!(poc.v_max > poc.v_min && poc.v_min > 0.0 && poc.v_min_1d > 0.0 && poc.v_max > poc.v_min_1d))
        throw InvalidParamsError("poc: need 0 < v_min < v_max and 0 < v_min_1d < v_max");
    if (poc.v_points_1d < 4 || poc.v_points_2d < 2 || poc.ambient_points < 2)
        throw InvalidParamsError("poc: grids need at least 4 points in 1-D and 2 per axis in 2-D");
    if (!(poc.ambient_max > poc.ambient_min && poc.ambient_min > 0.0))
        throw InvalidParamsError("poc: need 0 < ambient_min_k < ambient_max_k");
    if (!(poc.std_threshold > 0.0) || !(poc.lengthscale > 0.0))
        throw InvalidParamsError("poc: std_threshold and lengthscale must be > 0");
}

thermal::BuildingModel default_building() {
    thermal::BuildingModel b;
    b.rooms = {
        make_room(900.0, 30.0, 0.010, 3000.0),  //
        make_room(600.0, 22.0, 0.008, 2500.0),  //
        make_room(420.0, 15.0, 0.005, 2000.0),  //
        make_room(420.0, 15.0, 0.005, 2000.0),  //
        make_room(700.0, 25.0, 0.009, 2500.0),  //
        make_room(360.0, 12.0, 0.004, 1500.0),
    };
    b.names = {"open_office", "meeting", "office_a", "office_b", "lab", "kitchen"};
    return b;
}

AppConfig default_config() {
    AppConfig c;
    c.building = default_building();
    c.learner.lengthscale.value = 4.0;
    c.learner.std_threshold = 0.01;
    c.validate();
    return c;
}

AppConfig parse_config(const std::string& ini_text, const std::string& source,
                       const std::vector<std::string>& overrides) {
    pt::ptree tree;
    std::istringstream in(ini_text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(source, e.line(), e.message());
    }
    apply_overrides(tree, overrides);
    return from_tree(tree, source);
}

AppConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open config {}", path));
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path, overrides);
}

AppConfig default_config(const std::vector<std::string>& overrides) {
    if (overrides.empty()) return default_config();
    AppConfig c = parse_config(to_ini(default_config()), "", overrides);
    return c;
}

std::string to_ini(const AppConfig& c) {
    std::string out;
    auto line = [&](const std::string& k, const auto& v) { out += fmt::format("{} = {}\n", k, v); };
    out += "[building]\n";
    line("timestep_s", c.timestep);
    for (std::size_t i = 0; i < c.building.size(); ++i) {
        const auto& r = c.building.rooms[i];
        const std::string name = i < c.building.names.size() ? c.building.names[i] : fmt::format("room{}", i);
        out += fmt::format("\n[{}{}]\n", kRoomPrefix, name);
        line("air_mass_kg", r.air_mass);
        line("c_v", r.heat_capacity);
        line("ua_w_per_k", r.conductance);
        line("ventilation_kg_s", r.ventilation_flow);
        line("heater_w", r.heater_power);
        line("hysteresis_k", r.hysteresis);
    }
    const auto& p = c.policy;
    out += "\n[policy]\n";
    line("comfort_floor_c", p.comfort_floor);
    line("comfort_ceiling_c", p.comfort_ceiling);
    line("night_setpoint_c", p.night_setpoint);
    line("preheat_hour", p.preheat_hour);
    line("occupancy_start", p.occupancy_start);
    line("occupancy_end", p.occupancy_end);
    line("pv_match_band", p.pv_match_band);
    line("pv_epsilon_kwh", p.pv_epsilon);
    line("preheat_boost_k", p.preheat_boost);
    line("deltas", fmt::format("{}", fmt::join(p.deltas, " ")));
    const auto& l = c.learner;
    out += "\n[learner]\n";
    line("std_threshold", l.std_threshold);
    line("lengthscale", l.lengthscale.value);
    line("lengthscale_policy",
         l.lengthscale.kind == gp::LengthscalePolicy::Kind::fixed ? "fixed" : "marginal_likelihood");
    line("lengthscale_candidates", fmt::format("{}", fmt::join(l.lengthscale.candidates, " ")));
    line("jitter", l.jitter);
    line("max_jitter", l.max_jitter);
    line("max_iterations", l.max_iterations.value_or(0));
    const auto& s = c.scenario;
    out += "\n[scenario]\n";
    line("baseline_setpoint_c", s.baseline_setpoint);
    line("surrogate_base_c", s.surrogate_base);
    line("horizon_hours", s.horizon_hours);
    line("seed", s.seed);
    if (!s.weather_file.empty()) line("weather", fs::absolute(s.weather_file).lexically_normal().string());
    if (!s.pv_file.empty()) line("pv", fs::absolute(s.pv_file).lexically_normal().string());
    const auto& m = c.monolithic;
    out += "\n[monolithic]\n";
    line("t_ext_min_c", m.t_ext_min);
    line("t_ext_max_c", m.t_ext_max);
    line("t_ext_step_k", m.t_ext_step);
    line("random_seeds", m.random_seeds);
    const auto& q = c.poc;
    out += "\n[poc]\n";
    line("resistance_ohm", q.resistor.resistance);
    line("temp_coefficient", q.resistor.temp_coefficient);
    line("reference_temp_k", q.resistor.reference_temp);
    line("thermal_resistance_k_per_w", q.resistor.thermal_resistance);
    line("v_min", q.v_min);
    line("v_max", q.v_max);
    line("v_min_1d", q.v_min_1d);
    line("v_points_1d", q.v_points_1d);
    line("ambient_1d_k", q.ambient_1d);
    line("v_points_2d", q.v_points_2d);
    line("ambient_min_k", q.ambient_min);
    line("ambient_max_k", q.ambient_max);
    line("ambient_points", q.ambient_points);
    line("random_init_1d", q.random_init_1d);
    line("random_init_2d", q.random_init_2d);
    line("std_threshold", q.std_threshold);
    line("lengthscale", q.lengthscale);
    return out;
}

}  // namespace hvs::config
