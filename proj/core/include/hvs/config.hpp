#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hvs/active_learner.hpp"
#include "hvs/dr_controller.hpp"
#include "hvs/thermal_sim.hpp"

namespace hvs::config {

struct ScenarioSettings {
    double baseline_setpoint = 21.0;  ///< fixed occupied-hours setpoint of the baseline arm [degC]
    double surrogate_base = 21.0;     ///< setpoint that delta 0 maps to when training [degC]
    std::size_t horizon_hours = 0;    ///< 0 = whole series
    std::uint64_t seed = 42;
    std::string weather_file;         ///< resolved against the config file directory
    std::string pv_file;
};

struct MonolithicSettings {
    double t_ext_min = 5.0;
    double t_ext_max = 15.0;
    double t_ext_step = 1.0;
    std::size_t random_seeds = 3;  ///< random-init repetitions for the init comparison
};

struct PocSettings {
    thermal::ResistorParams resistor{1000.0, 0.004, 293.15, 0.02};
    double v_min = 1000.0;
    double v_max = 10000.0;
    std::size_t v_points_1d = 1000;
    double v_min_1d = 10.0;
    double ambient_1d = 293.15;
    std::size_t v_points_2d = 50;
    double ambient_min = 273.15;
    double ambient_max = 313.15;
    std::size_t ambient_points = 50;
    std::size_t random_init_1d = 4;
    std::size_t random_init_2d = 10;
    double std_threshold = 0.01;
    double lengthscale = 1.0;
};

struct AppConfig {
    thermal::BuildingModel building;
    double timestep = 60.0;
    control::ComfortPolicy policy;
    learn::LearnerConfig learner;
    ScenarioSettings scenario;
    MonolithicSettings monolithic;
    PocSettings poc;
    std::string source;  ///< file the config came from, empty for built-in defaults

    void validate() const;
};

/// Six-room office used when no config file is given.
thermal::BuildingModel default_building();
AppConfig default_config();

/// Parses an INI file. Sections: [building], [room:NAME] (one per room, in
/// file order), [policy], [learner], [scenario], [monolithic], [poc].
/// `overrides` are `section.key=value` strings applied on top of the file.
/// Unknown sections or keys are rejected with InputError.
AppConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
/// Same as load_config on the built-in defaults.
AppConfig default_config(const std::vector<std::string>& overrides);
AppConfig parse_config(const std::string& ini_text, const std::string& source,
                       const std::vector<std::string>& overrides = {});

/// Effective configuration as INI text; parse_config(to_ini(c)) == c.
std::string to_ini(const AppConfig& config);

}  // namespace hvs::config
