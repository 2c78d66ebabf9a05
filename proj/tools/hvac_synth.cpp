// hvac-synth: seeded hourly weather and PV traces in the hvac-dr input format.

#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hvs/error.hpp"
#include "hvs/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate synthetic weather and PV series"};
    hvs::synthetic::SynthOptions o;
    std::string weather_out = "weather.csv";
    std::string pv_out = "pv.csv";

    app.add_option("--weather-out", weather_out, "Weather CSV to write")->capture_default_str();
    app.add_option("--pv-out", pv_out, "PV CSV to write")->capture_default_str();
    app.add_option("--start", o.start, "First timestamp (UTC, on the hour)")->capture_default_str();
    app.add_option("--days", o.days, "Number of days")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
    app.add_option("--mean-temp", o.mean_temp, "Mean external temperature [degC]")->capture_default_str();
    app.add_option("--amplitude", o.daily_amplitude, "Daily temperature amplitude [K]")->capture_default_str();
    app.add_option("--warmest-hour", o.warmest_hour, "Hour of the daily maximum")->capture_default_str();
    app.add_option("--day-std", o.day_to_day_std, "Std of the daily mean offset [K]")->capture_default_str();
    app.add_option("--noise-std", o.noise_std, "Hourly AR(1) noise std [K]")->capture_default_str();
    app.add_option("--noise-memory", o.noise_memory, "AR(1) coefficient")->capture_default_str();
    app.add_option("--pv-peak", o.pv_peak, "Clear-sky hourly PV peak [kWh]")->capture_default_str();
    app.add_option("--sunrise", o.sunrise, "Hour PV production starts")->capture_default_str();
    app.add_option("--sunset", o.sunset, "Hour PV production ends")->capture_default_str();
    app.add_option("--min-clearness", o.min_clearness, "Lowest daily clearness factor")->capture_default_str();
    app.add_option("--cloud-std", o.hourly_cloud_std, "Relative hourly PV noise")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const auto d = hvs::synthetic::generate(o);
        hvs::series::write_series(weather_out, d.weather, "temp_c");
        hvs::series::write_series(pv_out, d.pv, "pv_kwh");
        fmt::print("wrote {} hours to {} and {}\n", d.weather.size(), weather_out, pv_out);
    } catch (const hvs::IoError& e) {
        spdlog::error("{}", e.what());
        return 3;
    } catch (const hvs::InputError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
    return 0;
}
