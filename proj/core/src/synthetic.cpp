#include "hvs/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "hvs/error.hpp"

namespace hvs::synthetic {

void SynthOptions::validate() const {
    if (days == 0) throw InvalidParamsError("synthetic: days must be >= 1");
    if (!(daily_amplitude >= 0.0) || !(day_to_day_std >= 0.0) || !(noise_std >= 0.0))
        throw InvalidParamsError("synthetic: amplitudes and deviations must be >= 0");
    if (!(noise_memory >= 0.0 && noise_memory < 1.0)) throw InvalidParamsError("synthetic: noise_memory must be in [0, 1)");
    if (!(pv_peak >= 0.0)) throw InvalidParamsError("synthetic: pv_peak must be >= 0");
    if (!(0.0 <= sunrise && sunrise < sunset && sunset <= 24.0))
        throw InvalidParamsError("synthetic: need 0 <= sunrise < sunset <= 24");
    if (!(min_clearness >= 0.0 && min_clearness <= 1.0)) throw InvalidParamsError("synthetic: min_clearness in [0, 1]");
    if (!(hourly_cloud_std >= 0.0)) throw InvalidParamsError("synthetic: hourly_cloud_std must be >= 0");
}

SynthData generate(const SynthOptions& o) {
    o.validate();
    const std::int64_t t0 = series::parse_timestamp(o.start);
    if (t0 % 3600 != 0) throw InputError(fmt::format("synthetic: start {} is not on the hour", o.start));

    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SynthData d;
    double noise = 0.0;
    const std::size_t hours = o.days * 24;
    double day_offset = 0.0;
    double clearness = 1.0;
    for (std::size_t h = 0; h < hours; ++h) {
        const std::int64_t t = t0 + static_cast<std::int64_t>(h) * 3600;
        const int hour = static_cast<int>(((t % 86400) + 86400) % 86400 / 3600);
        if (h == 0 || hour == 0) {
            day_offset = o.day_to_day_std * normal(rng);
            clearness = o.min_clearness + (1.0 - o.min_clearness) * unit(rng);
        }
        noise = o.noise_memory * noise + o.noise_std * normal(rng);
        const double phase = 2.0 * std::numbers::pi * (static_cast<double>(hour) - o.warmest_hour) / 24.0;
        const double temp = o.mean_temp + day_offset + o.daily_amplitude * std::cos(phase) + noise;

        // energy of the hour is sampled at its midpoint
        const double mid = static_cast<double>(hour) + 0.5;
        double pv = 0.0;
        const double cloud = 1.0 + o.hourly_cloud_std * normal(rng);
        if (mid > o.sunrise && mid < o.sunset) {
            const double shape = std::sin(std::numbers::pi * (mid - o.sunrise) / (o.sunset - o.sunrise));
            pv = std::max(0.0, o.pv_peak * clearness * shape * cloud);
        }

        const std::string stamp = series::format_timestamp(t);
        d.weather.timestamps.push_back(stamp);
        d.weather.epoch.push_back(t);
        d.weather.values.push_back(std::round(temp * 100.0) / 100.0);
        d.pv.timestamps.push_back(stamp);
        d.pv.epoch.push_back(t);
        d.pv.values.push_back(std::round(pv * 1000.0) / 1000.0);
    }
    return d;
}

}  // namespace hvs::synthetic
