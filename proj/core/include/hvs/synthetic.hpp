#pragma once

#include <cstdint>
#include <string>

#include "hvs/series.hpp"

namespace hvs::synthetic {

/// Seeded stand-in for measured weather and PV traces.
struct SynthOptions {
    std::string start = "2024-01-15T00:00:00";
    std::size_t days = 15;
    double mean_temp = 10.0;        ///< [degC]
    double daily_amplitude = 4.0;   ///< half peak-to-peak of the daily cycle [K]
    double warmest_hour = 15.0;
    double day_to_day_std = 0.6;    ///< per-day offset of the daily mean [K]
    double noise_std = 0.4;         ///< AR(1) innovation [K]
    double noise_memory = 0.7;      ///< AR(1) coefficient
    double pv_peak = 2.0;           ///< clear-sky hourly peak [kWh]
    double sunrise = 8.0;           ///< hour PV starts
    double sunset = 18.0;           ///< hour PV ends
    double min_clearness = 0.45;    ///< daily clearness is uniform in [min_clearness, 1]
    double hourly_cloud_std = 0.08; ///< relative hour-to-hour PV variation
    std::uint64_t seed = 7;

    void validate() const;
};

struct SynthData {
    series::WeatherSeries weather;
    series::PvSeries pv;
};

/// Daily cosine temperature with day offsets and AR(1) noise; bell-shaped PV
/// (half sine between sunrise and sunset) scaled by a per-day clearness.
/// PV is zero outside daylight. Deterministic for a given seed.
SynthData generate(const SynthOptions& options);

}  // namespace hvs::synthetic
