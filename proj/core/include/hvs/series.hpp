#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hvs::series {

/// Hourly samples with ISO-8601 timestamps (UTC, `YYYY-MM-DDTHH:MM:SS`,
/// optional trailing `Z`).
struct HourlySeries {
    std::vector<std::string> timestamps;  ///< as read, used verbatim in reports
    std::vector<std::int64_t> epoch;      ///< seconds since 1970-01-01
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    int hour_of_day(std::size_t i) const;
    /// First `hours` samples.
    HourlySeries head(std::size_t hours) const;
};

using WeatherSeries = HourlySeries;  ///< external temperature [degC]
using PvSeries = HourlySeries;       ///< available PV energy per hour [kWh]

std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t epoch);

/// Reads `timestamp_iso8601,<value_column>` CSV. Rows must be hourly with no
/// gaps or repeats and finite values; violations throw ParseError naming the
/// line.
HourlySeries read_series(std::istream& in, const std::string& source, const std::string& value_column);

WeatherSeries load_weather(const std::string& path);
/// As read_series plus values >= 0.
PvSeries load_pv(const std::string& path);
PvSeries read_pv(std::istream& in, const std::string& source);
WeatherSeries read_weather(std::istream& in, const std::string& source);

/// Throws InputError unless both series have identical timestamps.
void check_aligned(const WeatherSeries& weather, const PvSeries& pv);

void write_series(std::ostream& out, const HourlySeries& s, const std::string& value_column);
void write_series(const std::string& path, const HourlySeries& s, const std::string& value_column);

}  // namespace hvs::series
