#include "hvs/series.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include <boost/date_time/posix_time/posix_time.hpp>
#include <fmt/format.h>

#include "hvs/error.hpp"
#include "hvs/text.hpp"

namespace hvs::series {

namespace {

namespace bpt = boost::posix_time;

const bpt::ptime kEpoch(boost::gregorian::date(1970, 1, 1));

std::optional<std::int64_t> try_parse_timestamp(std::string text) {
    if (!text.empty() && text.back() == 'Z') text.pop_back();
    // strict shape check first; the boost parser is lenient about separators
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':')
        return std::nullopt;
    try {
        const bpt::ptime t = bpt::from_iso_extended_string(text);
        if (t.is_not_a_date_time()) return std::nullopt;
        return (t - kEpoch).total_seconds();
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

int HourlySeries::hour_of_day(std::size_t i) const {
    const std::int64_t s = epoch.at(i);
    const std::int64_t day = 86400;
    return static_cast<int>(((s % day) + day) % day / 3600);
}

HourlySeries HourlySeries::head(std::size_t hours) const {
    if (hours > size()) throw InputError(fmt::format("series has {} hours, {} requested", size(), hours));
    HourlySeries h;
    h.timestamps.assign(timestamps.begin(), timestamps.begin() + static_cast<std::ptrdiff_t>(hours));
    h.epoch.assign(epoch.begin(), epoch.begin() + static_cast<std::ptrdiff_t>(hours));
    h.values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(hours));
    return h;
}

std::int64_t parse_timestamp(const std::string& text) {
    auto t = try_parse_timestamp(text::trim(text));
    if (!t) throw InputError(fmt::format("bad timestamp `{}`", text));
    return *t;
}

std::string format_timestamp(std::int64_t epoch) {
    const bpt::ptime t = kEpoch + bpt::seconds(static_cast<long>(epoch));
    return bpt::to_iso_extended_string(t);
}

HourlySeries read_series(std::istream& in, const std::string& source, const std::string& value_column) {
    HourlySeries s;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        const auto fields = text::split(line, ',');
        if (!header) {
            if (fields.size() != 2 || text::trim(fields[1]) != value_column)
                throw ParseError(source, lineno, fmt::format("expected header `timestamp,{}`", value_column));
            header = true;
            continue;
        }
        if (fields.size() != 2)
            throw ParseError(source, lineno, fmt::format("expected 2 fields, got {}", fields.size()));
        const std::string stamp = text::trim(fields[0]);
        const auto t = try_parse_timestamp(stamp);
        if (!t) throw ParseError(source, lineno, fmt::format("bad timestamp `{}`", stamp));
        const double v = text::parse_double(fields[1], source, lineno);
        if (!std::isfinite(v)) throw ParseError(source, lineno, "value is not finite");
        if (!s.epoch.empty()) {
            const std::int64_t step = *t - s.epoch.back();
            if (step == 0) throw ParseError(source, lineno, fmt::format("duplicate timestamp {}", stamp));
            if (step < 0) throw ParseError(source, lineno, fmt::format("timestamp {} goes backwards", stamp));
            if (step != 3600)
                throw ParseError(source, lineno, fmt::format("gap of {} s before {} (expected hourly)", step, stamp));
        }
        s.timestamps.push_back(stamp);
        s.epoch.push_back(*t);
        s.values.push_back(v);
    }
    if (!header) throw ParseError(source, lineno, "empty file");
    if (s.size() == 0) throw ParseError(source, lineno, "no data rows");
    return s;
}

WeatherSeries read_weather(std::istream& in, const std::string& source) { return read_series(in, source, "temp_c"); }

PvSeries read_pv(std::istream& in, const std::string& source) {
    PvSeries s = read_series(in, source, "pv_kwh");
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.values[i] < 0.0)
            throw InputError(fmt::format("{}: negative PV energy {} at {}", source, s.values[i], s.timestamps[i]));
    return s;
}

WeatherSeries load_weather(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open weather file {}", path));
    return read_weather(f, path);
}

PvSeries load_pv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open PV file {}", path));
    return read_pv(f, path);
}

void check_aligned(const WeatherSeries& weather, const PvSeries& pv) {
    if (weather.size() != pv.size())
        throw InputError(fmt::format("weather has {} hours but PV has {}", weather.size(), pv.size()));
    for (std::size_t i = 0; i < weather.size(); ++i)
        if (weather.epoch[i] != pv.epoch[i])
            throw InputError(fmt::format("weather and PV disagree at row {} ({} vs {})", i + 1, weather.timestamps[i],
                                         pv.timestamps[i]));
}

void write_series(std::ostream& out, const HourlySeries& s, const std::string& value_column) {
    out << "timestamp_iso8601," << value_column << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) out << fmt::format("{},{}\n", s.timestamps[i], s.values[i]);
}

void write_series(const std::string& path, const HourlySeries& s, const std::string& value_column) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open {} for writing", path));
    write_series(f, s, value_column);
    if (!f) throw IoError(fmt::format("write failed: {}", path));
}

}  // namespace hvs::series
