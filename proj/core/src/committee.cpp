#include "hvs/committee.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hvs/error.hpp"
#include "hvs/text.hpp"

namespace hvs::committee {

namespace fs = std::filesystem;

namespace {
constexpr int kManifestVersion = 1;
}

TempBucket bucket_of(double raw_temp) {
    if (!std::isfinite(raw_temp)) throw InputError(fmt::format("bucket_of: temperature {} is not finite", raw_temp));
    return TempBucket{static_cast<std::int64_t>(std::floor(raw_temp * 2.0 + 0.5))};
}

Committee::Committee(learn::InputGrid grid, learn::LearnerConfig config)
    : grid_(std::move(grid)), config_(std::move(config)) {
    config_.validate();
}

const learn::SurrogateTable& Committee::get_or_train(double raw_temp, const SimulatorFactory& factory,
                                                     std::int64_t stamp, bool* trained) {
    const TempBucket b = bucket_of(raw_temp);
    if (trained) *trained = false;
    if (auto it = members_.find(b); it != members_.end()) return it->second;
    if (!factory) throw InputError("committee: no simulator factory");

    learn::SurrogateTable table = learn::build_surrogate(grid_, config_, factory(b));
    auto [it, _] = members_.emplace(b, std::move(table));
    total_simulations_ += it->second.simulation_count;

    CreationEvent ev;
    ev.stamp = stamp;
    ev.bucket = b;
    ev.simulations = it->second.simulation_count;
    ev.models_after = members_.size();
    ev.simulations_after = total_simulations_;
    ev.converged = it->second.converged;
    log_.push_back(ev);
    spdlog::debug("committee: trained bucket {} degC with {} simulations ({} models)", b.celsius(),
                  ev.simulations, members_.size());
    check_counters();
    if (trained) *trained = true;
    return it->second;
}

const learn::SurrogateTable* Committee::find(TempBucket b) const {
    auto it = members_.find(b);
    return it == members_.end() ? nullptr : &it->second;
}

Stats Committee::stats() const {
    return Stats{members_.size(), total_simulations_, log_};
}

void Committee::invalidate() {
    archive_.push_back(std::move(log_));
    log_.clear();
    members_.clear();
    total_simulations_ = 0;
}

void Committee::check_counters() const {
    std::size_t sum = 0;
    for (const auto& [b, t] : members_) sum += t.simulation_count;
    if (sum != total_simulations_)
        throw std::logic_error(fmt::format("committee: counter {} != member sum {}", total_simulations_, sum));
}

void Committee::save(const std::string& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", dir, ec.message()));
    const fs::path manifest = fs::path(dir) / "manifest.txt";
    std::ofstream m(manifest, std::ios::binary);
    if (!m) throw IoError(fmt::format("cannot open {} for writing", manifest.string()));
    m << "# committee of surrogate tables\n";
    m << fmt::format("version = {}\n", kManifestVersion);
    m << fmt::format("models_created = {}\n", members_.size());
    m << fmt::format("total_simulations = {}\n", total_simulations_);
    m << "# member = half_degrees file simulations converged\n";
    for (const auto& [b, t] : members_) {
        const std::string file = fmt::format("bucket_{}.table", b.half_degrees);
        learn::save_table((fs::path(dir) / file).string(), t);
        m << fmt::format("member = {} {} {} {}\n", b.half_degrees, file, t.simulation_count, t.converged ? 1 : 0);
    }
    m << "# event = stamp half_degrees simulations models_after simulations_after\n";
    for (const auto& e : log_)
        m << fmt::format("event = {} {} {} {} {}\n", e.stamp, e.bucket.half_degrees, e.simulations, e.models_after,
                         e.simulations_after);
    if (!m) throw IoError(fmt::format("write failed: {}", manifest.string()));
}

Committee Committee::load(const std::string& dir, learn::InputGrid grid, learn::LearnerConfig config) {
    const fs::path manifest = fs::path(dir) / "manifest.txt";
    std::ifstream in(manifest, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open {}", manifest.string()));
    const std::string src = manifest.string();

    Committee c(std::move(grid), std::move(config));
    std::string line;
    std::size_t lineno = 0;
    bool versioned = false;
    std::size_t declared_sims = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = text::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(src, lineno, "expected `key = value`");
        const std::string key = text::trim(line.substr(0, eq));
        const std::string value = text::trim(line.substr(eq + 1));
        const auto fields = text::split(value, ' ');
        if (key == "version") {
            if (text::parse_int(value, src, lineno) != kManifestVersion)
                throw ParseError(src, lineno, "unsupported manifest version");
            versioned = true;
        } else if (key == "total_simulations") {
            declared_sims = static_cast<std::size_t>(text::parse_int(value, src, lineno));
        } else if (key == "member") {
            if (fields.size() != 4) throw ParseError(src, lineno, "member needs 4 fields");
            const TempBucket b{text::parse_int(fields[0], src, lineno)};
            learn::SurrogateTable t = learn::load_table((fs::path(dir) / fields[1]).string());
            if (!(t.grid == c.grid_)) throw ParseError(src, lineno, "member grid does not match committee grid");
            c.total_simulations_ += t.simulation_count;
            c.members_.emplace(b, std::move(t));
        } else if (key == "event") {
            if (fields.size() != 5) throw ParseError(src, lineno, "event needs 5 fields");
            CreationEvent e;
            e.stamp = text::parse_int(fields[0], src, lineno);
            e.bucket = TempBucket{text::parse_int(fields[1], src, lineno)};
            e.simulations = static_cast<std::size_t>(text::parse_int(fields[2], src, lineno));
            e.models_after = static_cast<std::size_t>(text::parse_int(fields[3], src, lineno));
            e.simulations_after = static_cast<std::size_t>(text::parse_int(fields[4], src, lineno));
            c.log_.push_back(e);
        }
    }
    if (!versioned) throw ParseError(src, lineno, "manifest has no version");
    if (declared_sims != c.total_simulations_)
        throw ParseError(src, lineno, "total_simulations does not match member tables");
    return c;
}

}  // namespace hvs::committee
