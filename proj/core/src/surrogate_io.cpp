#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "hvs/active_learner.hpp"
#include "hvs/error.hpp"
#include "hvs/text.hpp"

namespace hvs::learn {

namespace {

constexpr int kTableVersion = 1;
constexpr const char* kTableFormat = "hvs-surrogate-table";

}  // namespace

void save_table(std::ostream& out, const SurrogateTable& t) {
    if (t.predicted.size() != t.grid.size()) throw InputError("save_table: prediction count does not match grid");
    out << "# active-learning surrogate table\n";
    out << fmt::format("format = {}\nversion = {}\n", kTableFormat, kTableVersion);
    out << fmt::format("dims = {}\n", t.grid.dims());
    for (std::size_t d = 0; d < t.grid.dims(); ++d) out << fmt::format("axis.{} = {}\n", d, fmt::join(t.grid.axis(d), " "));
    out << fmt::format("std_threshold = {}\n", t.std_threshold);
    out << fmt::format("final_max_std = {}\n", t.final_max_std);
    out << fmt::format("converged = {}\n", t.converged ? 1 : 0);
    out << fmt::format("initial_design_size = {}\n", t.initial_design_size);
    out << fmt::format("iteration_count = {}\n", t.iteration_count);
    out << fmt::format("simulation_count = {}\n", t.simulation_count);
    out << fmt::format("lengthscales = {}\n", fmt::join(t.lengthscales, " "));
    out << fmt::format("jitter = {}\n", t.jitter);
    out << fmt::format("training_indices = {}\n", fmt::join(t.training_indices, " "));
    out << fmt::format("training_outputs = {}\n", fmt::join(t.training_outputs, " "));
    out << "---\n";
    out << "grid_index";
    for (std::size_t d = 0; d < t.grid.dims(); ++d) out << ",x" << d;
    out << ",predicted_output\n";
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        out << i;
        for (double v : t.grid.point(i)) out << ',' << fmt::format("{}", v);
        out << ',' << fmt::format("{}", t.predicted[i]) << '\n';
    }
}

void save_table(const std::string& path, const SurrogateTable& table) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open {} for writing", path));
    save_table(f, table);
    if (!f) throw IoError(fmt::format("write failed: {}", path));
}

SurrogateTable load_table(std::istream& in, const std::string& source) {
    std::map<std::string, std::string> header;
    std::string line;
    std::size_t lineno = 0;
    bool separator = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = text::trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line == "---") {
            separator = true;
            break;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source, lineno, "expected `key = value`");
        header[text::trim(line.substr(0, eq))] = text::trim(line.substr(eq + 1));
    }
    if (!separator) throw ParseError(source, lineno, "missing `---` separator");

    auto get = [&](const std::string& key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end()) throw ParseError(source, lineno, fmt::format("missing header key `{}`", key));
        return it->second;
    };
    if (get("format") != kTableFormat) throw ParseError(source, 1, "not a surrogate table file");
    if (text::parse_int(get("version"), source, lineno) != kTableVersion)
        throw ParseError(source, lineno, fmt::format("unsupported table version {}", get("version")));

    const auto dims = static_cast<std::size_t>(text::parse_int(get("dims"), source, lineno));
    std::vector<std::vector<double>> axes;
    for (std::size_t d = 0; d < dims; ++d)
        axes.push_back(text::parse_doubles(get(fmt::format("axis.{}", d)), source, lineno));

    SurrogateTable t;
    t.grid = InputGrid(std::move(axes));
    t.std_threshold = text::parse_double(get("std_threshold"), source, lineno);
    t.final_max_std = text::parse_double(get("final_max_std"), source, lineno);
    t.converged = text::parse_int(get("converged"), source, lineno) != 0;
    t.initial_design_size = static_cast<std::size_t>(text::parse_int(get("initial_design_size"), source, lineno));
    t.iteration_count = static_cast<std::size_t>(text::parse_int(get("iteration_count"), source, lineno));
    t.simulation_count = static_cast<std::size_t>(text::parse_int(get("simulation_count"), source, lineno));
    t.lengthscales = text::parse_doubles(get("lengthscales"), source, lineno);
    t.jitter = text::parse_double(get("jitter"), source, lineno);
    for (double v : text::parse_doubles(get("training_indices"), source, lineno))
        t.training_indices.push_back(static_cast<std::size_t>(v));
    t.training_outputs = text::parse_doubles(get("training_outputs"), source, lineno);
    if (t.training_indices.size() != t.training_outputs.size())
        throw ParseError(source, lineno, "training index/output counts differ");

    if (!std::getline(in, line)) throw ParseError(source, lineno + 1, "missing column header");
    ++lineno;
    t.predicted.assign(t.grid.size(), 0.0);
    std::vector<bool> seen(t.grid.size(), false);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split(line, ',');
        if (fields.size() != dims + 2)
            throw ParseError(source, lineno, fmt::format("expected {} fields, got {}", dims + 2, fields.size()));
        const auto idx = static_cast<std::size_t>(text::parse_int(fields[0], source, lineno));
        if (idx >= t.grid.size() || seen[idx]) throw ParseError(source, lineno, "bad or repeated grid index");
        seen[idx] = true;
        t.predicted[idx] = text::parse_double(fields.back(), source, lineno);
        ++rows;
    }
    if (rows != t.grid.size())
        throw ParseError(source, lineno, fmt::format("expected {} rows, got {}", t.grid.size(), rows));
    return t;
}

SurrogateTable load_table(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open {}", path));
    return load_table(f, path);
}

}  // namespace hvs::learn
