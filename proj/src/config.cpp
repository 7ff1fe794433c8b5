#include "lqt/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "lqt/error.hpp"

namespace lqt {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError(fmt::format("config key '{}': '{}' is not a number", key, text));
    return value;
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        if (!piece.empty())
            parts.push_back(piece);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return parts;
}

double require_double(const KeyValueConfig& config, std::string_view key) {
    auto v = config.get_double(key);
    if (!v)
        throw ValidationError(fmt::format("config is missing required key '{}'", key));
    return *v;
}

ReferenceSignal signal_from_config(const KeyValueConfig& config) {
    const auto name = config.get_string("signal").value_or("z1");
    const auto kind = parse_signal_kind(name);
    if (!kind)
        throw ValidationError(fmt::format("unknown signal '{}'", name));
    if (*kind == SignalKind::Constant)
        return ReferenceSignal::constant(config.get_double_or("z", 0.0));
    return ReferenceSignal::from_kind(*kind, config.get_double_or("f", 0.02));
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError(fmt::format("config line {}: expected 'key = value'", line_no));
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError(fmt::format("config line {}: empty key", line_no));
        if (config.entries_.contains(key))
            throw ValidationError(fmt::format("config line {}: duplicate key '{}'", line_no, key));
        config.entries_.emplace(std::string(key), std::string(value));
    }
    return config;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError(fmt::format("cannot open config file '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

bool KeyValueConfig::has(std::string_view key) const {
    return entries_.find(key) != entries_.end();
}

std::optional<std::string> KeyValueConfig::get_string(std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    return parse_number(key, it->second);
}

std::optional<std::vector<double>> KeyValueConfig::get_doubles(std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    std::vector<double> out;
    for (auto piece : split_list(it->second))
        out.push_back(parse_number(key, piece));
    return out;
}

std::optional<std::vector<std::string>> KeyValueConfig::get_strings(std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    std::vector<std::string> out;
    for (auto piece : split_list(it->second))
        out.emplace_back(piece);
    return out;
}

double KeyValueConfig::get_double_or(std::string_view key, double fallback) const {
    return get_double(key).value_or(fallback);
}

ScalarLqtProblem scalar_problem_from_config(const KeyValueConfig& config) {
    ScalarLqtProblem p;
    p.a = config.get_double_or("A", 1.0);
    p.b = config.get_double_or("B", 1.0);
    p.q = config.get_double_or("Q", 1.0);
    p.r = require_double(config, "R");
    p.horizon = require_double(config, "T");
    p.x0 = config.get_double_or("x0", 2.0);
    p.signal = signal_from_config(config);
    p.validate();
    return p;
}

MatrixLqtProblem kinetic_problem_from_config(const KeyValueConfig& config) {
    const auto x0 = config.get_doubles("x0");
    if (!x0)
        throw ValidationError("kinetic model needs an explicit x0 = \"x1, x2\"");
    if (x0->size() != 2)
        throw ValidationError(fmt::format("kinetic x0 needs 2 entries, got {}", x0->size()));
    return kinetic_embedding(config.get_double_or("A11", 1.0), config.get_double_or("A12", 1.0),
                             config.get_double_or("B", 1.0), config.get_double_or("Q", 1.0),
                             require_double(config, "R"), require_double(config, "T"),
                             Eigen::Vector2d((*x0)[0], (*x0)[1]), signal_from_config(config));
}

} // namespace lqt
