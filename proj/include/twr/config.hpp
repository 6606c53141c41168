#pragma once

/**
 * @file config.hpp
 * @brief Flat typed key-value configuration files.
 *
 * One `key = value` per line; `#` starts a comment. Lists are
 * whitespace-separated. Every key has a fixed type and unit (see kConfigKeys);
 * unknown keys, bad values and duplicates are reported with their line number.
 */

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace twr {

enum class ValueType { Real, Integer, Boolean, Text, RealList, TextList };

struct KeySpec {
    std::string_view name;
    ValueType type;
    std::string_view doc;  // meaning and unit
};

inline constexpr KeySpec kConfigKeys[] = {
    {"seed", ValueType::Integer, "master random seed"},
    {"trials", ValueType::Integer, "Monte-Carlo trials per point"},
    {"threads", ValueType::Integer, "worker threads, 0 = all cores"},
    // finite-state model
    {"levels", ValueType::RealList, "link rate levels, data units per slot, strictly increasing"},
    {"probs", ValueType::RealList, "joint state PMF, n^2 entries, lexicographic (link1, link2)"},
    {"backlog_1", ValueType::Real, "finite-state backlog of source 1, data units"},
    {"backlog_2", ValueType::Real, "finite-state backlog of source 2, data units"},
    {"recompute_per_slot", ValueType::Boolean, "re-select the assumed state every slot"},
    // relay physical layer
    {"noise_w_per_hz", ValueType::Real, "noise density I, W/Hz"},
    {"bandwidth_hz", ValueType::Real, "channel bandwidth W, Hz"},
    {"slot_s", ValueType::Real, "slot duration T, seconds"},
    {"mean_gain_1", ValueType::Real, "mean power gain of link 1"},
    {"mean_gain_2", ValueType::Real, "mean power gain of link 2"},
    {"deterministic", ValueType::Boolean, "hold gains at their means"},
    // experiments
    {"strategies", ValueType::TextList, "nc-only opportunistic nc-first one-directional"},
    {"knowledge", ValueType::TextList, "causal noncausal"},
    {"budgets_dbm", ValueType::RealList, "power-sweep budgets, dBm"},
    {"ratios", ValueType::RealList, "ratio-sweep values of b1/b2 in [0, 1]"},
    {"budget_dbm", ValueType::Real, "budget for ratio sweep and trace, dBm"},
    {"b1_mbytes", ValueType::Real, "source-1 data for power sweep and trace, MBytes"},
    {"b2_mbytes", ValueType::Real, "source-2 data for power sweep and trace, MBytes"},
    {"total_mbytes", ValueType::Real, "ratio-sweep b1 + b2, MBytes"},
    {"strategy", ValueType::Text, "trace strategy"},
    {"knowledge_mode", ValueType::Text, "trace knowledge model"},
};

inline const KeySpec* find_key(std::string_view name) {
    for (const KeySpec& k : kConfigKeys)
        if (k.name == name)
            return &k;
    return nullptr;
}

using ConfigValue =
    std::variant<double, std::int64_t, bool, std::string, std::vector<double>, std::vector<std::string>>;

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;)
        out.push_back(w);
    return out;
}

inline std::optional<double> parse_real(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

inline std::optional<std::int64_t> parse_integer(const std::string& s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

} // namespace detail

/// Parses `text` as a value of the given type; throws ConfigError tagged with `line`.
inline ConfigValue parse_value(const KeySpec& spec, const std::string& text, std::size_t line) {
    const std::string where = "key '" + std::string(spec.name) + "': ";
    switch (spec.type) {
    case ValueType::Real:
        if (auto v = detail::parse_real(text))
            return *v;
        throw ConfigError(where + "expected a number, got '" + text + "'", line);
    case ValueType::Integer:
        if (auto v = detail::parse_integer(text))
            return *v;
        throw ConfigError(where + "expected an integer, got '" + text + "'", line);
    case ValueType::Boolean:
        if (text == "true")
            return true;
        if (text == "false")
            return false;
        throw ConfigError(where + "expected true or false, got '" + text + "'", line);
    case ValueType::Text:
        if (text.empty() || text.find_first_of(" \t") != std::string::npos)
            throw ConfigError(where + "expected a single word", line);
        return text;
    case ValueType::RealList: {
        std::vector<double> out;
        for (const std::string& w : detail::split_words(text)) {
            auto v = detail::parse_real(w);
            if (!v)
                throw ConfigError(where + "expected numbers, got '" + w + "'", line);
            out.push_back(*v);
        }
        return out;
    }
    case ValueType::TextList:
        return detail::split_words(text);
    }
    throw ConfigError(where + "unsupported type", line);
}

class ConfigFile {
public:
    static ConfigFile parse(std::istream& in) {
        ConfigFile cfg;
        std::string raw;
        std::size_t line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string text = raw.substr(0, raw.find('#'));
            text = detail::trim(text);
            if (text.empty())
                continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected 'key = value'", line);
            const std::string key = detail::trim(std::string_view(text).substr(0, eq));
            const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
            const KeySpec* spec = find_key(key);
            if (!spec)
                throw ConfigError("unknown key '" + key + "'", line);
            if (cfg.values_.count(key))
                throw ConfigError("duplicate key '" + key + "'", line);
            cfg.values_[key] = parse_value(*spec, value, line);
        }
        return cfg;
    }

    static ConfigFile parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    /// Canonical form: keys in schema order, reals with round-trip precision.
    void serialize(std::ostream& os) const {
        const auto old_precision = os.precision();
        os << std::setprecision(17);
        for (const KeySpec& spec : kConfigKeys) {
            auto it = values_.find(std::string(spec.name));
            if (it == values_.end())
                continue;
            os << spec.name << " =";
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, bool>)
                        os << ' ' << (v ? "true" : "false");
                    else if constexpr (std::is_same_v<T, std::vector<double>> ||
                                       std::is_same_v<T, std::vector<std::string>>)
                        for (const auto& x : v)
                            os << ' ' << x;
                    else
                        os << ' ' << v;
                },
                it->second);
            os << '\n';
        }
        os.precision(old_precision);
    }

    std::string to_string() const {
        std::ostringstream os;
        serialize(os);
        return os.str();
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    void set(const std::string& key, ConfigValue value) {
        if (!find_key(key))
            throw ConfigError("unknown key '" + key + "'");
        values_[key] = std::move(value);
    }

    template <class T>
    T get_or(const std::string& key, T fallback) const {
        auto it = values_.find(key);
        if (it == values_.end())
            return fallback;
        if (const T* v = std::get_if<T>(&it->second))
            return *v;
        throw ConfigError("key '" + key + "' has an unexpected type");
    }

    const std::map<std::string, ConfigValue>& values() const { return values_; }
    bool operator==(const ConfigFile&) const = default;

private:
    std::map<std::string, ConfigValue> values_;
};

} // namespace twr
