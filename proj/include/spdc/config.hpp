#pragma once

#include <json.hpp>

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spdc/errors.hpp"

namespace spdc::config {

using nlohmann::json;

/// Reads one JSON object, remembers which keys were consumed and rejects the rest.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(where(key) + " is required");
        }
        const auto& v = raw(key);
        if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(where(key) + " must be finite");
        return d;
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double d = number(key, fallback);
        if (!(d > 0.0)) throw ConfigError(where(key) + " must be positive");
        return d;
    }

    std::optional<double> optional_positive(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return positive(key);
    }

    long integer(const std::string& key, long fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
        return v.get<long>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(where(key) + " is required");
        }
        const auto& v = raw(key);
        if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
        return v.get<std::string>();
    }

    /// Throws if the object holds keys nobody asked for.
    void finish() const {
        std::string unknown;
        for (const auto& item : j_.items()) {
            if (!used_.contains(item.key())) unknown += (unknown.empty() ? "" : ", ") + item.key();
        }
        if (!unknown.empty()) throw ConfigError(where() + ": unknown key(s) " + unknown);
    }

    std::string where(const std::string& key = {}) const {
        if (key.empty()) return path_.empty() ? "config" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

/// Sets `path` (dot separated) inside `doc`, creating intermediate objects.
inline void set_path(json& doc, const std::string& path, const json& value) {
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("bad parameter path '" + path + "'");
        if (!node->is_object()) throw ConfigError("'" + path + "' does not name an object member");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

}  // namespace spdc::config
