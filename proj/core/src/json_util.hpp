#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tmforge/diagnostics.hpp"

namespace tmforge::jsonutil {

using nlohmann::json;

inline std::optional<json> parse(const std::string& text, const std::string& filename,
                                 std::vector<SchemaError>& errors) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        errors.push_back({filename, "", "document is not valid JSON"});
        return std::nullopt;
    }
    return doc;
}

inline std::optional<std::string> req_string(const json& obj, const char* key,
                                             const std::string& filename,
                                             const std::string& path,
                                             std::vector<SchemaError>& errors) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
        errors.push_back({filename, path, std::string("missing or non-string field '") +
                                              key + "'"});
        return std::nullopt;
    }
    return obj[key].get<std::string>();
}

inline std::string opt_string(const json& obj, const char* key,
                              const std::string& fallback = "") {
    if (obj.is_object() && obj.contains(key) && obj[key].is_string()) {
        return obj[key].get<std::string>();
    }
    return fallback;
}

inline bool opt_bool(const json& obj, const char* key, bool fallback = false) {
    if (obj.is_object() && obj.contains(key) && obj[key].is_boolean()) {
        return obj[key].get<bool>();
    }
    return fallback;
}

inline std::optional<int> req_int(const json& obj, const char* key,
                                  const std::string& filename, const std::string& path,
                                  std::vector<SchemaError>& errors) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number_integer()) {
        errors.push_back({filename, path, std::string("missing or non-integer field '") +
                                              key + "'"});
        return std::nullopt;
    }
    return obj[key].get<int>();
}

inline std::vector<std::string> opt_string_array(const json& obj, const char* key,
                                                 const std::string& filename,
                                                 const std::string& path,
                                                 std::vector<SchemaError>& errors) {
    std::vector<std::string> out;
    if (!obj.is_object() || !obj.contains(key)) return out;
    const json& arr = obj[key];
    if (!arr.is_array()) {
        errors.push_back({filename, path, std::string("field '") + key + "' must be an array"});
        return out;
    }
    for (const json& item : arr) {
        if (!item.is_string()) {
            errors.push_back(
                {filename, path, std::string("field '") + key + "' must hold strings"});
            return out;
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace tmforge::jsonutil
