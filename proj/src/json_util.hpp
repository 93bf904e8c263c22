#ifndef POLEX_JSON_UTIL_HPP
#define POLEX_JSON_UTIL_HPP

#include <initializer_list>
#include <string>

#include "json.hpp"
#include "polex/errors.hpp"

namespace polex {

using Json = nlohmann::ordered_json;

/// Rejects non-objects and unknown keys, naming the offending field.
inline void require_object(const Json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("unknown field '" + item.key() + "' in " + where);
    }
}

inline const Json& require_field(const Json& j, const char* name, const std::string& where) {
    auto it = j.find(name);
    if (it == j.end()) throw ConfigError("missing required field '" + std::string(name) + "' in " + where);
    return *it;
}

template <typename T>
T get_number(const Json& j, const char* name, const std::string& where) {
    const Json& v = require_field(j, name, where);
    if (!v.is_number()) throw ConfigError("field '" + std::string(name) + "' in " + where + " must be a number");
    return v.get<T>();
}

template <typename T>
T get_number_or(const Json& j, const char* name, const std::string& where, T fallback) {
    auto it = j.find(name);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ConfigError("field '" + std::string(name) + "' in " + where + " must be a number");
    return it->get<T>();
}

inline bool get_bool(const Json& j, const char* name, const std::string& where) {
    const Json& v = require_field(j, name, where);
    if (!v.is_boolean()) throw ConfigError("field '" + std::string(name) + "' in " + where + " must be a boolean");
    return v.get<bool>();
}

inline std::string get_string(const Json& j, const char* name, const std::string& where) {
    const Json& v = require_field(j, name, where);
    if (!v.is_string()) throw ConfigError("field '" + std::string(name) + "' in " + where + " must be a string");
    return v.get<std::string>();
}

}  // namespace polex

#endif  // POLEX_JSON_UTIL_HPP
