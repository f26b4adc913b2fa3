#pragma once

// Declarative mapping profiles: how a source format's native keys translate
// into normalized keys with 5W1H domain tags. Profiles are plain JSON
// documents so the mapping stays configuration, not code.

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fivewh/model.hpp"

namespace fivewh {

enum class ValueTransform : std::uint8_t { identity, timestamp_parse, lowercase, hex_to_int };

inline std::string_view value_transform_name(ValueTransform t) {
    switch (t) {
        case ValueTransform::identity: return "identity";
        case ValueTransform::timestamp_parse: return "timestamp_parse";
        case ValueTransform::lowercase: return "lowercase";
        case ValueTransform::hex_to_int: return "hex_to_int";
    }
    return "identity";
}

inline std::optional<ValueTransform> parse_value_transform(std::string_view s) {
    for (ValueTransform t : {ValueTransform::identity, ValueTransform::timestamp_parse,
                             ValueTransform::lowercase, ValueTransform::hex_to_int}) {
        if (value_transform_name(t) == s) return t;
    }
    return std::nullopt;
}

/// Normalizes one field value. Values that do not fit the transform pass
/// through verbatim; the untouched source stays in the trace's raw map.
inline std::string apply_transform(ValueTransform t, std::string_view value) {
    switch (t) {
        case ValueTransform::identity:
            return std::string(value);
        case ValueTransform::timestamp_parse: {
            if (auto ts = Timestamp::parse(value)) return ts->iso_string();
            return std::string(value);
        }
        case ValueTransform::lowercase:
            return detail::to_lower_ascii(value);
        case ValueTransform::hex_to_int: {
            if (auto v = detail::parse_hex(value)) return std::to_string(*v);
            return std::string(value);
        }
    }
    return std::string(value);
}

struct FieldRule {
    std::string source_key;
    std::string normalized_key;
    std::optional<Domain> domain;  // omitted: field lands in attributes only
    ValueTransform transform = ValueTransform::identity;
};

struct MappingProfile {
    std::string name;
    std::string artifact_type;
    Category category = Category::string;
    std::string id_prefix = "trace";
    std::vector<FieldRule> field_rules;

    const FieldRule* rule_for(std::string_view source_key) const {
        for (const auto& r : field_rules) {
            if (r.source_key == source_key) return &r;
        }
        return nullptr;
    }

    /// Domain a normalized key is tagged with, per this profile's rules.
    std::optional<Domain> domain_of(std::string_view normalized_key) const {
        for (const auto& r : field_rules) {
            if (r.normalized_key == normalized_key) return r.domain;
        }
        return std::nullopt;
    }
};

inline MappingProfile parse_profile(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw Error(ErrorCode::profile_syntax, "profile document must be a JSON object");
    }
    MappingProfile p;
    auto require_string = [&](const char* key) -> std::string {
        if (!doc.contains(key) || !doc[key].is_string()) {
            throw Error(ErrorCode::profile_syntax,
                        std::string("profile is missing string field '") + key + "'");
        }
        return doc[key].get<std::string>();
    };
    p.name = require_string("name");
    p.artifact_type = require_string("artifact_type");
    std::string category = require_string("category");
    auto cat = parse_category(category);
    if (!cat) {
        throw Error(ErrorCode::unknown_category, "unknown category '" + category + "'");
    }
    p.category = *cat;
    if (doc.contains("id_prefix")) {
        if (!doc["id_prefix"].is_string() || doc["id_prefix"].get<std::string>().empty()) {
            throw Error(ErrorCode::profile_syntax, "id_prefix must be a non-empty string");
        }
        p.id_prefix = doc["id_prefix"].get<std::string>();
    }
    if (!doc.contains("field_rules") || !doc["field_rules"].is_array()) {
        throw Error(ErrorCode::profile_syntax, "profile is missing the field_rules array");
    }
    for (const auto& entry : doc["field_rules"]) {
        if (!entry.is_object() || !entry.contains("source_key") || !entry["source_key"].is_string() ||
            !entry.contains("normalized_key") || !entry["normalized_key"].is_string()) {
            throw Error(ErrorCode::profile_syntax,
                        "each field rule needs string source_key and normalized_key");
        }
        FieldRule rule;
        rule.source_key = entry["source_key"].get<std::string>();
        rule.normalized_key = entry["normalized_key"].get<std::string>();
        if (entry.contains("domain") && !entry["domain"].is_null()) {
            if (!entry["domain"].is_string()) {
                throw Error(ErrorCode::profile_syntax, "field rule domain must be a string");
            }
            std::string d = entry["domain"].get<std::string>();
            auto domain = parse_domain(d);
            if (!domain) throw Error(ErrorCode::unknown_domain, "unknown domain '" + d + "'");
            rule.domain = *domain;
        }
        if (entry.contains("value_transform") && !entry["value_transform"].is_null()) {
            if (!entry["value_transform"].is_string()) {
                throw Error(ErrorCode::profile_syntax, "value_transform must be a string");
            }
            std::string t = entry["value_transform"].get<std::string>();
            auto transform = parse_value_transform(t);
            if (!transform) {
                throw Error(ErrorCode::profile_syntax, "unknown value_transform '" + t + "'");
            }
            rule.transform = *transform;
        }
        if (rule.source_key.empty() || rule.normalized_key.empty()) {
            throw Error(ErrorCode::profile_syntax, "field rule keys must be non-empty");
        }
        for (const auto& existing : p.field_rules) {
            if (existing.source_key == rule.source_key) {
                throw Error(ErrorCode::duplicate_source_key,
                            "duplicate rule for source_key '" + rule.source_key + "'");
            }
            if (existing.normalized_key == rule.normalized_key) {
                throw Error(ErrorCode::profile_syntax,
                            "duplicate normalized_key '" + rule.normalized_key + "'");
            }
        }
        p.field_rules.push_back(std::move(rule));
    }
    return p;
}

/// Parses and invariant-checks a profile document.
inline MappingProfile load_profile(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::profile_syntax, std::string("profile is not valid JSON: ") + e.what());
    }
    return parse_profile(doc);
}

inline MappingProfile load_profile_text(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::profile_syntax, std::string("profile is not valid JSON: ") + e.what());
    }
    return parse_profile(doc);
}

}  // namespace fivewh
