#pragma once

// Category assignment and 5W1H domain tagging. Rules are ordered data, not
// code: the paper's 20 categories are fixed, but which artifact lands where
// differs per tool, so the mapping ships as an editable rule file with a
// catch-all (`string`) guaranteeing totality.

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fivewh/model.hpp"
#include "fivewh/profile.hpp"

namespace fivewh {

// ---------------------------------------------------------------------------
// Category rules
// ---------------------------------------------------------------------------

struct CategoryRule {
    struct Match {
        std::optional<std::string> artifact_type;
        std::optional<SourceFormat> format;
        std::vector<std::string> has_keys;

        bool is_catch_all() const { return !artifact_type && !format && has_keys.empty(); }
    };

    Match match;
    Category category = Category::string;
    int priority = 0;

    bool matches(const TraceObject& t) const {
        if (match.artifact_type && *match.artifact_type != t.artifact_type) return false;
        if (match.format && *match.format != t.source.format) return false;
        for (const auto& key : match.has_keys) {
            if (!t.attribute(key)) return false;
        }
        return true;
    }
};

/// Category of the highest-priority matching rule; earlier rule wins a
/// priority tie. Total: falls back to `string` so classify never fails.
inline Category classify(const TraceObject& t, const std::vector<CategoryRule>& rules) {
    const CategoryRule* best = nullptr;
    for (const auto& rule : rules) {
        if (!rule.matches(t)) continue;
        if (!best || rule.priority > best->priority) best = &rule;
    }
    return best ? best->category : Category::string;
}

/// Re-classifies every trace in place.
inline void apply_categories(Collection& c, const std::vector<CategoryRule>& rules) {
    for (auto& t : c.traces) t.header.category = classify(t, rules);
}

inline std::vector<CategoryRule> parse_category_rules(const nlohmann::json& doc) {
    if (!doc.is_array()) {
        throw Error(ErrorCode::profile_syntax, "category rule set must be a JSON array");
    }
    std::vector<CategoryRule> rules;
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("category") || !entry["category"].is_string()) {
            throw Error(ErrorCode::profile_syntax, "each category rule needs a category string");
        }
        CategoryRule rule;
        std::string cat = entry["category"].get<std::string>();
        auto parsed = parse_category(cat);
        if (!parsed) throw Error(ErrorCode::unknown_category, "unknown category '" + cat + "'");
        rule.category = *parsed;
        if (entry.contains("priority")) {
            if (!entry["priority"].is_number_integer()) {
                throw Error(ErrorCode::profile_syntax, "priority must be an integer");
            }
            rule.priority = entry["priority"].get<int>();
        }
        if (entry.contains("match")) {
            const auto& m = entry["match"];
            if (!m.is_object()) {
                throw Error(ErrorCode::profile_syntax, "match must be an object");
            }
            if (m.contains("artifact_type")) {
                if (!m["artifact_type"].is_string()) {
                    throw Error(ErrorCode::profile_syntax, "match.artifact_type must be a string");
                }
                rule.match.artifact_type = m["artifact_type"].get<std::string>();
            }
            if (m.contains("format")) {
                if (!m["format"].is_string()) {
                    throw Error(ErrorCode::profile_syntax, "match.format must be a string");
                }
                auto f = parse_source_format(m["format"].get<std::string>());
                if (!f) {
                    throw Error(ErrorCode::profile_syntax,
                                "unknown source format '" + m["format"].get<std::string>() + "'");
                }
                rule.match.format = *f;
            }
            if (m.contains("has_keys")) {
                if (!m["has_keys"].is_array()) {
                    throw Error(ErrorCode::profile_syntax, "match.has_keys must be an array");
                }
                for (const auto& k : m["has_keys"]) {
                    if (!k.is_string()) {
                        throw Error(ErrorCode::profile_syntax, "has_keys entries must be strings");
                    }
                    rule.match.has_keys.push_back(k.get<std::string>());
                }
            }
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

inline std::vector<CategoryRule> load_category_rules(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::profile_syntax,
                    std::string("category rule set is not valid JSON: ") + e.what());
    }
    return parse_category_rules(doc);
}

// ---------------------------------------------------------------------------
// Domain tagging
// ---------------------------------------------------------------------------

/// Projection of a trace's normalized fields onto the six domains. Fields
/// with no domain rule land under etc.
struct DomainTagging {
    std::array<std::vector<std::pair<std::string, std::string>>, kDomainCount> by_domain;

    const std::vector<std::pair<std::string, std::string>>& for_domain(Domain d) const {
        return by_domain[static_cast<std::size_t>(d)];
    }
};

inline DomainTagging tag_domains(const TraceObject& t, const MappingProfile& profile) {
    DomainTagging tagging;
    for (const auto& [key, attr] : t.attributes) {
        Domain d = Domain::etc;
        if (auto mapped = profile.domain_of(key); mapped && *mapped) d = **mapped;
        tagging.by_domain[static_cast<std::size_t>(d)].emplace_back(key, attr.value);
    }
    return tagging;
}

// ---------------------------------------------------------------------------
// Filtering
// ---------------------------------------------------------------------------

/// Conjunction of optional predicates. Empty filter matches everything.
/// Category and time-range predicates apply to traces and events alike
/// (traces match the range through their when-tagged attributes); textual
/// domain predicates apply to the event objects' 5W1H fields.
struct FilterExpr {
    std::vector<Category> categories;                      // empty: no constraint
    std::vector<std::pair<Domain, std::string>> domain_patterns;  // '*' wildcard, else exact
    std::optional<Timestamp> from;
    std::optional<Timestamp> to;

    bool empty() const {
        return categories.empty() && domain_patterns.empty() && !from && !to;
    }
};

struct CollectionView {
    std::vector<const TraceObject*> traces;
    std::vector<const EventObject*> events;

    std::size_t size() const { return traces.size() + events.size(); }
};

namespace detail_filter {

inline bool category_allowed(const std::optional<Category>& cat, const FilterExpr& f) {
    if (f.categories.empty()) return true;
    if (!cat) return false;
    for (Category c : f.categories) {
        if (c == *cat) return true;
    }
    return false;
}

inline bool in_range(const Timestamp& ts, const FilterExpr& f) {
    if (!ts.parsed()) return false;
    if (f.from && timestamp_less(ts, *f.from)) return false;
    if (f.to && timestamp_less(*f.to, ts)) return false;
    return true;
}

inline bool trace_matches(const TraceObject& t, const FilterExpr& f) {
    if (!category_allowed(t.header.category, f)) return false;
    if (!f.domain_patterns.empty()) return false;  // traces carry no first-class domains
    if (f.from || f.to) {
        bool any = false;
        for (const auto& [key, attr] : t.attributes) {
            if (attr.domain != Domain::when) continue;
            if (auto ts = Timestamp::parse(attr.value); ts && in_range(*ts, f)) {
                any = true;
                break;
            }
        }
        if (!any) return false;
    }
    return true;
}

inline bool event_matches(const EventObject& e, const FilterExpr& f) {
    if (!category_allowed(e.header.category, f)) return false;
    for (const auto& [domain, pattern] : f.domain_patterns) {
        std::vector<std::string> values;
        switch (domain) {
            case Domain::who: if (e.who) values.push_back(*e.who); break;
            case Domain::where: if (e.where) values.push_back(*e.where); break;
            case Domain::what: if (e.what) values.push_back(*e.what); break;
            case Domain::how: if (e.how) values.push_back(*e.how); break;
            case Domain::when: if (e.when) values.push_back(e.when->display()); break;
            case Domain::etc:
                if (e.etc.reason) values.push_back(*e.etc.reason);
                for (const auto& [k, v] : e.etc.extras) values.push_back(v);
                break;
        }
        bool any = false;
        for (const auto& v : values) {
            if (detail::glob_match(pattern, v)) {
                any = true;
                break;
            }
        }
        if (!any) return false;
    }
    if (f.from || f.to) {
        if (!e.when || !in_range(*e.when, f)) return false;
    }
    return true;
}

}  // namespace detail_filter

/// References to the objects satisfying `f`, original order preserved.
inline CollectionView filter(const Collection& c, const FilterExpr& f) {
    CollectionView view;
    for (const auto& t : c.traces) {
        if (detail_filter::trace_matches(t, f)) view.traces.push_back(&t);
    }
    for (const auto& e : c.events) {
        if (detail_filter::event_matches(e, f)) view.events.push_back(&e);
    }
    return view;
}

}  // namespace fivewh
