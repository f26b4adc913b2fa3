#pragma once

// Core object model: 5W1H domains, the 20-entry artifact category taxonomy,
// trace/event objects, timestamps and collection-level validation.
//
// Trace objects record facts observed verbatim in a source artifact; event
// objects re-express one or more traces as a 5W1H statement with provenance
// links back to the trace ids. Everything here is an immutable value type
// once built.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fivewh/detail/strings.hpp"

namespace fivewh {

inline constexpr std::string_view kToolName = "fivewh";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kSchemaVersion = "1.0";
inline constexpr std::string_view kContextTag = "fivewh/v1";

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorCode {
    profile_syntax,
    duplicate_source_key,
    unknown_category,
    unknown_domain,
    table_not_found,
    unreadable_database,
    malformed_header,
    syntax,
    schema,
    integrity,
    invalid_collection,
    empty_answer_key,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Domains and categories
// ---------------------------------------------------------------------------

/// The six normalization domains. `why` is not a member: reason text lives in
/// EtcBlock::reason under `etc`.
enum class Domain : std::uint8_t { who, when, where, what, how, etc };

inline constexpr std::size_t kDomainCount = 6;

inline constexpr std::array<Domain, kDomainCount> all_domains() {
    return {Domain::who, Domain::when, Domain::where, Domain::what, Domain::how, Domain::etc};
}

inline std::string_view domain_name(Domain d) {
    switch (d) {
        case Domain::who: return "who";
        case Domain::when: return "when";
        case Domain::where: return "where";
        case Domain::what: return "what";
        case Domain::how: return "how";
        case Domain::etc: return "etc";
    }
    return "etc";
}

inline std::optional<Domain> parse_domain(std::string_view s) {
    for (Domain d : all_domains()) {
        if (domain_name(d) == s) return d;
    }
    return std::nullopt;
}

/// Closed 20-entry artifact taxonomy.
enum class Category : std::uint8_t {
    archive, call, calendar, cloud, connection,
    document, email, exchange, executable, font,
    location, media, memory, message, network,
    people, social, string, system, web,
};

inline constexpr std::size_t kCategoryCount = 20;

inline constexpr std::array<Category, kCategoryCount> all_categories() {
    return {Category::archive, Category::call, Category::calendar, Category::cloud,
            Category::connection, Category::document, Category::email, Category::exchange,
            Category::executable, Category::font, Category::location, Category::media,
            Category::memory, Category::message, Category::network, Category::people,
            Category::social, Category::string, Category::system, Category::web};
}

inline std::string_view category_name(Category c) {
    static constexpr std::array<std::string_view, kCategoryCount> names = {
        "archive", "call", "calendar", "cloud", "connection",
        "document", "email", "exchange", "executable", "font",
        "location", "media", "memory", "message", "network",
        "people", "social", "string", "system", "web"};
    return names[static_cast<std::size_t>(c)];
}

inline std::optional<Category> parse_category(std::string_view s) {
    for (Category c : all_categories()) {
        if (category_name(c) == s) return c;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Timestamps
// ---------------------------------------------------------------------------

/// Normalized point in time. `value` is ISO-8601 ("2019-07-14" or
/// "2020-02-10T19:01:15") and empty when the source text did not parse; the
/// verbatim source string is always kept in `original`. Date-only values
/// order as the midnight instant of that date.
struct Timestamp {
    std::string value;
    std::optional<int> tz_minutes;  // offset east of UTC
    std::string original;

    bool parsed() const { return !value.empty(); }

    bool operator==(const Timestamp&) const = default;

    /// Normalized form including the offset suffix ("Z" for +00:00).
    std::string iso_string() const {
        if (!parsed()) return original;
        std::string out = value;
        if (tz_minutes) {
            int off = *tz_minutes;
            if (off == 0) {
                out += 'Z';
            } else {
                int mag = off < 0 ? -off : off;
                char buf[8];
                std::snprintf(buf, sizeof buf, "%c%02d:%02d", off < 0 ? '-' : '+', mag / 60, mag % 60);
                out += buf;
            }
        }
        return out;
    }

    std::string display() const { return parsed() ? iso_string() : original; }

    /// Accepts "YYYY-MM-DD" and "MM/DD/YYYY" dates, an optional " " or "T"
    /// separated HH:MM:SS[.frac] time, and an optional trailing offset
    /// ("Z", "+09:00", "-0500", or " UTC").
    static std::optional<Timestamp> parse(std::string_view text) {
        std::string_view s = detail::trim(text);
        if (s.empty()) return std::nullopt;

        Timestamp ts;
        ts.original = std::string(detail::trim(text));

        std::optional<int> tz;
        if (s.size() >= 4 && s.substr(s.size() - 4) == " UTC") {
            tz = 0;
            s.remove_suffix(4);
        } else if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) {
            tz = 0;
            s.remove_suffix(1);
        } else {
            // ±HH:MM or ±HHMM, only meaningful after a time component
            std::size_t pos = s.find_last_of("+-");
            if (pos != std::string_view::npos && pos >= 10) {
                std::string_view off = s.substr(pos + 1);
                int hh = -1, mm = -1;
                if (off.size() == 5 && off[2] == ':') {
                    hh = two_digits(off.substr(0, 2));
                    mm = two_digits(off.substr(3, 2));
                } else if (off.size() == 4) {
                    hh = two_digits(off.substr(0, 2));
                    mm = two_digits(off.substr(2, 2));
                }
                if (hh >= 0 && hh <= 14 && mm >= 0 && mm < 60) {
                    tz = (hh * 60 + mm) * (s[pos] == '-' ? -1 : 1);
                    s = detail::trim(s.substr(0, pos));
                }
            }
        }

        int year = 0, month = 0, day = 0;
        std::size_t date_len = 0;
        if (s.size() >= 10 && s[4] == '-' && s[7] == '-') {
            year = four_digits(s.substr(0, 4));
            month = two_digits(s.substr(5, 2));
            day = two_digits(s.substr(8, 2));
            date_len = 10;
        } else if (s.size() >= 10 && s[2] == '/' && s[5] == '/') {
            month = two_digits(s.substr(0, 2));
            day = two_digits(s.substr(3, 2));
            year = four_digits(s.substr(6, 4));
            date_len = 10;
        } else {
            return std::nullopt;
        }
        if (year < 0 || !valid_date(year, month, day)) return std::nullopt;

        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        ts.value = buf;

        std::string_view rest = s.substr(date_len);
        if (!rest.empty()) {
            if (rest.front() != ' ' && rest.front() != 'T') return std::nullopt;
            rest.remove_prefix(1);
            if (rest.size() < 8 || rest[2] != ':' || rest[5] != ':') return std::nullopt;
            int hh = two_digits(rest.substr(0, 2));
            int mm = two_digits(rest.substr(3, 2));
            int ss = two_digits(rest.substr(6, 2));
            if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 59) return std::nullopt;
            std::string frac;
            std::string_view tail = rest.substr(8);
            if (!tail.empty()) {
                if (tail.front() != '.') return std::nullopt;
                tail.remove_prefix(1);
                if (tail.empty()) return std::nullopt;
                for (char c : tail) {
                    if (c < '0' || c > '9') return std::nullopt;
                    frac.push_back(c);
                }
            }
            std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d", hh, mm, ss);
            ts.value += buf;
            if (!frac.empty()) ts.value += "." + frac;
        }
        ts.tz_minutes = tz;
        return ts;
    }

    /// Like parse(), but unparseable text yields a value-less Timestamp that
    /// still carries the original string.
    static Timestamp from_text(std::string_view text) {
        if (auto ts = parse(text)) return *ts;
        Timestamp t;
        t.original = std::string(text);
        return t;
    }

    /// (seconds, microseconds) since the civil epoch, offset applied.
    /// Call only when parsed().
    std::pair<std::int64_t, std::int32_t> instant() const {
        int year = four_digits(std::string_view(value).substr(0, 4));
        int month = two_digits(std::string_view(value).substr(5, 2));
        int day = two_digits(std::string_view(value).substr(8, 2));
        std::int64_t secs = days_from_civil(year, month, day) * 86400;
        std::int32_t micros = 0;
        if (value.size() > 10) {
            std::string_view t(value);
            t = t.substr(11);
            secs += two_digits(t.substr(0, 2)) * 3600 + two_digits(t.substr(3, 2)) * 60 +
                    two_digits(t.substr(6, 2));
            if (t.size() > 8) {
                std::string frac(t.substr(9));
                frac.resize(6, '0');
                micros = static_cast<std::int32_t>(std::stol(frac.substr(0, 6)));
            }
        }
        if (tz_minutes) secs -= static_cast<std::int64_t>(*tz_minutes) * 60;
        return {secs, micros};
    }

private:
    static int two_digits(std::string_view s) {
        if (s.size() != 2 || s[0] < '0' || s[0] > '9' || s[1] < '0' || s[1] > '9') return -1;
        return (s[0] - '0') * 10 + (s[1] - '0');
    }

    static int four_digits(std::string_view s) {
        if (s.size() != 4) return -1;
        int v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') return -1;
            v = v * 10 + (c - '0');
        }
        return v;
    }

    static bool valid_date(int y, int m, int d) {
        if (m < 1 || m > 12 || d < 1) return false;
        static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        int max_day = lengths[m - 1];
        bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        if (m == 2 && leap) max_day = 29;
        return d <= max_day;
    }

    static std::int64_t days_from_civil(int y, int m, int d) {
        y -= m <= 2;
        const int era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                             static_cast<unsigned>(d) - 1u;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
    }
};

/// Total order: parsed instants first (by instant, then offset, then
/// original), unparsed after (by original text).
inline bool timestamp_less(const Timestamp& a, const Timestamp& b) {
    if (a.parsed() != b.parsed()) return a.parsed();
    if (a.parsed()) {
        auto ia = a.instant(), ib = b.instant();
        if (ia != ib) return ia < ib;
    }
    return a.original < b.original;
}

// ---------------------------------------------------------------------------
// Objects
// ---------------------------------------------------------------------------

enum class Kind : std::uint8_t { trace, event };

inline std::string_view kind_name(Kind k) { return k == Kind::trace ? "trace" : "event"; }

struct ObjectHeader {
    std::string id;
    Kind kind = Kind::trace;
    std::optional<Category> category;  // required on traces, optional on events
    std::string schema_version = std::string(kSchemaVersion);

    bool operator==(const ObjectHeader&) const = default;
};

enum class SourceFormat : std::uint8_t { timeline_csv, relational_export, eventlog_export, delimited };

inline std::string_view source_format_name(SourceFormat f) {
    switch (f) {
        case SourceFormat::timeline_csv: return "timeline_csv";
        case SourceFormat::relational_export: return "relational_export";
        case SourceFormat::eventlog_export: return "eventlog_export";
        case SourceFormat::delimited: return "delimited";
    }
    return "delimited";
}

inline std::optional<SourceFormat> parse_source_format(std::string_view s) {
    for (SourceFormat f : {SourceFormat::timeline_csv, SourceFormat::relational_export,
                           SourceFormat::eventlog_export, SourceFormat::delimited}) {
        if (source_format_name(f) == s) return f;
    }
    return std::nullopt;
}

/// Where a trace came from: artifact name plus a row/record locator.
struct SourceRef {
    std::string path;
    std::string record_locator;
    SourceFormat format = SourceFormat::delimited;

    bool operator==(const SourceRef&) const = default;
};

/// One normalized field of a trace. The optional domain tag is assigned at
/// ingestion time from the active mapping profile.
struct AttributeValue {
    std::string value;
    std::optional<Domain> domain;

    bool operator==(const AttributeValue&) const = default;
};

/// A fact observed in a source artifact. `raw` mirrors every field of the
/// originating record verbatim (insertion order, duplicates allowed, null
/// marked as nullopt); `attributes` holds the profile-normalized view.
struct TraceObject {
    ObjectHeader header;
    std::string artifact_type;
    SourceRef source;
    std::vector<std::pair<std::string, AttributeValue>> attributes;
    std::vector<std::pair<std::string, std::optional<std::string>>> raw;

    const AttributeValue* attribute(std::string_view key) const {
        for (const auto& [k, v] : attributes) {
            if (k == key) return &v;
        }
        return nullptr;
    }

    std::optional<std::string> attribute_value(std::string_view key) const {
        const AttributeValue* a = attribute(key);
        if (!a) return std::nullopt;
        return a->value;
    }

    bool operator==(const TraceObject&) const = default;
};

/// Non-5W1H content of an event: provenance trace ids, optional reason text
/// (the paper folds "why" here) and leftover normalized fields.
struct EtcBlock {
    std::vector<std::string> source;
    std::optional<std::string> reason;
    std::vector<std::pair<std::string, std::string>> extras;

    bool operator==(const EtcBlock&) const = default;
};

/// A 5W1H statement inferred from one or more traces. At least one of the
/// five named domains must be populated; etc.source must resolve within the
/// owning collection.
struct EventObject {
    ObjectHeader header;
    std::optional<std::string> who;
    std::optional<Timestamp> when;
    std::optional<std::string> where;
    std::optional<std::string> what;
    std::optional<std::string> how;
    EtcBlock etc;

    bool operator==(const EventObject&) const = default;
};

struct CollectionMeta {
    std::string case_name;
    std::string created;
    std::string tool = std::string(kToolName);
    std::string tool_version = std::string(kToolVersion);

    bool operator==(const CollectionMeta&) const = default;
};

struct Collection {
    std::vector<TraceObject> traces;
    std::vector<EventObject> events;
    CollectionMeta meta;

    const TraceObject* find_trace(std::string_view id) const {
        for (const auto& t : traces) {
            if (t.header.id == id) return &t;
        }
        return nullptr;
    }

    bool operator==(const Collection&) const = default;
};

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

enum class IdMode : std::uint8_t { sequential, content_hash };

inline std::string sequential_id(std::string_view prefix, std::size_t n) {
    return std::string(prefix) + std::to_string(n);
}

/// Highest <n> among ids of the form "<prefix><n>"; 0 when none match.
inline std::size_t max_sequential_id(const std::vector<std::string>& ids, std::string_view prefix) {
    std::size_t best = 0;
    for (const auto& id : ids) {
        if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) continue;
        std::string_view digits = std::string_view(id).substr(prefix.size());
        std::size_t n = 0;
        bool ok = !digits.empty();
        for (char c : digits) {
            if (c < '0' || c > '9') {
                ok = false;
                break;
            }
            n = n * 10 + static_cast<std::size_t>(c - '0');
        }
        if (ok) best = std::max(best, n);
    }
    return best;
}

inline std::string content_hash_id(const TraceObject& t) {
    constexpr std::string_view null_marker("\x01<null>");
    std::uint64_t h = detail::fnv1a64(t.artifact_type);
    h = detail::fnv1a64(t.source.path, h);
    h = detail::fnv1a64(t.source.record_locator, h);
    for (const auto& [k, v] : t.raw) {
        h = detail::fnv1a64(k, h);
        h = detail::fnv1a64(v ? std::string_view(*v) : null_marker, h);
    }
    return "trace-" + detail::to_hex(h);
}

inline std::string content_hash_id(const EventObject& e) {
    constexpr std::string_view absent_marker("\x01<absent>");
    std::uint64_t h = detail::fnv1a64("event");
    for (const auto& part : {e.who, e.where, e.what, e.how}) {
        h = detail::fnv1a64(part ? std::string_view(*part) : absent_marker, h);
    }
    h = detail::fnv1a64(e.when ? e.when->display() : std::string(absent_marker), h);
    for (const auto& s : e.etc.source) h = detail::fnv1a64(s, h);
    return "event-" + detail::to_hex(h);
}

/// Rewrites every id to its content hash and remaps event source references.
/// Hash collisions between distinct objects get a "-<n>" suffix.
inline void assign_content_hash_ids(Collection& c) {
    std::unordered_map<std::string, std::string> remap;
    std::unordered_set<std::string> used;
    auto unique_id = [&](std::string id) {
        std::string candidate = id;
        for (std::size_t n = 2; used.count(candidate); ++n) {
            candidate = id + "-" + std::to_string(n);
        }
        used.insert(candidate);
        return candidate;
    };
    for (auto& t : c.traces) {
        std::string fresh = unique_id(content_hash_id(t));
        remap[t.header.id] = fresh;
        t.header.id = fresh;
    }
    for (auto& e : c.events) {
        e.header.id = unique_id(content_hash_id(e));
        for (auto& src : e.etc.source) {
            auto it = remap.find(src);
            if (it != remap.end()) src = it->second;
        }
    }
}

/// Single-threaded merge step: concatenates collections, renumbering all ids
/// sequentially and remapping event source references. Metadata comes from
/// the first part.
inline Collection merge_collections(const std::vector<Collection>& parts,
                                    std::string_view trace_prefix = "trace",
                                    std::string_view event_prefix = "event") {
    Collection out;
    if (!parts.empty()) out.meta = parts.front().meta;
    std::size_t tn = 0, en = 0;
    for (const auto& part : parts) {
        std::unordered_map<std::string, std::string> remap;
        for (const auto& t : part.traces) {
            TraceObject copy = t;
            copy.header.id = sequential_id(trace_prefix, ++tn);
            remap[t.header.id] = copy.header.id;
            out.traces.push_back(std::move(copy));
        }
        for (const auto& e : part.events) {
            EventObject copy = e;
            copy.header.id = sequential_id(event_prefix, ++en);
            for (auto& src : copy.etc.source) {
                auto it = remap.find(src);
                if (it != remap.end()) src = it->second;
            }
            out.events.push_back(std::move(copy));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
    std::string object_id;
    std::string code;
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

/// Collects every invariant violation in the collection. Empty report means
/// valid. Never mutates the input.
inline ValidationReport validate_collection(const Collection& c) {
    ValidationReport report;
    auto flag = [&](const std::string& id, std::string code, std::string message) {
        report.violations.push_back({id, std::move(code), std::move(message)});
    };

    std::unordered_set<std::string> seen;
    std::unordered_set<std::string> trace_ids;
    auto check_id = [&](const ObjectHeader& h) {
        if (h.id.empty()) {
            flag(h.id, "empty-id", "object has an empty id");
            return;
        }
        if (!seen.insert(h.id).second) {
            flag(h.id, "duplicate-id", "id '" + h.id + "' is not unique within the collection");
        }
    };

    for (const auto& t : c.traces) {
        check_id(t.header);
        if (!t.header.id.empty()) trace_ids.insert(t.header.id);
        if (t.header.kind != Kind::trace) {
            flag(t.header.id, "wrong-kind", "trace object header does not carry kind=trace");
        }
        if (!t.header.category) {
            flag(t.header.id, "missing-category", "trace object has no category");
        }
        if (t.source.path.empty()) {
            flag(t.header.id, "empty-source-path", "trace object has an empty source path");
        }
    }

    for (const auto& e : c.events) {
        check_id(e.header);
        if (e.header.kind != Kind::event) {
            flag(e.header.id, "wrong-kind", "event object header does not carry kind=event");
        }
        if (!e.who && !e.when && !e.where && !e.what && !e.how) {
            flag(e.header.id, "no-domain", "event populates none of who/when/where/what/how");
        }
        if (e.etc.source.empty()) {
            flag(e.header.id, "empty-source-list", "event etc.source is empty");
        }
        std::unordered_set<std::string> refs;
        for (const auto& src : e.etc.source) {
            if (!refs.insert(src).second) {
                flag(e.header.id, "duplicate-source-ref",
                     "etc.source lists '" + src + "' more than once");
            }
            if (!trace_ids.count(src)) {
                flag(e.header.id, "dangling-source-reference",
                     "dangling source reference: '" + src + "' is not a trace id in this collection");
            }
        }
        if (e.when && e.when->parsed()) {
            if (!Timestamp::parse(e.when->value)) {
                flag(e.header.id, "bad-timestamp",
                     "when value '" + e.when->value + "' is not ISO-8601");
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Sentence rendering
// ---------------------------------------------------------------------------

/// Deterministic one-line rendering:
///   "<who> <how> at <when> [in <where>] [on <what>] by <source ids>"
/// Absent domains drop their clause; a clause-leading preposition is dropped
/// so a single-domain event still reads naturally.
inline std::string render_sentence(const EventObject& e) {
    struct Clause {
        const char* preposition;
        std::string text;
    };
    std::vector<Clause> clauses;
    if (e.who) clauses.push_back({"", *e.who});
    if (e.how) clauses.push_back({"", *e.how});
    if (e.when) clauses.push_back({"at ", e.when->display()});
    if (e.where) clauses.push_back({"in ", *e.where});
    if (e.what) clauses.push_back({"on ", *e.what});

    std::string out;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (i == 0) {
            out += clauses[i].text;
        } else {
            out += ' ';
            out += clauses[i].preposition;
            out += clauses[i].text;
        }
    }
    if (!e.etc.source.empty()) {
        out += out.empty() ? "by " : " by ";
        for (std::size_t i = 0; i < e.etc.source.size(); ++i) {
            if (i) out += ", ";
            out += e.etc.source[i];
        }
    }
    return out;
}

}  // namespace fivewh
