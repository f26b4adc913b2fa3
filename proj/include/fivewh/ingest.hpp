#pragma once

// Format-conversion adapters: timeline CSV (17-column log2timeline layout),
// relational artifact database exports, event-log exports (markup or
// delimited) and generic delimited files. Each adapter emits one TraceObject
// per source record under a MappingProfile, preserving every original field
// verbatim in the trace's raw map. Malformed records are skipped and
// reported, never fatal.

#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fivewh/detail/csv.hpp"
#include "fivewh/model.hpp"
#include "fivewh/profile.hpp"

namespace fivewh {

struct IngestIssue {
    std::string locator;
    std::string message;
};

struct IngestReport {
    std::size_t records_seen = 0;
    std::size_t produced = 0;
    std::size_t skipped = 0;
    std::vector<IngestIssue> issues;    // skipped records
    std::vector<IngestIssue> warnings;  // non-fatal notes (e.g. encoding repair)

    void note_skip(std::string locator, std::string message) {
        ++skipped;
        issues.push_back({std::move(locator), std::move(message)});
    }
};

// Raw fields of one source record, in source order; nullopt marks a
// relational NULL.
using RawRecord = std::vector<std::pair<std::string, std::optional<std::string>>>;

namespace detail_ingest {

/// Sanitizes all keys/values to valid UTF-8. Returns true when anything was
/// repaired.
inline bool sanitize_record(RawRecord& rec) {
    bool replaced = false;
    std::string buf;
    for (auto& [key, value] : rec) {
        if (detail::utf8_sanitize(key, buf)) replaced = true;
        key = buf;
        if (value) {
            if (detail::utf8_sanitize(*value, buf)) replaced = true;
            *value = buf;
        }
    }
    return replaced;
}

/// Builds a trace from a sanitized record: profile-mapped columns populate
/// attributes (rule order), everything stays in raw. The profile's
/// artifact_type is injected as leading attribute "ArtifactType" unless a
/// rule already produces that key.
inline TraceObject make_trace(const MappingProfile& profile, SourceRef source, RawRecord raw,
                              std::size_t seq, bool encoding_replaced) {
    TraceObject t;
    t.header.id = sequential_id(profile.id_prefix, seq);
    t.header.kind = Kind::trace;
    t.header.category = profile.category;
    t.artifact_type = profile.artifact_type;
    t.source = std::move(source);

    bool have_artifact_type_rule = false;
    for (const auto& rule : profile.field_rules) {
        if (rule.normalized_key == "ArtifactType") have_artifact_type_rule = true;
        for (const auto& [key, value] : raw) {
            if (key != rule.source_key) continue;
            if (value) {
                t.attributes.emplace_back(rule.normalized_key,
                                          AttributeValue{apply_transform(rule.transform, *value),
                                                         rule.domain});
            }
            break;  // rule applies to the first occurrence only
        }
    }
    if (!have_artifact_type_rule) {
        t.attributes.insert(t.attributes.begin(),
                            {"ArtifactType", AttributeValue{profile.artifact_type, std::nullopt}});
    }
    if (encoding_replaced) {
        t.attributes.emplace_back("EncodingReplaced", AttributeValue{"true", std::nullopt});
    }
    t.raw = std::move(raw);
    return t;
}

inline std::string json_scalar_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

}  // namespace detail_ingest

// ---------------------------------------------------------------------------
// Timeline CSV (log2timeline l2tcsv layout)
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 17> kTimelineColumns = {
    "date", "time", "timezone", "MACB", "source", "sourcetype", "type", "user", "host",
    "short", "desc", "version", "filename", "inode", "notes", "format", "extra"};

/// Per-row category lookup keyed on the timeline's source / sourcetype
/// columns; rows matching neither fall back to the profile category.
struct TimelineCategoryMap {
    std::vector<std::pair<std::string, Category>> by_source;
    std::vector<std::pair<std::string, Category>> by_sourcetype;

    std::optional<Category> lookup(std::string_view source, std::string_view sourcetype) const {
        for (const auto& [k, c] : by_source) {
            if (k == source) return c;
        }
        for (const auto& [k, c] : by_sourcetype) {
            if (k == sourcetype) return c;
        }
        return std::nullopt;
    }
};

inline TimelineCategoryMap default_timeline_categories() {
    TimelineCategoryMap m;
    m.by_source = {
        {"FILE", Category::system}, {"REG", Category::system},  {"EVT", Category::system},
        {"LOG", Category::system},  {"META", Category::system}, {"WEBHIST", Category::web},
        {"PE", Category::executable}, {"LNK", Category::executable}, {"CHAT", Category::message},
        {"EMAIL", Category::email}, {"CALL", Category::call},   {"RECBIN", Category::system},
    };
    m.by_sourcetype = {
        {"WinEVTX", Category::system},
        {"Firefox History", Category::web},
        {"Chrome History", Category::web},
    };
    return m;
}

inline TimelineCategoryMap load_timeline_categories(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::profile_syntax,
                    std::string("category map is not valid JSON: ") + e.what());
    }
    TimelineCategoryMap m;
    auto read_section = [&](const char* key, std::vector<std::pair<std::string, Category>>& out) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_object()) {
            throw Error(ErrorCode::profile_syntax, std::string(key) + " must be an object");
        }
        for (const auto& [k, v] : doc[key].items()) {
            if (!v.is_string()) {
                throw Error(ErrorCode::profile_syntax, "category values must be strings");
            }
            auto cat = parse_category(v.get<std::string>());
            if (!cat) {
                throw Error(ErrorCode::unknown_category,
                            "unknown category '" + v.get<std::string>() + "'");
            }
            out.emplace_back(k, *cat);
        }
    };
    read_section("by_source", m.by_source);
    read_section("by_sourcetype", m.by_sourcetype);
    return m;
}

/// One TraceObject per data row of a l2tcsv timeline. Throws MalformedHeader
/// (ErrorCode::malformed_header) when the column set does not match; rows
/// with the wrong field count are skipped and reported.
inline std::vector<TraceObject> ingest_timeline_csv(std::istream& in, const MappingProfile& profile,
                                                    std::string_view source_path,
                                                    IngestReport* report = nullptr,
                                                    const TimelineCategoryMap* categories = nullptr) {
    static const TimelineCategoryMap default_map = default_timeline_categories();
    const TimelineCategoryMap& cat_map = categories ? *categories : default_map;

    detail::CsvReader reader(in);
    detail::CsvRecord rec;
    if (!reader.next(rec)) {
        throw Error(ErrorCode::malformed_header, "timeline file has no header row");
    }
    if (rec.fields.size() != kTimelineColumns.size()) {
        throw Error(ErrorCode::malformed_header,
                    "timeline header has " + std::to_string(rec.fields.size()) +
                        " columns, expected " + std::to_string(kTimelineColumns.size()));
    }
    for (std::size_t i = 0; i < kTimelineColumns.size(); ++i) {
        if (detail::trim(rec.fields[i]) != kTimelineColumns[i]) {
            throw Error(ErrorCode::malformed_header,
                        "timeline header column " + std::to_string(i + 1) + " is '" +
                            rec.fields[i] + "', expected '" + std::string(kTimelineColumns[i]) + "'");
        }
    }

    std::vector<TraceObject> traces;
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    std::size_t row = 0;
    while (reader.next(rec)) {
        ++row;
        ++rep.records_seen;
        std::string locator = "row" + std::to_string(row);
        if (rec.fields.size() != kTimelineColumns.size()) {
            rep.note_skip(locator, "row " + std::to_string(row) + " has " +
                                       std::to_string(rec.fields.size()) + " fields, expected " +
                                       std::to_string(kTimelineColumns.size()));
            continue;
        }
        RawRecord raw;
        raw.reserve(kTimelineColumns.size());
        for (std::size_t i = 0; i < kTimelineColumns.size(); ++i) {
            raw.emplace_back(std::string(kTimelineColumns[i]), rec.fields[i]);
        }
        bool replaced = detail_ingest::sanitize_record(raw);
        if (replaced) {
            rep.warnings.push_back({locator, "invalid UTF-8 bytes replaced with U+FFFD"});
        }
        SourceRef src{std::string(source_path), locator, SourceFormat::timeline_csv};
        TraceObject t = detail_ingest::make_trace(profile, std::move(src), std::move(raw),
                                                  traces.size() + 1, replaced);
        if (auto cat = cat_map.lookup(rec.fields[4], rec.fields[5])) {
            t.header.category = *cat;
        }
        traces.push_back(std::move(t));
        ++rep.produced;
    }
    return traces;
}

// ---------------------------------------------------------------------------
// Relational artifact database exports
// ---------------------------------------------------------------------------

/// Reads one table of an exported relational snapshot:
///   {"database": "call_log.db", "tables": {"call_log": {"columns": [...],
///    "rows": [[...], ...]}}}
/// JSON null cells stay null in raw and produce no attribute.
inline std::vector<TraceObject> ingest_relational_export(std::istream& in, std::string_view table,
                                                         const MappingProfile& profile,
                                                         std::string_view source_path = "",
                                                         IngestReport* report = nullptr) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::unreadable_database,
                    std::string("database export is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("tables") || !doc["tables"].is_object()) {
        throw Error(ErrorCode::unreadable_database, "database export has no tables object");
    }
    if (!doc["tables"].contains(table)) {
        throw Error(ErrorCode::table_not_found,
                    "table '" + std::string(table) + "' not found in export");
    }
    const nlohmann::json& tbl = doc["tables"][std::string(table)];
    if (!tbl.is_object() || !tbl.contains("columns") || !tbl["columns"].is_array() ||
        !tbl.contains("rows") || !tbl["rows"].is_array()) {
        throw Error(ErrorCode::unreadable_database,
                    "table '" + std::string(table) + "' lacks columns/rows arrays");
    }
    std::vector<std::string> columns;
    for (const auto& c : tbl["columns"]) {
        if (!c.is_string()) {
            throw Error(ErrorCode::unreadable_database, "column names must be strings");
        }
        columns.push_back(c.get<std::string>());
    }

    std::string path = std::string(source_path);
    if (doc.contains("database") && doc["database"].is_string() &&
        !doc["database"].get<std::string>().empty()) {
        path = doc["database"].get<std::string>();
    }

    std::vector<TraceObject> traces;
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    std::size_t row = 0;
    for (const auto& row_json : tbl["rows"]) {
        ++row;
        ++rep.records_seen;
        std::string locator = std::string(table) + ":" + std::to_string(row);
        if (!row_json.is_array() || row_json.size() != columns.size()) {
            rep.note_skip(locator, "row " + std::to_string(row) + " does not match the " +
                                       std::to_string(columns.size()) + "-column layout");
            continue;
        }
        RawRecord raw;
        raw.reserve(columns.size());
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const auto& cell = row_json[i];
            if (cell.is_null()) {
                raw.emplace_back(columns[i], std::nullopt);
            } else {
                raw.emplace_back(columns[i], detail_ingest::json_scalar_to_string(cell));
            }
        }
        bool replaced = detail_ingest::sanitize_record(raw);
        if (replaced) {
            rep.warnings.push_back({locator, "invalid UTF-8 bytes replaced with U+FFFD"});
        }
        SourceRef src{path, locator, SourceFormat::relational_export};
        traces.push_back(detail_ingest::make_trace(profile, std::move(src), std::move(raw),
                                                   traces.size() + 1, replaced));
        ++rep.produced;
    }
    return traces;
}

// ---------------------------------------------------------------------------
// Event-log exports
// ---------------------------------------------------------------------------

namespace detail_ingest {

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '&') {
            auto rest = s.substr(i);
            if (rest.rfind("&amp;", 0) == 0) { out += '&'; i += 5; continue; }
            if (rest.rfind("&lt;", 0) == 0) { out += '<'; i += 4; continue; }
            if (rest.rfind("&gt;", 0) == 0) { out += '>'; i += 4; continue; }
            if (rest.rfind("&quot;", 0) == 0) { out += '"'; i += 6; continue; }
            if (rest.rfind("&apos;", 0) == 0) { out += '\''; i += 6; continue; }
        }
        out += s[i++];
    }
    return out;
}

// Parses the fields of one <record>...</record> body. Returns nullopt on a
// structurally broken record.
inline std::optional<RawRecord> parse_markup_record(std::string_view body) {
    RawRecord rec;
    std::size_t i = 0;
    while (true) {
        std::size_t open = body.find('<', i);
        if (open == std::string_view::npos) {
            if (!detail::trim(body.substr(i)).empty()) return std::nullopt;
            return rec;
        }
        if (!detail::trim(body.substr(i, open - i)).empty()) return std::nullopt;
        std::size_t close = body.find('>', open);
        if (close == std::string_view::npos) return std::nullopt;
        std::string name(detail::trim(body.substr(open + 1, close - open - 1)));
        if (name.empty() || name.front() == '/') return std::nullopt;
        std::string end_tag = "</" + name + ">";
        std::size_t end = body.find(end_tag, close + 1);
        if (end == std::string_view::npos) return std::nullopt;
        rec.emplace_back(name, decode_entities(body.substr(close + 1, end - close - 1)));
        i = end + end_tag.size();
    }
}

}  // namespace detail_ingest

/// One TraceObject per record of an event-log export. Markup form:
/// <record><EventID>4624</EventID>...</record> blocks; anything not starting
/// with '<' is treated as a header-bearing delimited file. A record field
/// named "file" names the originating artifact and becomes the trace's
/// source path (it stays in raw). Broken records are skipped and reported.
inline std::vector<TraceObject> ingest_eventlog_export(std::istream& in,
                                                       const MappingProfile& profile,
                                                       std::string_view source_path,
                                                       IngestReport* report = nullptr) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    IngestReport local;
    IngestReport& rep = report ? *report : local;
    std::vector<TraceObject> traces;

    std::string_view rest = detail::trim(text);
    if (rest.empty() || rest.front() == '<') {
        // markup form
        std::size_t pos = 0;
        std::size_t n = 0;
        while (true) {
            std::size_t open = text.find("<record>", pos);
            if (open == std::string_view::npos) break;
            ++n;
            ++rep.records_seen;
            std::string locator = "record" + std::to_string(n);
            std::size_t end = text.find("</record>", open);
            if (end == std::string_view::npos) {
                rep.note_skip(locator, "record " + std::to_string(n) + " is not closed");
                break;
            }
            std::string_view body(text.data() + open + 8, end - open - 8);
            pos = end + 9;
            auto fields = detail_ingest::parse_markup_record(body);
            if (!fields) {
                rep.note_skip(locator, "record " + std::to_string(n) + " is malformed");
                continue;
            }
            bool replaced = detail_ingest::sanitize_record(*fields);
            if (replaced) {
                rep.warnings.push_back({locator, "invalid UTF-8 bytes replaced with U+FFFD"});
            }
            std::string path(source_path);
            for (const auto& [k, v] : *fields) {
                if (k == "file" && v && !v->empty()) {
                    path = *v;
                    break;
                }
            }
            SourceRef src{path, locator, SourceFormat::eventlog_export};
            traces.push_back(detail_ingest::make_trace(profile, std::move(src), std::move(*fields),
                                                       traces.size() + 1, replaced));
            ++rep.produced;
        }
        return traces;
    }

    // delimited form
    std::istringstream replay(text);
    detail::CsvReader reader(replay);
    detail::CsvRecord rec;
    if (!reader.next(rec) || rec.fields.empty() ||
        (rec.fields.size() == 1 && detail::trim(rec.fields[0]).empty())) {
        throw Error(ErrorCode::malformed_header, "event-log export has no header row");
    }
    std::vector<std::string> columns = rec.fields;
    std::size_t row = 0;
    while (reader.next(rec)) {
        ++row;
        ++rep.records_seen;
        std::string locator = "row" + std::to_string(row);
        if (rec.fields.size() != columns.size()) {
            rep.note_skip(locator, "row " + std::to_string(row) + " has " +
                                       std::to_string(rec.fields.size()) + " fields, expected " +
                                       std::to_string(columns.size()));
            continue;
        }
        RawRecord raw;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            raw.emplace_back(columns[i], rec.fields[i]);
        }
        bool replaced = detail_ingest::sanitize_record(raw);
        if (replaced) {
            rep.warnings.push_back({locator, "invalid UTF-8 bytes replaced with U+FFFD"});
        }
        std::string path(source_path);
        for (const auto& [k, v] : raw) {
            if (k == "file" && v && !v->empty()) {
                path = *v;
                break;
            }
        }
        SourceRef src{path, locator, SourceFormat::eventlog_export};
        traces.push_back(detail_ingest::make_trace(profile, std::move(src), std::move(raw),
                                                   traces.size() + 1, replaced));
        ++rep.produced;
    }
    return traces;
}

// ---------------------------------------------------------------------------
// Generic delimited files
// ---------------------------------------------------------------------------

/// Header-bearing delimited text with arbitrary columns; one TraceObject per
/// data row.
inline std::vector<TraceObject> ingest_delimited(std::istream& in, const MappingProfile& profile,
                                                 std::string_view source_path,
                                                 IngestReport* report = nullptr, char sep = ',') {
    detail::CsvReader reader(in, sep);
    detail::CsvRecord rec;
    if (!reader.next(rec) || rec.fields.empty() ||
        (rec.fields.size() == 1 && detail::trim(rec.fields[0]).empty())) {
        throw Error(ErrorCode::malformed_header, "delimited file has no header row");
    }
    std::vector<std::string> columns = rec.fields;

    std::vector<TraceObject> traces;
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    std::size_t row = 0;
    while (reader.next(rec)) {
        ++row;
        ++rep.records_seen;
        std::string locator = "row" + std::to_string(row);
        if (rec.fields.size() != columns.size()) {
            rep.note_skip(locator, "row " + std::to_string(row) + " has " +
                                       std::to_string(rec.fields.size()) + " fields, expected " +
                                       std::to_string(columns.size()));
            continue;
        }
        RawRecord raw;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            raw.emplace_back(columns[i], rec.fields[i]);
        }
        bool replaced = detail_ingest::sanitize_record(raw);
        if (replaced) {
            rep.warnings.push_back({locator, "invalid UTF-8 bytes replaced with U+FFFD"});
        }
        SourceRef src{std::string(source_path), locator, SourceFormat::delimited};
        traces.push_back(detail_ingest::make_trace(profile, std::move(src), std::move(raw),
                                                   traces.size() + 1, replaced));
        ++rep.produced;
    }
    return traces;
}

}  // namespace fivewh
