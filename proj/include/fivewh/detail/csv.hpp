#pragma once

// Minimal RFC-4180-style reader: quoted fields, embedded separators and
// newlines, CRLF tolerant. Field values come back unescaped and verbatim.

#include <istream>
#include <string>
#include <vector>

namespace fivewh::detail {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based line of the record's first byte
};

class CsvReader {
public:
    explicit CsvReader(std::istream& in, char sep = ',') : in_(in), sep_(sep) {}

    // Reads one record; false on clean EOF.
    bool next(CsvRecord& rec) {
        rec.fields.clear();
        int c = in_.get();
        if (c == std::istream::traits_type::eof()) return false;
        rec.line = line_;
        std::string field;
        bool quoted = false;
        while (true) {
            if (c == std::istream::traits_type::eof()) {
                rec.fields.push_back(std::move(field));
                return true;
            }
            char ch = static_cast<char>(c);
            if (ch == '\n') ++line_;
            if (quoted) {
                if (ch == '"') {
                    int peek = in_.peek();
                    if (peek == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(ch);
                }
            } else if (ch == '"' && field.empty()) {
                quoted = true;
            } else if (ch == sep_) {
                rec.fields.push_back(std::move(field));
                field.clear();
            } else if (ch == '\n') {
                if (!field.empty() && field.back() == '\r') field.pop_back();
                rec.fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(ch);
            }
            c = in_.get();
        }
    }

private:
    std::istream& in_;
    char sep_;
    std::size_t line_ = 1;
};

}  // namespace fivewh::detail
