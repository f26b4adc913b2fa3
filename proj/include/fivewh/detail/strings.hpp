#pragma once

// Small string helpers shared across the library. ASCII-oriented except for
// the UTF-8 scanning and the Latin composition table used by the verifier.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fivewh::detail {

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
    return s;
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        double v = std::stod(std::string(s), &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

// Accepts "1a4h", "0x1a4", or bare hex digits.
inline std::optional<std::uint64_t> parse_hex(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.substr(0, 2) == "0x" || s.substr(0, 2) == "0X")) {
        s.remove_prefix(2);
    } else if (!s.empty() && (s.back() == 'h' || s.back() == 'H')) {
        s.remove_suffix(1);
    }
    if (s.empty()) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : s) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else return std::nullopt;
        v = v * 16 + static_cast<std::uint64_t>(d);
    }
    return v;
}

inline std::string to_hex(std::uint64_t v) {
    if (v == 0) return "0";
    static const char digits[] = "0123456789abcdef";
    std::string out;
    while (v > 0) {
        out.insert(out.begin(), digits[v & 0xF]);
        v >>= 4;
    }
    return out;
}

// Pattern match with '*' as the only wildcard; everything else is literal.
inline bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// UTF-8 handling
// ---------------------------------------------------------------------------

// Decode one code point at `i`; on malformed input returns nullopt and leaves
// `i` advanced past a single byte.
inline std::optional<char32_t> utf8_next(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return static_cast<char32_t>(b0);
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    else { ++i; return std::nullopt; }
    if (i + static_cast<std::size_t>(len) > s.size()) { ++i; return std::nullopt; }
    for (int k = 1; k < len; ++k) {
        unsigned char bk = byte(i + static_cast<std::size_t>(k));
        if ((bk & 0xC0) != 0x80) { ++i; return std::nullopt; }
        cp = (cp << 6) | (bk & 0x3F);
    }
    // Reject overlong forms and surrogates.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
        ++i;
        return std::nullopt;
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

inline void utf8_append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Replaces malformed byte sequences with U+FFFD. Returns whether anything
// was replaced.
inline bool utf8_sanitize(std::string_view in, std::string& out) {
    bool replaced = false;
    out.clear();
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        auto cp = utf8_next(in, i);
        if (cp) {
            utf8_append(out, *cp);
        } else {
            utf8_append(out, 0xFFFD);
            replaced = true;
        }
    }
    return replaced;
}

inline std::size_t codepoint_count(std::string_view s) {
    std::size_t n = 0, i = 0;
    while (i < s.size()) {
        utf8_next(s, i);
        ++n;
    }
    return n;
}

// Canonical composition for the common Latin combining sequences (base letter
// followed by one combining mark). Marks outside the table pass through.
inline std::optional<char32_t> compose_latin(char32_t base, char32_t mark) {
    struct Entry { char32_t base, mark, composed; };
    static constexpr Entry table[] = {
        // U+0300 combining grave
        {U'A', 0x300, 0xC0}, {U'E', 0x300, 0xC8}, {U'I', 0x300, 0xCC}, {U'O', 0x300, 0xD2},
        {U'U', 0x300, 0xD9}, {U'a', 0x300, 0xE0}, {U'e', 0x300, 0xE8}, {U'i', 0x300, 0xEC},
        {U'o', 0x300, 0xF2}, {U'u', 0x300, 0xF9},
        // U+0301 combining acute
        {U'A', 0x301, 0xC1}, {U'E', 0x301, 0xC9}, {U'I', 0x301, 0xCD}, {U'O', 0x301, 0xD3},
        {U'U', 0x301, 0xDA}, {U'Y', 0x301, 0xDD}, {U'a', 0x301, 0xE1}, {U'e', 0x301, 0xE9},
        {U'i', 0x301, 0xED}, {U'o', 0x301, 0xF3}, {U'u', 0x301, 0xFA}, {U'y', 0x301, 0xFD},
        {U'C', 0x301, 0x106}, {U'c', 0x301, 0x107}, {U'N', 0x301, 0x143}, {U'n', 0x301, 0x144},
        {U'S', 0x301, 0x15A}, {U's', 0x301, 0x15B}, {U'Z', 0x301, 0x179}, {U'z', 0x301, 0x17A},
        // U+0302 combining circumflex
        {U'A', 0x302, 0xC2}, {U'E', 0x302, 0xCA}, {U'I', 0x302, 0xCE}, {U'O', 0x302, 0xD4},
        {U'U', 0x302, 0xDB}, {U'a', 0x302, 0xE2}, {U'e', 0x302, 0xEA}, {U'i', 0x302, 0xEE},
        {U'o', 0x302, 0xF4}, {U'u', 0x302, 0xFB},
        // U+0303 combining tilde
        {U'A', 0x303, 0xC3}, {U'N', 0x303, 0xD1}, {U'O', 0x303, 0xD5},
        {U'a', 0x303, 0xE3}, {U'n', 0x303, 0xF1}, {U'o', 0x303, 0xF5},
        // U+0308 combining diaeresis
        {U'A', 0x308, 0xC4}, {U'E', 0x308, 0xCB}, {U'I', 0x308, 0xCF}, {U'O', 0x308, 0xD6},
        {U'U', 0x308, 0xDC}, {U'Y', 0x308, 0x178}, {U'a', 0x308, 0xE4}, {U'e', 0x308, 0xEB},
        {U'i', 0x308, 0xEF}, {U'o', 0x308, 0xF6}, {U'u', 0x308, 0xFC}, {U'y', 0x308, 0xFF},
        // U+030A combining ring above
        {U'A', 0x30A, 0xC5}, {U'a', 0x30A, 0xE5},
        // U+030C combining caron
        {U'C', 0x30C, 0x10C}, {U'c', 0x30C, 0x10D}, {U'S', 0x30C, 0x160}, {U's', 0x30C, 0x161},
        {U'Z', 0x30C, 0x17D}, {U'z', 0x30C, 0x17E},
        // U+0327 combining cedilla
        {U'C', 0x327, 0xC7}, {U'c', 0x327, 0xE7}, {U'S', 0x327, 0x15E}, {U's', 0x327, 0x15F},
    };
    for (const auto& e : table) {
        if (e.base == base && e.mark == mark) return e.composed;
    }
    return std::nullopt;
}

// NFC-style composition restricted to the Latin table above.
inline std::string compose_nfc_latin(std::string_view s) {
    std::vector<char32_t> cps;
    std::size_t i = 0;
    while (i < s.size()) {
        auto cp = utf8_next(s, i);
        cps.push_back(cp.value_or(0xFFFD));
    }
    std::string out;
    out.reserve(s.size());
    std::size_t k = 0;
    while (k < cps.size()) {
        if (k + 1 < cps.size()) {
            if (auto composed = compose_latin(cps[k], cps[k + 1])) {
                utf8_append(out, *composed);
                k += 2;
                continue;
            }
        }
        utf8_append(out, cps[k]);
        ++k;
    }
    return out;
}

}  // namespace fivewh::detail
