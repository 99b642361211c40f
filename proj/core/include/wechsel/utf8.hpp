#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wechsel::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
    char32_t cp;
    std::size_t len;  // bytes consumed, >= 1
    bool valid;
};

// Decode one scalar at byte offset `pos`. Invalid sequences consume a single
// byte and report valid=false (caller decides the replacement policy).
inline Decoded decode_next(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1, true};

    auto cont = [&](std::size_t i) {
        return pos + i < s.size() &&
               (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
    };
    auto cb = [&](std::size_t i) {
        return static_cast<char32_t>(static_cast<unsigned char>(s[pos + i]) & 0x3F);
    };

    if ((b0 & 0xE0) == 0xC0) {
        if (!cont(1)) return {kReplacement, 1, false};
        char32_t cp = ((b0 & 0x1Fu) << 6) | cb(1);
        if (cp < 0x80) return {kReplacement, 1, false};  // overlong
        return {cp, 2, true};
    }
    if ((b0 & 0xF0) == 0xE0) {
        if (!cont(1) || !cont(2)) return {kReplacement, 1, false};
        char32_t cp = ((b0 & 0x0Fu) << 12) | (cb(1) << 6) | cb(2);
        if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return {kReplacement, 1, false};
        return {cp, 3, true};
    }
    if ((b0 & 0xF8) == 0xF0) {
        if (!cont(1) || !cont(2) || !cont(3)) return {kReplacement, 1, false};
        char32_t cp = ((b0 & 0x07u) << 18) | (cb(1) << 12) | (cb(2) << 6) | cb(3);
        if (cp < 0x10000 || cp > 0x10FFFF) return {kReplacement, 1, false};
        return {cp, 4, true};
    }
    return {kReplacement, 1, false};
}

inline void append(std::string& out, char32_t cp) {
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

inline std::string encode(char32_t cp) {
    std::string s;
    append(s, cp);
    return s;
}

// Byte offset of every scalar plus an end sentinel. Invalid bytes count as
// one scalar each so lengths stay defined on arbitrary input.
inline std::vector<std::size_t> scalar_offsets(std::string_view s) {
    std::vector<std::size_t> offs;
    offs.reserve(s.size() + 1);
    std::size_t pos = 0;
    while (pos < s.size()) {
        offs.push_back(pos);
        pos += decode_next(s, pos).len;
    }
    offs.push_back(s.size());
    return offs;
}

inline std::vector<char32_t> decode_string(std::string_view s) {
    std::vector<char32_t> cps;
    cps.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto d = decode_next(s, pos);
        cps.push_back(d.valid ? d.cp : kReplacement);
        pos += d.len;
    }
    return cps;
}

// Re-decode raw bytes, replacing every invalid byte with U+FFFD.
inline std::string sanitize(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        auto d = decode_next(bytes, pos);
        append(out, d.valid ? d.cp : kReplacement);
        pos += d.len;
    }
    return out;
}

}  // namespace wechsel::utf8
