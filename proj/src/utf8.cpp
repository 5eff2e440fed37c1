#include "divprof/utf8.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <utility>

namespace divprof::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

// (base, combining) -> precomposed. Covers the Latin-1 Supplement and the
// common Latin Extended-A diacritics; enough to collapse the decomposed
// spellings JSON serializers tend to produce.
const std::map<std::pair<char32_t, char32_t>, char32_t>& compose_table() {
    static const std::map<std::pair<char32_t, char32_t>, char32_t> table = {
        // grave U+0300
        {{U'A', 0x0300}, 0x00C0}, {{U'E', 0x0300}, 0x00C8}, {{U'I', 0x0300}, 0x00CC},
        {{U'O', 0x0300}, 0x00D2}, {{U'U', 0x0300}, 0x00D9},
        {{U'a', 0x0300}, 0x00E0}, {{U'e', 0x0300}, 0x00E8}, {{U'i', 0x0300}, 0x00EC},
        {{U'o', 0x0300}, 0x00F2}, {{U'u', 0x0300}, 0x00F9},
        // acute U+0301
        {{U'A', 0x0301}, 0x00C1}, {{U'E', 0x0301}, 0x00C9}, {{U'I', 0x0301}, 0x00CD},
        {{U'O', 0x0301}, 0x00D3}, {{U'U', 0x0301}, 0x00DA}, {{U'Y', 0x0301}, 0x00DD},
        {{U'C', 0x0301}, 0x0106}, {{U'N', 0x0301}, 0x0143}, {{U'S', 0x0301}, 0x015A},
        {{U'Z', 0x0301}, 0x0179},
        {{U'a', 0x0301}, 0x00E1}, {{U'e', 0x0301}, 0x00E9}, {{U'i', 0x0301}, 0x00ED},
        {{U'o', 0x0301}, 0x00F3}, {{U'u', 0x0301}, 0x00FA}, {{U'y', 0x0301}, 0x00FD},
        {{U'c', 0x0301}, 0x0107}, {{U'n', 0x0301}, 0x0144}, {{U's', 0x0301}, 0x015B},
        {{U'z', 0x0301}, 0x017A},
        // circumflex U+0302
        {{U'A', 0x0302}, 0x00C2}, {{U'E', 0x0302}, 0x00CA}, {{U'I', 0x0302}, 0x00CE},
        {{U'O', 0x0302}, 0x00D4}, {{U'U', 0x0302}, 0x00DB},
        {{U'a', 0x0302}, 0x00E2}, {{U'e', 0x0302}, 0x00EA}, {{U'i', 0x0302}, 0x00EE},
        {{U'o', 0x0302}, 0x00F4}, {{U'u', 0x0302}, 0x00FB},
        // tilde U+0303
        {{U'A', 0x0303}, 0x00C3}, {{U'N', 0x0303}, 0x00D1}, {{U'O', 0x0303}, 0x00D5},
        {{U'a', 0x0303}, 0x00E3}, {{U'n', 0x0303}, 0x00F1}, {{U'o', 0x0303}, 0x00F5},
        // macron U+0304
        {{U'A', 0x0304}, 0x0100}, {{U'E', 0x0304}, 0x0112}, {{U'I', 0x0304}, 0x012A},
        {{U'O', 0x0304}, 0x014C}, {{U'U', 0x0304}, 0x016A},
        {{U'a', 0x0304}, 0x0101}, {{U'e', 0x0304}, 0x0113}, {{U'i', 0x0304}, 0x012B},
        {{U'o', 0x0304}, 0x014D}, {{U'u', 0x0304}, 0x016B},
        // breve U+0306
        {{U'A', 0x0306}, 0x0102}, {{U'G', 0x0306}, 0x011E},
        {{U'a', 0x0306}, 0x0103}, {{U'g', 0x0306}, 0x011F},
        // dot above U+0307
        {{U'Z', 0x0307}, 0x017B}, {{U'z', 0x0307}, 0x017C},
        {{U'E', 0x0307}, 0x0116}, {{U'e', 0x0307}, 0x0117},
        // diaeresis U+0308
        {{U'A', 0x0308}, 0x00C4}, {{U'E', 0x0308}, 0x00CB}, {{U'I', 0x0308}, 0x00CF},
        {{U'O', 0x0308}, 0x00D6}, {{U'U', 0x0308}, 0x00DC},
        {{U'a', 0x0308}, 0x00E4}, {{U'e', 0x0308}, 0x00EB}, {{U'i', 0x0308}, 0x00EF},
        {{U'o', 0x0308}, 0x00F6}, {{U'u', 0x0308}, 0x00FC}, {{U'y', 0x0308}, 0x00FF},
        // ring above U+030A
        {{U'A', 0x030A}, 0x00C5}, {{U'U', 0x030A}, 0x016E},
        {{U'a', 0x030A}, 0x00E5}, {{U'u', 0x030A}, 0x016F},
        // double acute U+030B
        {{U'O', 0x030B}, 0x0150}, {{U'U', 0x030B}, 0x0170},
        {{U'o', 0x030B}, 0x0151}, {{U'u', 0x030B}, 0x0171},
        // caron U+030C
        {{U'C', 0x030C}, 0x010C}, {{U'S', 0x030C}, 0x0160}, {{U'Z', 0x030C}, 0x017D},
        {{U'E', 0x030C}, 0x011A}, {{U'R', 0x030C}, 0x0158}, {{U'D', 0x030C}, 0x010E},
        {{U'T', 0x030C}, 0x0164}, {{U'N', 0x030C}, 0x0147}, {{U'L', 0x030C}, 0x013D},
        {{U'c', 0x030C}, 0x010D}, {{U's', 0x030C}, 0x0161}, {{U'z', 0x030C}, 0x017E},
        {{U'e', 0x030C}, 0x011B}, {{U'r', 0x030C}, 0x0159}, {{U'd', 0x030C}, 0x010F},
        {{U't', 0x030C}, 0x0165}, {{U'n', 0x030C}, 0x0148}, {{U'l', 0x030C}, 0x013E},
        // cedilla U+0327
        {{U'C', 0x0327}, 0x00C7}, {{U'S', 0x0327}, 0x015E}, {{U'T', 0x0327}, 0x0162},
        {{U'c', 0x0327}, 0x00E7}, {{U's', 0x0327}, 0x015F}, {{U't', 0x0327}, 0x0163},
        // ogonek U+0328
        {{U'A', 0x0328}, 0x0104}, {{U'E', 0x0328}, 0x0118},
        {{U'a', 0x0328}, 0x0105}, {{U'e', 0x0328}, 0x0119},
    };
    return table;
}

} // namespace

char32_t decode_next(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    std::size_t len = 0;
    char32_t c = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        c = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        c = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        c = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + len > s.size()) {
        ++i;
        return kReplacement;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if (!is_continuation(b)) {
            ++i;
            return kReplacement;
        }
        c = (c << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    const bool overlong = (len == 2 && c < 0x80) || (len == 3 && c < 0x800) || (len == 4 && c < 0x10000);
    if (overlong || c > 0x10FFFF || (c >= 0xD800 && c <= 0xDFFF)) {
        ++i;
        return kReplacement;
    }
    i += len;
    return c;
}

std::vector<char32_t> decode(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        out.push_back(decode_next(s, i));
    }
    return out;
}

void append(std::string& out, char32_t c) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

std::string encode(const std::vector<char32_t>& scalars) {
    std::string out;
    out.reserve(scalars.size());
    for (char32_t c : scalars) {
        append(out, c);
    }
    return out;
}

std::size_t scalar_count(std::string_view s) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        decode_next(s, i);
        ++n;
    }
    return n;
}

char32_t simple_fold(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 0x20;
    // Latin-1 Supplement uppercase, skipping the multiplication sign.
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
    // Latin Extended-A: case pairs alternate; even code points are uppercase
    // up to U+0137, then the pairing shifts.
    if (c >= 0x0100 && c <= 0x0137) return (c % 2 == 0) ? c + 1 : c;
    if (c >= 0x0139 && c <= 0x0148) return (c % 2 == 1) ? c + 1 : c;
    if (c >= 0x014A && c <= 0x0177) return (c % 2 == 0) ? c + 1 : c;
    if (c == 0x0178) return 0x00FF; // Y with diaeresis
    if (c >= 0x0179 && c <= 0x017E) return (c % 2 == 1) ? c + 1 : c;
    if (c == 0x017F) return U's'; // long s
    // Greek
    if (c >= 0x0391 && c <= 0x03A1) return c + 0x20;
    if (c >= 0x03A3 && c <= 0x03AB) return c + 0x20;
    if (c == 0x03C2) return 0x03C3; // final sigma folds to sigma
    // Cyrillic
    if (c >= 0x0410 && c <= 0x042F) return c + 0x20;
    if (c >= 0x0400 && c <= 0x040F) return c + 0x50;
    return c;
}

std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        append(out, simple_fold(decode_next(s, i)));
    }
    return out;
}

std::string compose_canonical(std::string_view s) {
    const std::vector<char32_t> in = decode(s);
    std::vector<char32_t> out;
    out.reserve(in.size());
    const auto& table = compose_table();
    for (char32_t c : in) {
        if (!out.empty() && c >= 0x0300 && c <= 0x0328) {
            const auto it = table.find({out.back(), c});
            if (it != table.end()) {
                out.back() = it->second;
                continue;
            }
        }
        out.push_back(c);
    }
    return encode(out);
}

} // namespace divprof::utf8
