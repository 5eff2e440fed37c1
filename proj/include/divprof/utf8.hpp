#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace divprof::utf8 {

// Decodes the scalar value starting at byte `i` and advances `i` past it.
// Invalid sequences decode to U+FFFD and advance by one byte.
char32_t decode_next(std::string_view s, std::size_t& i);

std::vector<char32_t> decode(std::string_view s);

void append(std::string& out, char32_t c);

std::string encode(const std::vector<char32_t>& scalars);

// Number of Unicode scalar values in the string.
std::size_t scalar_count(std::string_view s);

// One-to-one case folding covering ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic. Scalars outside those ranges fold to themselves.
char32_t simple_fold(char32_t c);

std::string fold_case(std::string_view s);

// Canonical composition of base-letter + combining-mark pairs for Latin
// scripts (combining range U+0300..U+0328). Unknown pairs pass through
// unchanged; this is not full-Unicode NFC.
std::string compose_canonical(std::string_view s);

} // namespace divprof::utf8
