#include "divprof/textseg.hpp"

#include "divprof/error.hpp"
#include "divprof/utf8.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

namespace divprof::textseg {

namespace {

bool is_space_scalar(char32_t c) {
    switch (c) {
        case U'\t': case U'\n': case U'\v': case U'\f': case U'\r': case U' ':
        case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200B;
    }
}

// Word scalars are ASCII alphanumerics plus any scalar that is not in one of
// the known whitespace/punctuation/symbol ranges. Letters of non-Latin
// scripts therefore count as word characters without needing full Unicode
// category tables.
bool is_word_scalar(char32_t c) {
    if (c < 0x80) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0;
    }
    if (is_space_scalar(c)) return false;
    if (c >= 0x00A1 && c <= 0x00BF) return c == 0x00AA || c == 0x00B5 || c == 0x00BA;
    if (c == 0x00D7 || c == 0x00F7) return false;
    if (c >= 0x2000 && c <= 0x206F) return false;  // general punctuation, en/em dashes
    if (c >= 0x2070 && c <= 0x209F) return false;  // super/subscripts
    if (c >= 0x20A0 && c <= 0x20CF) return false;  // currency
    if (c >= 0x2100 && c <= 0x2BFF) return false;  // arrows, math, misc symbols
    if (c >= 0x2E00 && c <= 0x2E7F) return false;  // supplemental punctuation
    if (c >= 0x3001 && c <= 0x303F) return false;  // CJK punctuation
    if (c >= 0xFE10 && c <= 0xFE6F) return false;  // small form variants
    if (c == 0xFE0F) return false;
    if (c >= 0xFF01 && c <= 0xFF0F) return false;  // fullwidth punctuation
    if (c >= 0xFF1A && c <= 0xFF20) return false;
    if (c >= 0xFF3B && c <= 0xFF40) return false;
    if (c >= 0xFF5B && c <= 0xFF65) return false;
    if (c >= 0x1F000 && c <= 0x1FAFF) return false; // emoji blocks
    if (c == 0xFFFD) return false;
    return true;
}

bool is_apostrophe(char32_t c) { return c == U'\'' || c == 0x2019; }

bool is_upper_scalar(char32_t c) { return utf8::simple_fold(c) != c; }

bool is_terminator(char32_t c) {
    return c == U'.' || c == U'!' || c == U'?' || c == 0x2026;
}

Token make_token(const std::vector<char32_t>& scalars, std::size_t begin, std::size_t end) {
    Token t;
    t.char_length = end - begin;
    std::string key;
    for (std::size_t k = begin; k < end; ++k) {
        utf8::append(t.surface, scalars[k]);
        // normalize the curly apostrophe so "don't" has one type either way
        const char32_t c = scalars[k] == 0x2019 ? U'\'' : scalars[k];
        utf8::append(key, utf8::simple_fold(c));
    }
    t.lowercase_key = std::move(key);
    return t;
}

std::string trimmed_utf8(const std::vector<char32_t>& scalars, std::size_t begin, std::size_t end) {
    while (begin < end && is_space_scalar(scalars[begin])) ++begin;
    while (end > begin && is_space_scalar(scalars[end - 1])) --end;
    std::string out;
    for (std::size_t k = begin; k < end; ++k) {
        utf8::append(out, scalars[k]);
    }
    return out;
}

// Common vowel-hiatus words where adjacent vowel letters are separate
// syllables; the run heuristic undercounts these by one or more.
const std::map<std::string, std::size_t>& syllable_exceptions() {
    static const std::map<std::string, std::size_t> table = {
        {"create", 2},   {"creates", 2},  {"created", 3},   {"creating", 3},
        {"creation", 3}, {"creations", 3},{"creative", 3},  {"creator", 3},
        {"react", 2},    {"reacts", 2},   {"reacted", 3},   {"reaction", 3},
        {"idea", 3},     {"ideas", 3},    {"ideal", 3},     {"area", 3},
        {"areas", 3},    {"science", 2},  {"sciences", 3},  {"quiet", 2},
        {"poem", 2},     {"poems", 2},    {"poet", 2},      {"poets", 2},
        {"poetry", 3},   {"diet", 2},     {"diets", 2},     {"dial", 2},
        {"trial", 2},    {"trials", 2},   {"piano", 3},     {"radio", 3},
        {"audio", 3},    {"video", 3},    {"videos", 3},    {"stereo", 3},
        {"rodeo", 3},    {"chaos", 2},    {"being", 2},     {"beings", 2},
        {"doing", 2},    {"going", 2},    {"seeing", 2},    {"fuel", 2},
        {"fuels", 2},    {"cruel", 2},    {"dual", 2},      {"duel", 2},
        {"actual", 3},   {"actually", 4}, {"usual", 3},     {"usually", 4},
        {"annual", 3},   {"visual", 3},   {"manual", 3},    {"casual", 3},
        {"mutual", 3},   {"museum", 3},   {"theater", 3},   {"theatre", 3},
        {"lion", 2},     {"lions", 2},    {"riot", 2},      {"prior", 2},
        {"diary", 3},    {"client", 2},   {"clients", 2},   {"giant", 2},
        {"giants", 2},   {"reality", 4},
    };
    return table;
}

bool is_vowel_scalar(char32_t c) {
    switch (c) {
        case U'a': case U'e': case U'i': case U'o': case U'u': case U'y':
            return true;
        default:
            break;
    }
    // folded Latin-1 vowels with diacritics
    if (c >= 0x00E0 && c <= 0x00E6) return true; // a variants, ae
    if (c >= 0x00E8 && c <= 0x00EF) return true; // e and i variants
    if (c >= 0x00F2 && c <= 0x00F6) return true; // o variants
    if (c == 0x00F8) return true;                // o with stroke
    if (c >= 0x00F9 && c <= 0x00FD) return true; // u variants, y acute
    if (c == 0x00FF) return true;                // y diaeresis
    return false;
}

bool is_letter_scalar(char32_t c) {
    if (c < 0x80) return std::isalpha(static_cast<unsigned char>(c)) != 0;
    return is_word_scalar(c) && !(c >= U'0' && c <= U'9');
}

} // namespace

std::vector<Token> tokenize_words(std::string_view text) {
    const std::vector<char32_t> scalars = utf8::decode(text);
    std::vector<Token> tokens;
    const std::size_t n = scalars.size();
    std::size_t i = 0;
    while (i < n) {
        if (!is_word_scalar(scalars[i])) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n) {
            if (is_word_scalar(scalars[j])) {
                ++j;
                continue;
            }
            const bool joiner = is_apostrophe(scalars[j]) || scalars[j] == U'-';
            if (joiner && j + 1 < n && is_word_scalar(scalars[j + 1])) {
                j += 2;
                continue;
            }
            break;
        }
        tokens.push_back(make_token(scalars, i, j));
        i = j;
    }
    return tokens;
}

AbbreviationSet AbbreviationSet::defaults() {
    AbbreviationSet set;
    set.add("Mr.");
    set.add("Dr.");
    set.add("e.g.");
    set.add("i.e.");
    set.add("etc.");
    return set;
}

AbbreviationSet AbbreviationSet::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read abbreviation file: " + path);
    }
    AbbreviationSet set = defaults();
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        set.add(line.substr(start));
    }
    return set;
}

void AbbreviationSet::add(std::string_view abbreviation) {
    if (abbreviation.empty()) return;
    std::string folded = utf8::fold_case(abbreviation);
    if (folded.back() != '.') folded.push_back('.');
    folded_.insert(std::move(folded));
}

bool AbbreviationSet::contains(std::string_view word_with_period) const {
    return folded_.count(utf8::fold_case(word_with_period)) > 0;
}

std::vector<Sentence> split_sentences(std::string_view text) {
    static const AbbreviationSet defaults = AbbreviationSet::defaults();
    return split_sentences(text, defaults);
}

std::vector<Sentence> split_sentences(std::string_view text, const AbbreviationSet& abbreviations) {
    const std::vector<char32_t> scalars = utf8::decode(text);
    const std::size_t n = scalars.size();
    std::vector<Sentence> sentences;

    auto emit = [&](std::size_t begin, std::size_t end) {
        Sentence s;
        s.text = trimmed_utf8(scalars, begin, end);
        if (s.text.empty()) return;
        s.word_count = tokenize_words(s.text).size();
        if (s.word_count >= 1) {
            sentences.push_back(std::move(s));
        }
    };

    std::size_t start = 0;
    std::size_t i = 0;
    while (i < n) {
        if (!is_terminator(scalars[i])) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end + 1 < n && is_terminator(scalars[run_end + 1])) ++run_end;

        bool boundary;
        std::size_t after = run_end + 1;
        if (after >= n) {
            boundary = true;
        } else {
            std::size_t ws = after;
            while (ws < n && is_space_scalar(scalars[ws])) ++ws;
            if (ws == after) {
                boundary = false; // terminator glued to following text ("3.14")
            } else {
                boundary = ws >= n || is_upper_scalar(scalars[ws]);
            }
        }

        if (boundary && run_end == i && scalars[i] == U'.') {
            // abbreviation check: the whitespace-delimited word ending here
            std::size_t word_start = i;
            while (word_start > start && !is_space_scalar(scalars[word_start - 1])) --word_start;
            std::string candidate;
            for (std::size_t k = word_start; k <= i; ++k) {
                utf8::append(candidate, scalars[k]);
            }
            if (abbreviations.contains(candidate)) {
                boundary = false;
            }
        }

        if (boundary) {
            emit(start, run_end + 1);
            start = run_end + 1;
        }
        i = run_end + 1;
    }
    if (start < n) {
        emit(start, n);
    }
    return sentences;
}

std::size_t count_syllables(std::string_view word) {
    if (word.empty()) {
        throw InvalidArgument("count_syllables: empty word");
    }
    const std::string folded = utf8::fold_case(word);
    const auto& exceptions = syllable_exceptions();
    if (const auto it = exceptions.find(folded); it != exceptions.end()) {
        return it->second;
    }

    const std::vector<char32_t> scalars = utf8::decode(folded);
    std::size_t runs = 0;
    bool in_run = false;
    bool any_vowel = false;
    std::size_t digits = 0;
    for (char32_t c : scalars) {
        if (c >= U'0' && c <= U'9') ++digits;
        if (is_vowel_scalar(c)) {
            any_vowel = true;
            if (!in_run) {
                ++runs;
                in_run = true;
            }
        } else {
            in_run = false;
        }
    }
    if (!any_vowel) {
        return digits > 0 ? digits : 1;
    }

    // silent final 'e' with "-le" restoration ("table" keeps its last beat)
    const std::size_t len = scalars.size();
    if (runs >= 2 && len >= 2 && scalars[len - 1] == U'e' && is_letter_scalar(scalars[len - 2]) &&
        !is_vowel_scalar(scalars[len - 2])) {
        const bool le_ending =
            scalars[len - 2] == U'l' && len >= 3 && is_letter_scalar(scalars[len - 3]) && !is_vowel_scalar(scalars[len - 3]);
        if (!le_ending) {
            --runs;
        }
    }
    return std::max<std::size_t>(runs, 1);
}

} // namespace divprof::textseg
