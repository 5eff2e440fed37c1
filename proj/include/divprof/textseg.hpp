#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace divprof::textseg {

// One word occurrence. `lowercase_key` (case-folded surface) is the type
// identity used by every richness metric.
struct Token {
    std::string surface;
    std::size_t char_length = 0; // Unicode scalar values in surface
    std::string lowercase_key;
};

struct Sentence {
    std::string text;
    std::size_t word_count = 0;
};

// Splits text into maximal runs of alphanumeric scalars. ASCII hyphen and
// apostrophes (' and U+2019) are kept word-internal when flanked by word
// characters, so "non-obvious" and "riverrun's" are single tokens. En/em
// dashes and all other punctuation separate. Deterministic and pure.
std::vector<Token> tokenize_words(std::string_view text);

// Abbreviations that suppress a sentence split at a following period.
// Entries are stored case-folded, with the trailing period.
class AbbreviationSet {
public:
    // "Mr.", "Dr.", "e.g.", "i.e.", "etc."
    static AbbreviationSet defaults();
    // One abbreviation per line; blank lines and '#' comments ignored.
    // Entries extend the default set.
    static AbbreviationSet from_file(const std::string& path);

    void add(std::string_view abbreviation);
    bool contains(std::string_view word_with_period) const;

private:
    std::unordered_set<std::string> folded_;
};

// Sentence boundaries sit at '.', '!', '?' or U+2026 followed by whitespace
// and a capital, or at end of text. Abbreviations from the set never split.
// Fragments without words are dropped; unterminated text is one sentence.
std::vector<Sentence> split_sentences(std::string_view text);
std::vector<Sentence> split_sentences(std::string_view text, const AbbreviationSet& abbreviations);

// Heuristic syllable count: vowel runs (a,e,i,o,u,y) with silent-final-e
// subtraction and "-le" restoration, plus a small exception table for common
// hiatus words the run rule undercounts. Words without vowels count one
// syllable per digit when digits are present, otherwise one. Result >= 1.
// Empty input is an invalid-argument error.
std::size_t count_syllables(std::string_view word);

} // namespace divprof::textseg
