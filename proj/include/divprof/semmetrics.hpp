#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divprof/textseg.hpp"

namespace divprof::semmetrics {

// Valence lexicon plus the rule words of the compound-score method.
// The lexicon file is UTF-8, tab-separated `token<TAB>valence` lines with
// '#' comments; boosters and negators ship as embedded defaults.
struct SentimentLexicon {
    std::map<std::string, double> entries;
    std::map<std::string, double> boosters;
    std::set<std::string> negators;

    static SentimentLexicon load(const std::string& path);
    // Wraps explicit entries with the default booster/negator sets.
    static SentimentLexicon with_default_rules(std::map<std::string, double> entries);
};

// Flesch-Kincaid Grade Level: 0.39*(words/sentences) + 11.8*(syllables/words)
// - 15.59, all counts from textseg. Requires at least one word.
double fk_grade(std::string_view text);
double fk_grade(std::string_view text, const textseg::AbbreviationSet& abbreviations);

// Rule-based compound sentiment in (-1, 1):
//   - token valence from the lexicon (booster words carry no own valence)
//   - ALL-CAPS valence words gain 0.733 toward their sign unless the whole
//     text is caps
//   - boosters within 3 preceding tokens add +/-0.293, damped by distance
//     (x1, x0.95, x0.9), sign-aligned with the valence
//   - a negator within 3 preceding tokens multiplies the valence by -0.74
//   - each '!' (up to 3) adds 0.292 to the total magnitude
//   - compound = s / sqrt(s^2 + 15)
double sentiment_compound(std::string_view text, const SentimentLexicon& lexicon);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;
    // One vector of `dimension()` floats per input text.
    virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) const = 0;

    std::vector<double> embed_one(std::string_view text) const;
};

// Deterministic offline embedder: token types hashed into a fixed-dimension
// term-frequency vector, L2-normalized. The hash is 64-bit FNV-1a over the
// lowercase_key bytes (offset 0xcbf29ce484222325, prime 0x100000001b3),
// reduced modulo the dimension; stable across platforms and releases.
class HashedTfEmbedder final : public EmbeddingProvider {
public:
    explicit HashedTfEmbedder(std::size_t dimension = 512);

    std::string name() const override;
    std::size_t dimension() const override;
    std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;

    static std::uint64_t hash64(std::string_view key);

private:
    std::size_t dimension_;
};

// Remote provider speaking JSON POST {"input": [texts]} -> {"vectors": [[..]]}.
class HttpEmbedder final : public EmbeddingProvider {
public:
    HttpEmbedder(std::string endpoint, std::size_t dimension, double timeout_seconds = 30.0);

    std::string name() const override;
    std::size_t dimension() const override;
    std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;

private:
    std::string endpoint_;
    std::size_t dimension_;
    double timeout_seconds_;
};

double cosine(std::span<const double> a, std::span<const double> b);

// Cosine of the two embeddings; 0.0 when either vector is zero.
double semantic_similarity(std::string_view prompt, std::string_view response,
                           const EmbeddingProvider& provider);

} // namespace divprof::semmetrics
