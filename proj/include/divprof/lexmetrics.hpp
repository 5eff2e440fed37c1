#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divprof/corpus.hpp"
#include "divprof/textseg.hpp"

namespace divprof::lexmetrics {

// Token frequency-of-frequencies table. Invariants: sum of i*V_i over the
// spectrum equals total_tokens; sum of V_i equals the number of types.
struct FrequencySpectrum {
    std::size_t total_tokens = 0;                    // N
    std::map<std::string, std::size_t> type_counts;  // lowercase_key -> occurrences
    std::map<std::size_t, std::size_t> spectrum;     // i -> V_i

    std::size_t type_count() const { return type_counts.size(); }
};

FrequencySpectrum frequency_spectrum(std::span<const textseg::Token> tokens);

// distinct types / N; requires at least one token.
double unique_word_ratio(std::span<const textseg::Token> tokens);

// mean char_length; requires at least one token.
double avg_word_length(std::span<const textseg::Token> tokens);

// Shannon entropy of the within-response type distribution. Default base 2
// (bits); the base only rescales, so it is exposed for configuration.
double token_diversity(std::span<const textseg::Token> tokens, double log_base = 2.0);

// Mean words per sentence; requires at least one word.
double sentence_complexity(std::string_view text);
double sentence_complexity(std::string_view text, const textseg::AbbreviationSet& abbreviations);

// K = 10^4 * (sum_i i^2*V_i - N) / N^2; requires N >= 2. Zero exactly when
// every type occurs once.
double yules_k(const FrequencySpectrum& spectrum);

enum class HapaxBasis {
    types,  // hapaxes / distinct types (default)
    tokens, // hapaxes / N
};

// V_1 over the chosen basis; requires at least one type.
double hapax_ratio(const FrequencySpectrum& spectrum, HapaxBasis basis = HapaxBasis::types);

// Distinct lowercase_key count across all tokens of all responses.
std::size_t vocabulary_size(std::span<const corpus::ResponseRecord> responses);

// All per-response metric values for one record. Fields are unset when the
// metric is undefined on that response (never imputed).
struct MetricVector {
    std::optional<double> unique_word_ratio;
    std::optional<double> avg_word_length;
    std::optional<double> token_diversity;
    std::optional<double> sentence_complexity;
    std::optional<double> yules_k;
    std::optional<double> hapax_ratio;
    std::optional<double> fk_grade;
    std::optional<double> sentiment;
    std::optional<double> semantic_similarity;
    std::size_t token_count = 0;
};

// Fixed metric order used by every report surface.
const std::vector<std::string>& metric_names();

std::optional<double> metric_value(const MetricVector& vector, std::string_view name);
void set_metric_value(MetricVector& vector, std::string_view name, std::optional<double> value);

// Per-response row schema: model, prompt_id, token_count, then one column per
// metric. CSV cells carry six decimal places; unset metrics are empty cells.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& model, const std::string& prompt_id,
                            const MetricVector& vector);

} // namespace divprof::lexmetrics
