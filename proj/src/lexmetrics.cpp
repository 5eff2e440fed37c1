#include "divprof/lexmetrics.hpp"

#include "divprof/error.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace divprof::lexmetrics {

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

FrequencySpectrum frequency_spectrum(std::span<const textseg::Token> tokens) {
    FrequencySpectrum fs;
    fs.total_tokens = tokens.size();
    for (const textseg::Token& t : tokens) {
        ++fs.type_counts[t.lowercase_key];
    }
    for (const auto& [key, count] : fs.type_counts) {
        ++fs.spectrum[count];
    }
    return fs;
}

double unique_word_ratio(std::span<const textseg::Token> tokens) {
    if (tokens.empty()) {
        throw UndefinedMetric("unique_word_ratio: no tokens");
    }
    std::set<std::string_view> types;
    for (const textseg::Token& t : tokens) {
        types.insert(t.lowercase_key);
    }
    return static_cast<double>(types.size()) / static_cast<double>(tokens.size());
}

double avg_word_length(std::span<const textseg::Token> tokens) {
    if (tokens.empty()) {
        throw UndefinedMetric("avg_word_length: no tokens");
    }
    double sum = 0.0;
    for (const textseg::Token& t : tokens) {
        sum += static_cast<double>(t.char_length);
    }
    return sum / static_cast<double>(tokens.size());
}

double token_diversity(std::span<const textseg::Token> tokens, double log_base) {
    if (tokens.empty()) {
        throw UndefinedMetric("token_diversity: no tokens");
    }
    if (!(log_base > 1.0)) {
        throw InvalidArgument("token_diversity: log base must be > 1");
    }
    const FrequencySpectrum fs = frequency_spectrum(tokens);
    const double n = static_cast<double>(fs.total_tokens);
    double h = 0.0;
    for (const auto& [key, count] : fs.type_counts) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    if (h < 0.0) h = 0.0; // guard tiny negative rounding on degenerate input
    return h / std::log2(log_base);
}

double sentence_complexity(std::string_view text) {
    return sentence_complexity(text, textseg::AbbreviationSet::defaults());
}

double sentence_complexity(std::string_view text, const textseg::AbbreviationSet& abbreviations) {
    const std::vector<textseg::Sentence> sentences = textseg::split_sentences(text, abbreviations);
    if (sentences.empty()) {
        throw UndefinedMetric("sentence_complexity: no words");
    }
    double words = 0.0;
    for (const textseg::Sentence& s : sentences) {
        words += static_cast<double>(s.word_count);
    }
    return words / static_cast<double>(sentences.size());
}

double yules_k(const FrequencySpectrum& spectrum) {
    if (spectrum.total_tokens < 2) {
        throw UndefinedMetric("yules_k: requires at least 2 tokens");
    }
    const double n = static_cast<double>(spectrum.total_tokens);
    double sum = 0.0;
    for (const auto& [i, v_i] : spectrum.spectrum) {
        const double di = static_cast<double>(i);
        sum += di * di * static_cast<double>(v_i);
    }
    return 1e4 * (sum - n) / (n * n);
}

double hapax_ratio(const FrequencySpectrum& spectrum, HapaxBasis basis) {
    if (spectrum.type_count() == 0) {
        throw UndefinedMetric("hapax_ratio: empty spectrum");
    }
    const auto it = spectrum.spectrum.find(1);
    const double hapaxes = it == spectrum.spectrum.end() ? 0.0 : static_cast<double>(it->second);
    const double denom = basis == HapaxBasis::types ? static_cast<double>(spectrum.type_count())
                                                    : static_cast<double>(spectrum.total_tokens);
    return hapaxes / denom;
}

std::size_t vocabulary_size(std::span<const corpus::ResponseRecord> responses) {
    std::set<std::string> types;
    for (const corpus::ResponseRecord& rec : responses) {
        for (const textseg::Token& t : textseg::tokenize_words(rec.response)) {
            types.insert(t.lowercase_key);
        }
    }
    return types.size();
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {
        "unique_word_ratio", "avg_word_length",  "token_diversity",
        "sentence_complexity", "yules_k",        "hapax_ratio",
        "fk_grade",           "sentiment",       "semantic_similarity",
    };
    return names;
}

std::optional<double> metric_value(const MetricVector& vector, std::string_view name) {
    if (name == "unique_word_ratio") return vector.unique_word_ratio;
    if (name == "avg_word_length") return vector.avg_word_length;
    if (name == "token_diversity") return vector.token_diversity;
    if (name == "sentence_complexity") return vector.sentence_complexity;
    if (name == "yules_k") return vector.yules_k;
    if (name == "hapax_ratio") return vector.hapax_ratio;
    if (name == "fk_grade") return vector.fk_grade;
    if (name == "sentiment") return vector.sentiment;
    if (name == "semantic_similarity") return vector.semantic_similarity;
    throw InvalidArgument("unknown metric: " + std::string(name));
}

void set_metric_value(MetricVector& vector, std::string_view name, std::optional<double> value) {
    if (name == "unique_word_ratio") { vector.unique_word_ratio = value; return; }
    if (name == "avg_word_length") { vector.avg_word_length = value; return; }
    if (name == "token_diversity") { vector.token_diversity = value; return; }
    if (name == "sentence_complexity") { vector.sentence_complexity = value; return; }
    if (name == "yules_k") { vector.yules_k = value; return; }
    if (name == "hapax_ratio") { vector.hapax_ratio = value; return; }
    if (name == "fk_grade") { vector.fk_grade = value; return; }
    if (name == "sentiment") { vector.sentiment = value; return; }
    if (name == "semantic_similarity") { vector.semantic_similarity = value; return; }
    throw InvalidArgument("unknown metric: " + std::string(name));
}

std::string metrics_csv_header() {
    std::string header = "model,prompt_id,token_count";
    for (const std::string& name : metric_names()) {
        header.push_back(',');
        header += name;
    }
    return header;
}

std::string metrics_csv_row(const std::string& model, const std::string& prompt_id,
                            const MetricVector& vector) {
    auto quote = [](const std::string& field) {
        if (field.find_first_of(",\"\n") == std::string::npos) return field;
        std::string quoted = "\"";
        for (char c : field) {
            if (c == '"') quoted += "\"\"";
            else quoted.push_back(c);
        }
        quoted.push_back('"');
        return quoted;
    };
    std::string row = quote(model) + "," + quote(prompt_id) + "," + std::to_string(vector.token_count);
    for (const std::string& name : metric_names()) {
        row.push_back(',');
        if (const auto v = metric_value(vector, name)) {
            row += fixed6(*v);
        }
    }
    return row;
}

} // namespace divprof::lexmetrics
