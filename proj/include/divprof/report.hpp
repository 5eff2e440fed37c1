#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "divprof/corpus.hpp"
#include "divprof/lexmetrics.hpp"
#include "divprof/semmetrics.hpp"
#include "divprof/stats.hpp"

namespace divprof::report {

struct ProfileOptions {
    std::size_t threads = 0; // 0 -> hardware concurrency
    double entropy_log_base = 2.0;
    lexmetrics::HapaxBasis hapax_basis = lexmetrics::HapaxBasis::types;
    textseg::AbbreviationSet abbreviations = textseg::AbbreviationSet::defaults();
};

struct MetricRow {
    std::string prompt_id;
    lexmetrics::MetricVector metrics;
};

// Per-model aggregation over the filtered sample.
struct ModelProfile {
    std::string model;
    std::size_t n = 0;                                   // scored responses
    std::vector<MetricRow> rows;
    std::map<std::string, stats::Descriptive> descriptive; // over defined values only
    std::map<std::string, std::size_t> excluded;           // per-metric undefined counts
    std::size_t skipped_empty = 0;                          // zero-token responses, not scored
    std::size_t vocabulary_size = 0;
    std::optional<double> pooled_yules_k;     // over the model's concatenated tokens
    std::optional<double> pooled_hapax_ratio;
};

// All metrics for one record; fields stay unset where undefined.
lexmetrics::MetricVector score_response(const corpus::ResponseRecord& record,
                                        const semmetrics::EmbeddingProvider& provider,
                                        const semmetrics::SentimentLexicon& lexicon,
                                        const ProfileOptions& options = {});

// Scores every record (all must share one model id) and aggregates.
ModelProfile profile_model(std::span<const corpus::ResponseRecord> responses,
                           const semmetrics::EmbeddingProvider& provider,
                           const semmetrics::SentimentLexicon& lexicon,
                           const ProfileOptions& options = {});

// Groups a corpus by model (order of first appearance) and profiles each.
std::vector<ModelProfile> profile_corpus(const corpus::Corpus& corpus,
                                         const semmetrics::EmbeddingProvider& provider,
                                         const semmetrics::SentimentLexicon& lexicon,
                                         const ProfileOptions& options = {});

struct PairwiseResult {
    std::string model_a;
    std::string model_b;
    stats::StatTestResult test;
};

struct MetricComparison {
    bool degenerate = false; // all values identical; tests omitted
    std::optional<stats::StatTestResult> omnibus;
    std::vector<PairwiseResult> pairwise; // Holm-adjusted within this metric
};

struct ComparisonReport {
    std::vector<std::string> models;
    std::vector<std::string> metrics;
    std::map<std::string, MetricComparison> by_metric;
    // Pearson over pooled per-response vectors, pairwise-complete; unset when
    // undefined. Symmetric with unit diagonal.
    std::vector<std::vector<std::optional<double>>> correlations;
};

// Omnibus Kruskal-Wallis per metric, all pairwise Mann-Whitney tests with
// Holm adjustment per metric family, metric-by-metric Pearson correlations.
ComparisonReport compare_models(std::span<const ModelProfile> profiles);

enum class ReportFormat { json, csv, svg };

ReportFormat report_format_from_string(const std::string& name);

// json: single machine-readable report; csv: per-response metrics table and
// tests table; svg: pooled lexical bar chart, per-metric ridge panels, and a
// scatter matrix with r annotations. Byte-deterministic for identical input.
// Returns the written file paths.
std::vector<std::string> emit_report(const ComparisonReport& report,
                                     std::span<const ModelProfile> profiles, ReportFormat format,
                                     const std::string& out_dir);

// Stage files. The compare stage embeds the profiles next to the report so
// the render stage needs a single input.
inline constexpr int kSchemaVersion = 1;

nlohmann::json profiles_to_json(std::span<const ModelProfile> profiles);
std::vector<ModelProfile> profiles_from_json(const nlohmann::json& doc);
nlohmann::json report_to_json(const ComparisonReport& report,
                              std::span<const ModelProfile> profiles);
std::pair<ComparisonReport, std::vector<ModelProfile>> report_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const nlohmann::json& doc, const std::string& path);

} // namespace divprof::report
