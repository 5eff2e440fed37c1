#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "divprof/corpus.hpp"

namespace divprof::genharness {

// Response body layout of the generation endpoint.
enum class ResponseShape {
    plain,  // {"text": "..."}
    openai, // {"choices": [{"text": ...}]} or {"choices": [{"message": {"content": ...}}]}
    ollama, // {"response": "..."}
};

ResponseShape response_shape_from_string(const std::string& name);
std::string to_string(ResponseShape shape);

struct GenParams {
    std::optional<double> temperature;
    std::optional<int> max_tokens;
    std::optional<std::int64_t> seed;
};

struct GenerationTask {
    std::string endpoint;
    std::string model;
    std::vector<std::pair<std::string, std::string>> prompts; // (prompt_id, text)
    std::size_t samples_per_prompt = 1;
    GenParams params;
    std::size_t parallelism = 1;
    double timeout_seconds = 30.0;
    std::size_t retries = 2;
    std::size_t backoff_ms = 250;
    ResponseShape shape = ResponseShape::plain;
};

struct GenerationFailure {
    std::string prompt_id;
    std::size_t sample_index = 0;
    std::string error;
};

struct GenerationReport {
    std::vector<corpus::ResponseRecord> records; // completion order
    std::vector<GenerationFailure> failures;
    std::size_t retries_used = 0;
};

// Collects samples_per_prompt responses per prompt and appends them to
// out_jsonl (flushed per record; the file stays loadable by load_jsonl).
// Request params are echoed into each record's meta. Failed prompts are
// retried with exponential backoff, then recorded as failures; the run
// continues.
GenerationReport generate_samples(const GenerationTask& task, const std::string& out_jsonl);

struct BenchItem {
    std::string item_id;
    std::string question;
    std::vector<std::pair<char, std::string>> choices; // labels 'A'..'E', in order
    char answer_label = 'A';
};

// JSONL: {"item_id", "question", "choices": [{"label","text"}], "answer_label"}
std::vector<BenchItem> load_bench_items(const std::string& path);

// First matching rule wins:
//   1. leading or isolated label ("A", "A.", "A)", "(A)", "Answer: A"),
//      case-insensitive
//   2. case-insensitive containment of exactly one choice text
//   3. none (unparseable)
// Never returns a label absent from choices.
std::optional<char> extract_choice(std::string_view response,
                                   std::span<const std::pair<char, std::string>> choices);

struct BenchItemResult {
    std::string item_id;
    std::optional<char> extracted;
    bool correct = false;
};

struct BenchResult {
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t unparseable = 0;
    std::vector<BenchItemResult> per_item;
    std::string prompt_template; // echoed for provenance
    std::string model;

    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

struct BenchOptions {
    GenParams params;
    double timeout_seconds = 30.0;
    std::size_t retries = 2;
    std::size_t backoff_ms = 250;
    ResponseShape shape = ResponseShape::plain;
    std::string prompt_template; // empty -> default_bench_template()
};

// "{question}" and "{choices}" placeholders; choices render as "A. text" lines.
std::string default_bench_template();

std::string render_bench_prompt(const std::string& prompt_template, const BenchItem& item);

// Prompts every item through the endpoint and scores with extract_choice.
// Unparseable responses (including transport failures after retries) count
// as incorrect.
BenchResult run_benchmark(const std::string& endpoint, const std::string& model,
                          std::span<const BenchItem> items, const BenchOptions& options = {});

nlohmann::json bench_result_to_json(const BenchResult& result);

} // namespace divprof::genharness
