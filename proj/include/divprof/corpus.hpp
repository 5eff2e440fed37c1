#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace divprof::corpus {

// One (model, prompt, response) sample; the unit of analysis.
struct ResponseRecord {
    std::string model;
    std::string prompt_id;
    std::string prompt;
    std::string response;
    nlohmann::json meta = nlohmann::json::object();
};

// Immutable after load; iteration order equals file order of ingestion.
struct Corpus {
    std::vector<ResponseRecord> records;
    std::string source;
};

enum class LoadMode {
    strict,  // malformed line aborts with its line number
    lenient, // malformed lines are skipped and counted
};

struct LoadResult {
    Corpus corpus;
    std::size_t skipped = 0; // lenient mode only
};

// Reads one JSON object per non-empty line. Required string fields: model,
// prompt_id, prompt, response (model and prompt_id non-empty after trimming).
// Unknown top-level fields are preserved into meta.
LoadResult load_jsonl(const std::string& path, LoadMode mode = LoadMode::strict);

void save_jsonl(const Corpus& corpus, const std::string& path);

nlohmann::json record_to_json(const ResponseRecord& record);

struct FilterPolicy {
    std::size_t min_tokens = 10;
    std::optional<std::size_t> max_tokens;
    bool drop_exact_duplicates = true;
    std::optional<std::size_t> per_model_cap;
};

// Counts always sum to the input record count.
struct FilterReport {
    std::size_t kept = 0;
    std::size_t dropped_short = 0;
    std::size_t dropped_long = 0;
    std::size_t dropped_duplicate = 0;
    std::size_t dropped_capped = 0;

    std::size_t input_count() const {
        return kept + dropped_short + dropped_long + dropped_duplicate + dropped_capped;
    }
};

// Token counts use the textseg tokenizer. Duplicate detection is exact
// equality of the response within the same model, compared after canonical
// composition and trailing-whitespace strip. Idempotent under a fixed policy.
std::pair<Corpus, FilterReport> filter_corpus(const Corpus& corpus, const FilterPolicy& policy);

// Splits text into chunks of n_words words (last may be shorter); words are
// textseg tokens joined by single spaces.
std::vector<std::string> segment_text(std::string_view text, std::size_t n_words);

} // namespace divprof::corpus
