#include "divprof/corpus.hpp"

#include "divprof/error.hpp"
#include "divprof/textseg.hpp"
#include "divprof/utf8.hpp"

#include <fstream>
#include <map>
#include <set>
#include <string>

namespace divprof::corpus {

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string require_string_field(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ParseError(std::string("missing or non-string field '") + key + "'");
    }
    return it->get<std::string>();
}

ResponseRecord record_from_json(const nlohmann::json& obj) {
    if (!obj.is_object()) {
        throw ParseError("line is not a JSON object");
    }
    ResponseRecord rec;
    rec.model = require_string_field(obj, "model");
    rec.prompt_id = require_string_field(obj, "prompt_id");
    rec.prompt = require_string_field(obj, "prompt");
    rec.response = require_string_field(obj, "response");
    if (trim_copy(rec.model).empty()) throw ParseError("empty 'model'");
    if (trim_copy(rec.prompt_id).empty()) throw ParseError("empty 'prompt_id'");

    nlohmann::json meta = nlohmann::json::object();
    if (const auto it = obj.find("meta"); it != obj.end()) {
        if (!it->is_object()) throw ParseError("'meta' must be an object");
        meta = *it;
    }
    // unknown top-level fields ride along in meta
    for (const auto& [key, value] : obj.items()) {
        if (key == "model" || key == "prompt_id" || key == "prompt" || key == "response" || key == "meta") {
            continue;
        }
        meta[key] = value;
    }
    rec.meta = std::move(meta);
    return rec;
}

// Duplicate comparison key: canonical composition + trailing-whitespace strip.
std::string duplicate_key(const std::string& response) {
    std::string composed = utf8::compose_canonical(response);
    std::size_t end = composed.find_last_not_of(" \t\r\n");
    composed.erase(end == std::string::npos ? 0 : end + 1);
    return composed;
}

} // namespace

LoadResult load_jsonl(const std::string& path, LoadMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open corpus file: " + path);
    }
    LoadResult result;
    result.corpus.source = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
            line.erase(0, 3); // UTF-8 BOM
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_copy(line).empty()) continue;
        try {
            // nlohmann rejects invalid UTF-8, which enforces the response
            // encoding invariant at ingest time.
            const nlohmann::json obj = nlohmann::json::parse(line);
            result.corpus.records.push_back(record_from_json(obj));
        } catch (const std::exception& e) {
            if (mode == LoadMode::strict) {
                throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
            ++result.skipped;
        }
    }
    if (in.bad()) {
        throw IoError("read failure on corpus file: " + path);
    }
    return result;
}

nlohmann::json record_to_json(const ResponseRecord& record) {
    nlohmann::json obj;
    obj["model"] = record.model;
    obj["prompt_id"] = record.prompt_id;
    obj["prompt"] = record.prompt;
    obj["response"] = record.response;
    if (!record.meta.empty()) {
        obj["meta"] = record.meta;
    }
    return obj;
}

void save_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write corpus file: " + path);
    }
    for (const ResponseRecord& rec : corpus.records) {
        out << record_to_json(rec).dump() << '\n';
    }
    if (!out) {
        throw IoError("write failure on corpus file: " + path);
    }
}

std::pair<Corpus, FilterReport> filter_corpus(const Corpus& corpus, const FilterPolicy& policy) {
    if (policy.max_tokens && *policy.max_tokens < policy.min_tokens) {
        throw InvalidArgument("filter_corpus: max_tokens < min_tokens");
    }
    Corpus out;
    out.source = corpus.source;
    FilterReport report;
    std::map<std::string, std::set<std::string>> seen_by_model;
    std::map<std::string, std::size_t> kept_by_model;

    for (const ResponseRecord& rec : corpus.records) {
        const std::size_t tokens = textseg::tokenize_words(rec.response).size();
        if (tokens < policy.min_tokens) {
            ++report.dropped_short;
            continue;
        }
        if (policy.max_tokens && tokens > *policy.max_tokens) {
            ++report.dropped_long;
            continue;
        }
        if (policy.drop_exact_duplicates) {
            auto& seen = seen_by_model[rec.model];
            if (!seen.insert(duplicate_key(rec.response)).second) {
                ++report.dropped_duplicate;
                continue;
            }
        }
        if (policy.per_model_cap && kept_by_model[rec.model] >= *policy.per_model_cap) {
            ++report.dropped_capped;
            continue;
        }
        ++kept_by_model[rec.model];
        ++report.kept;
        out.records.push_back(rec);
    }
    return {std::move(out), report};
}

std::vector<std::string> segment_text(std::string_view text, std::size_t n_words) {
    if (n_words == 0) {
        throw InvalidArgument("segment_text: n_words must be >= 1");
    }
    const std::vector<textseg::Token> tokens = textseg::tokenize_words(text);
    std::vector<std::string> segments;
    segments.reserve(tokens.size() / n_words + 1);
    for (std::size_t i = 0; i < tokens.size(); i += n_words) {
        const std::size_t end = std::min(i + n_words, tokens.size());
        std::string segment;
        for (std::size_t k = i; k < end; ++k) {
            if (k > i) segment.push_back(' ');
            segment += tokens[k].surface;
        }
        segments.push_back(std::move(segment));
    }
    return segments;
}

} // namespace divprof::corpus
