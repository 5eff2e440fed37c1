#include "divprof/genharness.hpp"

#include "divprof/error.hpp"
#include "divprof/utf8.hpp"
#include "http_url.hpp"

#include <httplib.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

namespace divprof::genharness {

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

nlohmann::json build_request(const std::string& model, const std::string& prompt,
                             const GenParams& params) {
    nlohmann::json body;
    body["model"] = model;
    body["prompt"] = prompt;
    if (params.temperature) body["temperature"] = *params.temperature;
    if (params.max_tokens) body["max_tokens"] = *params.max_tokens;
    if (params.seed) body["seed"] = *params.seed;
    return body;
}

std::string parse_generation_body(ResponseShape shape, const std::string& body,
                                  const std::string& endpoint) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(body);
    } catch (const std::exception& e) {
        throw ProviderError("endpoint " + endpoint + " returned bad JSON: " + e.what());
    }
    switch (shape) {
        case ResponseShape::plain:
            if (obj.contains("text") && obj["text"].is_string()) {
                return obj["text"].get<std::string>();
            }
            break;
        case ResponseShape::openai:
            if (obj.contains("choices") && obj["choices"].is_array() && !obj["choices"].empty()) {
                const auto& choice = obj["choices"][0];
                if (choice.contains("message") && choice["message"].contains("content") &&
                    choice["message"]["content"].is_string()) {
                    return choice["message"]["content"].get<std::string>();
                }
                if (choice.contains("text") && choice["text"].is_string()) {
                    return choice["text"].get<std::string>();
                }
            }
            break;
        case ResponseShape::ollama:
            if (obj.contains("response") && obj["response"].is_string()) {
                return obj["response"].get<std::string>();
            }
            break;
    }
    throw ProviderError("endpoint " + endpoint + " response missing the " + to_string(shape) +
                        " text field");
}

// One POST with retries and exponential backoff. Returns the extracted text;
// accumulates the number of retries performed into `retries_used`.
std::string request_completion(const std::string& endpoint, const std::string& model,
                               const std::string& prompt, const GenParams& params,
                               ResponseShape shape, double timeout_seconds, std::size_t retries,
                               std::size_t backoff_ms, std::atomic<std::size_t>& retries_used) {
    const detail::HttpUrl url = detail::parse_http_url(endpoint);
    const auto timeout_ms = static_cast<time_t>(timeout_seconds * 1000);
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= retries; ++attempt) {
        if (attempt > 0) {
            ++retries_used;
            const std::size_t doublings = std::min<std::size_t>(attempt - 1, 10);
            const auto delay = backoff_ms * (std::size_t{1} << doublings);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        httplib::Client client(url.scheme_host_port);
        client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        const auto res =
            client.Post(url.path, build_request(model, prompt, params).dump(), "application/json");
        if (!res) {
            last_error = "endpoint unreachable: " + endpoint;
            continue;
        }
        if (res->status != 200) {
            last_error = "endpoint " + endpoint + " returned status " + std::to_string(res->status);
            continue;
        }
        return parse_generation_body(shape, res->body, endpoint);
    }
    throw ProviderError(last_error.empty() ? "endpoint failed: " + endpoint : last_error);
}

bool is_label_char(char c, std::span<const std::pair<char, std::string>> choices) {
    const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& [label, text] : choices) {
        if (label == upper) return true;
    }
    return false;
}

bool is_boundary(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) == 0;
}

// Leading label: optional '(' then the label then optional '.', ')' or ':',
// followed by a non-alphanumeric boundary or end.
std::optional<char> match_leading_label(std::string_view trimmed,
                                        std::span<const std::pair<char, std::string>> choices) {
    std::size_t i = 0;
    bool open_paren = false;
    if (i < trimmed.size() && trimmed[i] == '(') {
        open_paren = true;
        ++i;
    }
    if (i >= trimmed.size() || !is_label_char(trimmed[i], choices)) return std::nullopt;
    const char label = static_cast<char>(std::toupper(static_cast<unsigned char>(trimmed[i])));
    ++i;
    if (open_paren) {
        if (i >= trimmed.size() || trimmed[i] != ')') return std::nullopt;
        ++i;
    } else if (i < trimmed.size() && (trimmed[i] == '.' || trimmed[i] == ')' || trimmed[i] == ':')) {
        ++i;
    }
    if (i < trimmed.size() && !is_boundary(trimmed[i])) return std::nullopt;
    return label;
}

// A line that is nothing but a label, e.g. "B", "B.", "(B)".
std::optional<char> match_isolated_line(std::string_view response,
                                        std::span<const std::pair<char, std::string>> choices) {
    std::size_t start = 0;
    while (start <= response.size()) {
        std::size_t end = response.find('\n', start);
        if (end == std::string_view::npos) end = response.size();
        std::string_view line = response.substr(start, end - start);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) {
            line.remove_prefix(1);
        }
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
            line.remove_suffix(1);
        }
        // at most label + two punctuation characters ("(B)")
        if (!line.empty() && line.size() <= 3) {
            if (const auto label = match_leading_label(line, choices)) return label;
        }
        if (end == response.size()) break;
        start = end + 1;
    }
    return std::nullopt;
}

// "Answer: B", "answer is (b)", ... anywhere in the response.
std::optional<char> match_answer_keyword(std::string_view response,
                                         std::span<const std::pair<char, std::string>> choices) {
    const std::string lower = lower_ascii(response);
    std::size_t pos = 0;
    while ((pos = lower.find("answer", pos)) != std::string::npos) {
        std::size_t i = pos + 6;
        if (i + 2 < lower.size() && lower.compare(i, 3, " is") == 0) i += 3;
        while (i < lower.size() && (lower[i] == ' ' || lower[i] == ':' || lower[i] == '\t')) ++i;
        if (i < lower.size() && lower[i] == '(') ++i;
        if (i < lower.size() && is_label_char(lower[i], choices)) {
            const bool bounded = i + 1 >= lower.size() || is_boundary(lower[i + 1]);
            if (bounded) {
                return static_cast<char>(std::toupper(static_cast<unsigned char>(lower[i])));
            }
        }
        pos += 6;
    }
    return std::nullopt;
}

} // namespace

ResponseShape response_shape_from_string(const std::string& name) {
    const std::string lower = lower_ascii(name);
    if (lower == "plain") return ResponseShape::plain;
    if (lower == "openai") return ResponseShape::openai;
    if (lower == "ollama") return ResponseShape::ollama;
    throw InvalidArgument("unknown response shape: " + name);
}

std::string to_string(ResponseShape shape) {
    switch (shape) {
        case ResponseShape::plain: return "plain";
        case ResponseShape::openai: return "openai";
        case ResponseShape::ollama: return "ollama";
    }
    return "plain";
}

GenerationReport generate_samples(const GenerationTask& task, const std::string& out_jsonl) {
    if (task.samples_per_prompt < 1) {
        throw InvalidArgument("generate_samples: samples_per_prompt must be >= 1");
    }
    if (task.parallelism < 1) {
        throw InvalidArgument("generate_samples: parallelism must be >= 1");
    }
    if (!(task.timeout_seconds > 0.0)) {
        throw InvalidArgument("generate_samples: timeout must be positive");
    }

    std::ofstream out(out_jsonl, std::ios::binary | std::ios::app);
    if (!out) {
        throw IoError("cannot open output file: " + out_jsonl);
    }

    struct Job {
        std::string prompt_id;
        std::string prompt;
        std::size_t sample_index;
    };
    std::vector<Job> jobs;
    for (const auto& [prompt_id, prompt] : task.prompts) {
        for (std::size_t s = 0; s < task.samples_per_prompt; ++s) {
            jobs.push_back({prompt_id, prompt, s});
        }
    }

    GenerationReport report;
    std::atomic<std::size_t> retries_used{0};
    std::atomic<std::size_t> next_job{0};
    std::mutex sink_mutex; // single writer owns the output file

    auto worker = [&] {
        while (true) {
            const std::size_t idx = next_job.fetch_add(1);
            if (idx >= jobs.size()) break;
            const Job& job = jobs[idx];
            try {
                const std::string text = request_completion(
                    task.endpoint, task.model, job.prompt, task.params, task.shape,
                    task.timeout_seconds, task.retries, task.backoff_ms, retries_used);
                corpus::ResponseRecord rec;
                rec.model = task.model;
                rec.prompt_id = job.prompt_id;
                rec.prompt = job.prompt;
                rec.response = text;
                rec.meta["sample_index"] = job.sample_index;
                if (task.params.temperature) rec.meta["temperature"] = *task.params.temperature;
                if (task.params.max_tokens) rec.meta["max_tokens"] = *task.params.max_tokens;
                if (task.params.seed) rec.meta["seed"] = *task.params.seed;
                std::lock_guard<std::mutex> lock(sink_mutex);
                out << corpus::record_to_json(rec).dump() << '\n';
                out.flush(); // a crashed run loses at most one record
                report.records.push_back(std::move(rec));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(sink_mutex);
                report.failures.push_back({job.prompt_id, job.sample_index, e.what()});
            }
        }
    };

    const std::size_t n_workers = std::min(task.parallelism, std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) {
        threads.emplace_back(worker);
    }
    for (std::thread& t : threads) {
        t.join();
    }
    report.retries_used = retries_used.load();
    return report;
}

std::vector<BenchItem> load_bench_items(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open bench items file: " + path);
    }
    std::vector<BenchItem> items;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        BenchItem item;
        try {
            item.item_id = obj.at("item_id").get<std::string>();
            item.question = obj.at("question").get<std::string>();
            for (const auto& c : obj.at("choices")) {
                const std::string label = c.at("label").get<std::string>();
                if (label.size() != 1 || label[0] < 'A' || label[0] > 'E') {
                    throw ParseError("choice label must be A..E");
                }
                item.choices.emplace_back(label[0], c.at("text").get<std::string>());
            }
            const std::string answer = obj.at("answer_label").get<std::string>();
            if (answer.size() != 1) throw ParseError("answer_label must be a single letter");
            item.answer_label = answer[0];
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (item.choices.size() < 2 || item.choices.size() > 5) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": needs 2-5 choices");
        }
        bool answer_present = false;
        for (const auto& [label, text] : item.choices) {
            if (label == item.answer_label) answer_present = true;
        }
        if (!answer_present) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": answer_label not among choices");
        }
        items.push_back(std::move(item));
    }
    return items;
}

std::optional<char> extract_choice(std::string_view response,
                                   std::span<const std::pair<char, std::string>> choices) {
    // rule 1: label patterns
    std::string_view trimmed = response;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
        trimmed.remove_prefix(1);
    }
    if (const auto label = match_leading_label(trimmed, choices)) return label;
    if (const auto label = match_isolated_line(response, choices)) return label;
    if (const auto label = match_answer_keyword(response, choices)) return label;

    // rule 2: unique containment of a choice text
    const std::string haystack = lower_ascii(response);
    std::optional<char> found;
    std::size_t matches = 0;
    for (const auto& [label, text] : choices) {
        if (text.empty()) continue;
        if (haystack.find(lower_ascii(text)) != std::string::npos) {
            ++matches;
            found = label;
        }
    }
    if (matches == 1) return found;
    return std::nullopt;
}

std::string default_bench_template() {
    return "Question: {question}\n{choices}\nAnswer:";
}

std::string render_bench_prompt(const std::string& prompt_template, const BenchItem& item) {
    std::string choices_block;
    for (const auto& [label, text] : item.choices) {
        if (!choices_block.empty()) choices_block.push_back('\n');
        choices_block.push_back(label);
        choices_block += ". ";
        choices_block += text;
    }
    std::string prompt = prompt_template;
    auto replace_all = [](std::string& s, const std::string& from, const std::string& to) {
        std::size_t pos = 0;
        while ((pos = s.find(from, pos)) != std::string::npos) {
            s.replace(pos, from.size(), to);
            pos += to.size();
        }
    };
    replace_all(prompt, "{question}", item.question);
    replace_all(prompt, "{choices}", choices_block);
    return prompt;
}

BenchResult run_benchmark(const std::string& endpoint, const std::string& model,
                          std::span<const BenchItem> items, const BenchOptions& options) {
    if (items.empty()) {
        throw InvalidArgument("run_benchmark: no items");
    }
    BenchResult result;
    result.model = model;
    result.prompt_template =
        options.prompt_template.empty() ? default_bench_template() : options.prompt_template;
    result.total = items.size();

    std::atomic<std::size_t> retries_used{0};
    for (const BenchItem& item : items) {
        BenchItemResult item_result;
        item_result.item_id = item.item_id;
        std::optional<char> extracted;
        try {
            const std::string prompt = render_bench_prompt(result.prompt_template, item);
            const std::string text =
                request_completion(endpoint, model, prompt, options.params, options.shape,
                                   options.timeout_seconds, options.retries, options.backoff_ms,
                                   retries_used);
            extracted = extract_choice(text, item.choices);
        } catch (const ProviderError&) {
            extracted = std::nullopt; // transport failure scores as unparseable
        }
        item_result.extracted = extracted;
        item_result.correct = extracted.has_value() && *extracted == item.answer_label;
        if (!extracted) ++result.unparseable;
        if (item_result.correct) ++result.correct;
        result.per_item.push_back(std::move(item_result));
    }
    return result;
}

nlohmann::json bench_result_to_json(const BenchResult& result) {
    nlohmann::json obj;
    obj["model"] = result.model;
    obj["total"] = result.total;
    obj["correct"] = result.correct;
    obj["unparseable"] = result.unparseable;
    obj["accuracy"] = result.accuracy();
    obj["prompt_template"] = result.prompt_template;
    nlohmann::json per_item = nlohmann::json::array();
    for (const BenchItemResult& r : result.per_item) {
        nlohmann::json row;
        row["item_id"] = r.item_id;
        row["extracted"] = r.extracted ? nlohmann::json(std::string(1, *r.extracted))
                                       : nlohmann::json(nullptr);
        row["correct"] = r.correct;
        per_item.push_back(std::move(row));
    }
    obj["per_item"] = std::move(per_item);
    return obj;
}

} // namespace divprof::genharness
