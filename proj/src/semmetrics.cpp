#include "divprof/semmetrics.hpp"

#include "divprof/error.hpp"
#include "divprof/utf8.hpp"
#include "http_url.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace divprof::semmetrics {

namespace {

constexpr double kBoosterIncrement = 0.293;
constexpr double kNegationScalar = -0.74;
constexpr double kCapsEmphasis = 0.733;
constexpr double kExclamationBoost = 0.292;
constexpr double kNormalizationAlpha = 15.0;
constexpr double kBoosterDamping[3] = {1.0, 0.95, 0.9};

const std::map<std::string, double>& default_boosters() {
    static const std::map<std::string, double> boosters = [] {
        std::map<std::string, double> m;
        for (const char* w :
             {"absolutely", "amazingly", "awfully", "completely", "considerably", "decidedly",
              "deeply", "enormously", "entirely", "especially", "exceptionally", "extremely",
              "fabulously", "fully", "greatly", "highly", "hugely", "incredibly", "intensely",
              "majorly", "more", "most", "particularly", "purely", "quite", "really",
              "remarkably", "so", "substantially", "thoroughly", "totally", "tremendously",
              "unbelievably", "unusually", "utterly", "very"}) {
            m[w] = kBoosterIncrement;
        }
        for (const char* w :
             {"almost", "barely", "hardly", "kinda", "kindof", "less", "little", "marginally",
              "occasionally", "partly", "scarcely", "slightly", "somewhat", "sorta", "sortof"}) {
            m[w] = -kBoosterIncrement;
        }
        return m;
    }();
    return boosters;
}

const std::set<std::string>& default_negators() {
    static const std::set<std::string> negators = {
        "ain't",    "aint",    "aren't",   "arent",    "can't",    "cannot",  "cant",
        "couldn't", "couldnt", "didn't",   "didnt",    "doesn't",  "doesnt",  "don't",
        "dont",     "hadn't",  "hadnt",    "hasn't",   "hasnt",    "haven't", "havent",
        "isn't",    "isnt",    "mustn't",  "mustnt",   "needn't",  "neednt",  "neither",
        "never",    "no",      "nobody",   "none",     "nope",     "nor",     "not",
        "nothing",  "nowhere", "rarely",   "seldom",   "shouldn't","shouldnt","wasn't",
        "wasnt",    "weren't", "werent",   "without",  "won't",    "wont",    "wouldn't",
        "wouldnt",
    };
    return negators;
}

bool is_all_caps(const textseg::Token& token) {
    std::size_t letters = 0;
    for (char32_t c : utf8::decode(token.surface)) {
        const char32_t folded = utf8::simple_fold(c);
        const bool is_letter = folded != c || (c >= U'a' && c <= U'z');
        if (folded != c) {
            ++letters;          // uppercase letter
        } else if (is_letter) {
            return false;       // lowercase letter present
        }
    }
    return letters >= 2;
}

} // namespace

SentimentLexicon SentimentLexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read lexicon file: " + path);
    }
    std::map<std::string, double> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected token<TAB>valence");
        }
        const std::string token = utf8::fold_case(line.substr(0, tab));
        double valence = 0.0;
        try {
            std::size_t consumed = 0;
            valence = std::stod(line.substr(tab + 1), &consumed);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad valence value");
        }
        if (!std::isfinite(valence)) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": non-finite valence");
        }
        entries[token] = valence;
    }
    if (entries.empty()) {
        throw ParseError("lexicon has no entries: " + path);
    }
    return with_default_rules(std::move(entries));
}

SentimentLexicon SentimentLexicon::with_default_rules(std::map<std::string, double> entries) {
    SentimentLexicon lex;
    lex.entries = std::move(entries);
    lex.boosters = default_boosters();
    lex.negators = default_negators();
    return lex;
}

double fk_grade(std::string_view text) {
    return fk_grade(text, textseg::AbbreviationSet::defaults());
}

double fk_grade(std::string_view text, const textseg::AbbreviationSet& abbreviations) {
    const std::vector<textseg::Token> tokens = textseg::tokenize_words(text);
    if (tokens.empty()) {
        throw UndefinedMetric("fk_grade: no words");
    }
    const std::vector<textseg::Sentence> sentences = textseg::split_sentences(text, abbreviations);
    const double words = static_cast<double>(tokens.size());
    const double sents = static_cast<double>(sentences.empty() ? 1 : sentences.size());
    double syllables = 0.0;
    for (const textseg::Token& t : tokens) {
        syllables += static_cast<double>(textseg::count_syllables(t.surface));
    }
    return 0.39 * (words / sents) + 11.8 * (syllables / words) - 15.59;
}

double sentiment_compound(std::string_view text, const SentimentLexicon& lexicon) {
    const std::vector<textseg::Token> tokens = textseg::tokenize_words(text);

    bool mixed_case = false;
    {
        std::size_t caps = 0, cased = 0;
        for (const textseg::Token& t : tokens) {
            bool has_letter = false;
            for (char32_t c : utf8::decode(t.surface)) {
                if (utf8::simple_fold(c) != c || (c >= U'a' && c <= U'z')) has_letter = true;
            }
            if (!has_letter) continue;
            ++cased;
            if (is_all_caps(t)) ++caps;
        }
        mixed_case = caps != cased; // caps emphasis is meaningless in shouting-only text
    }

    double total = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& key = tokens[i].lowercase_key;
        if (lexicon.boosters.count(key)) continue; // boosters carry no own valence
        const auto entry = lexicon.entries.find(key);
        if (entry == lexicon.entries.end()) continue;

        double valence = entry->second;
        if (mixed_case && is_all_caps(tokens[i])) {
            valence += valence >= 0.0 ? kCapsEmphasis : -kCapsEmphasis;
        }
        for (std::size_t d = 1; d <= 3 && d <= i; ++d) {
            const auto booster = lexicon.boosters.find(tokens[i - d].lowercase_key);
            if (booster == lexicon.boosters.end()) continue;
            double s = booster->second * kBoosterDamping[d - 1];
            if (valence < 0.0) s = -s;
            valence += s;
        }
        for (std::size_t d = 1; d <= 3 && d <= i; ++d) {
            if (lexicon.negators.count(tokens[i - d].lowercase_key)) {
                valence *= kNegationScalar;
                break;
            }
        }
        total += valence;
    }

    if (total != 0.0) {
        std::size_t bangs = 0;
        for (char c : text) {
            if (c == '!') ++bangs;
        }
        const double amplifier = static_cast<double>(std::min<std::size_t>(bangs, 3)) * kExclamationBoost;
        total += total > 0.0 ? amplifier : -amplifier;
    }

    const double compound = total / std::sqrt(total * total + kNormalizationAlpha);
    return std::clamp(compound, -1.0, 1.0);
}

std::vector<double> EmbeddingProvider::embed_one(std::string_view text) const {
    const std::vector<std::string> batch = {std::string(text)};
    auto vectors = embed(batch);
    if (vectors.size() != 1) {
        throw ProviderError(name() + ": expected 1 vector, got " + std::to_string(vectors.size()));
    }
    return std::move(vectors.front());
}

HashedTfEmbedder::HashedTfEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) {
        throw InvalidArgument("HashedTfEmbedder: dimension must be >= 1");
    }
}

std::string HashedTfEmbedder::name() const {
    return "hashed-tf-" + std::to_string(dimension_);
}

std::size_t HashedTfEmbedder::dimension() const { return dimension_; }

std::uint64_t HashedTfEmbedder::hash64(std::string_view key) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : key) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::vector<double>> HashedTfEmbedder::embed(std::span<const std::string> texts) const {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<double> vec(dimension_, 0.0);
        for (const textseg::Token& t : textseg::tokenize_words(text)) {
            vec[hash64(t.lowercase_key) % dimension_] += 1.0;
        }
        double norm = 0.0;
        for (double v : vec) norm += v * v;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& v : vec) v /= norm;
        }
        out.push_back(std::move(vec));
    }
    return out;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::size_t dimension, double timeout_seconds)
    : endpoint_(std::move(endpoint)), dimension_(dimension), timeout_seconds_(timeout_seconds) {
    if (dimension_ == 0) {
        throw InvalidArgument("HttpEmbedder: dimension must be >= 1");
    }
}

std::string HttpEmbedder::name() const { return "http:" + endpoint_; }

std::size_t HttpEmbedder::dimension() const { return dimension_; }

std::vector<std::vector<double>> HttpEmbedder::embed(std::span<const std::string> texts) const {
    const detail::HttpUrl url = detail::parse_http_url(endpoint_);
    httplib::Client client(url.scheme_host_port);
    const auto timeout_ms = static_cast<time_t>(timeout_seconds_ * 1000);
    client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);

    nlohmann::json request;
    request["input"] = std::vector<std::string>(texts.begin(), texts.end());
    const auto res = client.Post(url.path, request.dump(), "application/json");
    if (!res) {
        throw ProviderError("embedding endpoint unreachable: " + endpoint_);
    }
    if (res->status != 200) {
        throw ProviderError("embedding endpoint " + endpoint_ + " returned status " +
                            std::to_string(res->status));
    }
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
        throw ProviderError("embedding endpoint " + endpoint_ + " returned bad JSON: " + e.what());
    }
    if (!body.contains("vectors") || !body["vectors"].is_array() ||
        body["vectors"].size() != texts.size()) {
        throw ProviderError("embedding endpoint " + endpoint_ + " returned wrong vector count");
    }
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& item : body["vectors"]) {
        std::vector<double> vec = item.get<std::vector<double>>();
        if (vec.size() != dimension_) {
            throw ProviderError("embedding endpoint " + endpoint_ + " returned dimension " +
                                std::to_string(vec.size()) + ", expected " +
                                std::to_string(dimension_));
        }
        out.push_back(std::move(vec));
    }
    return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("cosine: dimension mismatch");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double semantic_similarity(std::string_view prompt, std::string_view response,
                           const EmbeddingProvider& provider) {
    const std::vector<std::string> batch = {std::string(prompt), std::string(response)};
    const auto vectors = provider.embed(batch);
    if (vectors.size() != 2) {
        throw ProviderError(provider.name() + ": expected 2 vectors");
    }
    return cosine(vectors[0], vectors[1]);
}

} // namespace divprof::semmetrics
