// divprof: corpus profiling for divergent vs convergent text generation.
// Pipeline: generate -> ingest -> profile -> compare -> render, plus `bench`
// for multiple-choice scoring. Each stage reads the previous stage's file.

#include <CLI11.hpp>

#include "divprof/corpus.hpp"
#include "divprof/error.hpp"
#include "divprof/genharness.hpp"
#include "divprof/report.hpp"
#include "divprof/semmetrics.hpp"

#include <iostream>
#include <memory>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

struct IngestArgs {
    std::string input;
    std::string output;
    bool lenient = false;
    std::size_t min_tokens = 10;
    std::int64_t max_tokens = -1;
    bool no_dedup = false;
    std::int64_t per_model_cap = -1;
};

int cmd_ingest(const IngestArgs& args) {
    using namespace divprof;
    const auto loaded = corpus::load_jsonl(
        args.input, args.lenient ? corpus::LoadMode::lenient : corpus::LoadMode::strict);
    corpus::FilterPolicy policy;
    policy.min_tokens = args.min_tokens;
    if (args.max_tokens >= 0) policy.max_tokens = static_cast<std::size_t>(args.max_tokens);
    policy.drop_exact_duplicates = !args.no_dedup;
    if (args.per_model_cap >= 0) policy.per_model_cap = static_cast<std::size_t>(args.per_model_cap);

    const auto [filtered, report] = corpus::filter_corpus(loaded.corpus, policy);
    corpus::save_jsonl(filtered, args.output);

    std::cout << "read " << loaded.corpus.records.size() << " records";
    if (args.lenient) std::cout << " (skipped " << loaded.skipped << " malformed lines)";
    std::cout << "\nkept " << report.kept << "  dropped_short " << report.dropped_short
              << "  dropped_long " << report.dropped_long << "  dropped_duplicate "
              << report.dropped_duplicate << "  dropped_capped " << report.dropped_capped << "\n"
              << "wrote " << args.output << "\n";
    return kExitOk;
}

struct ProfileArgs {
    std::string corpus_path;
    std::string lexicon_path;
    std::string embedder = "builtin";
    std::size_t embed_dim = 512;
    std::string out;
    std::size_t threads = 0;
    double entropy_base = 2.0;
    bool hapax_per_tokens = false;
    std::string abbrev_file;
};

std::unique_ptr<divprof::semmetrics::EmbeddingProvider> make_provider(const std::string& spec,
                                                                      std::size_t dim) {
    using namespace divprof::semmetrics;
    if (spec == "builtin") {
        return std::make_unique<HashedTfEmbedder>(dim);
    }
    if (spec.rfind("http:", 0) == 0) {
        std::string url = spec;
        if (url.rfind("http://", 0) != 0) {
            url = "http://" + spec.substr(5); // accept both http:<url> and http://host forms
        }
        return std::make_unique<HttpEmbedder>(url, dim);
    }
    throw divprof::InvalidArgument("unknown embedder '" + spec + "' (builtin or http:<url>)");
}

int cmd_profile(const ProfileArgs& args) {
    using namespace divprof;
    const auto loaded = corpus::load_jsonl(args.corpus_path);
    const auto lexicon = semmetrics::SentimentLexicon::load(args.lexicon_path);
    const auto provider = make_provider(args.embedder, args.embed_dim);

    report::ProfileOptions options;
    options.threads = args.threads;
    options.entropy_log_base = args.entropy_base;
    options.hapax_basis = args.hapax_per_tokens ? lexmetrics::HapaxBasis::tokens
                                                : lexmetrics::HapaxBasis::types;
    if (!args.abbrev_file.empty()) {
        options.abbreviations = textseg::AbbreviationSet::from_file(args.abbrev_file);
    }

    const auto profiles = report::profile_corpus(loaded.corpus, *provider, lexicon, options);
    report::write_json_file(report::profiles_to_json(profiles), args.out);
    std::cout << "profiled " << profiles.size() << " model(s) from "
              << loaded.corpus.records.size() << " records -> " << args.out << "\n";
    return kExitOk;
}

struct CompareArgs {
    std::vector<std::string> profile_paths;
    std::string out;
};

int cmd_compare(const CompareArgs& args) {
    using namespace divprof;
    std::vector<report::ModelProfile> profiles;
    for (const std::string& path : args.profile_paths) {
        auto batch = report::profiles_from_json(report::read_json_file(path));
        for (auto& p : batch) profiles.push_back(std::move(p));
    }
    const auto comparison = report::compare_models(profiles);
    report::write_json_file(report::report_to_json(comparison, profiles), args.out);
    std::cout << "compared " << profiles.size() << " profiles -> " << args.out << "\n";
    return kExitOk;
}

struct RenderArgs {
    std::string report_path;
    std::string format = "svg";
    std::string out_dir = ".";
};

int cmd_render(const RenderArgs& args) {
    using namespace divprof;
    const auto [comparison, profiles] = report::report_from_json(report::read_json_file(args.report_path));
    const auto paths = report::emit_report(comparison, profiles,
                                           report::report_format_from_string(args.format),
                                           args.out_dir);
    for (const std::string& p : paths) std::cout << "wrote " << p << "\n";
    return kExitOk;
}

struct GenerateArgs {
    std::string config_path;
};

int cmd_generate(const GenerateArgs& args) {
    using namespace divprof;
    const nlohmann::json config = report::read_json_file(args.config_path);
    genharness::GenerationTask task;
    std::string output;
    try {
        task.endpoint = config.at("endpoint").get<std::string>();
        task.model = config.at("model").get<std::string>();
        output = config.at("output").get<std::string>();
        for (const auto& p : config.at("prompts")) {
            task.prompts.emplace_back(p.at("prompt_id").get<std::string>(),
                                      p.at("text").get<std::string>());
        }
        task.samples_per_prompt = config.value("samples_per_prompt", std::size_t{1});
        task.parallelism = config.value("parallelism", std::size_t{1});
        task.timeout_seconds = config.value("timeout_seconds", 30.0);
        task.retries = config.value("retries", std::size_t{2});
        task.backoff_ms = config.value("backoff_ms", std::size_t{250});
        task.shape = genharness::response_shape_from_string(config.value("shape", "plain"));
        if (config.contains("params")) {
            const auto& params = config["params"];
            if (params.contains("temperature")) task.params.temperature = params["temperature"].get<double>();
            if (params.contains("max_tokens")) task.params.max_tokens = params["max_tokens"].get<int>();
            if (params.contains("seed")) task.params.seed = params["seed"].get<std::int64_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(args.config_path + ": " + e.what());
    }
    const auto result = genharness::generate_samples(task, output);
    std::cout << "wrote " << result.records.size() << " records to " << output << " ("
              << result.failures.size() << " failures, " << result.retries_used << " retries)\n";
    for (const auto& f : result.failures) {
        std::cerr << "failed: prompt " << f.prompt_id << " sample " << f.sample_index << ": "
                  << f.error << "\n";
    }
    return kExitOk;
}

struct BenchArgs {
    std::string endpoint;
    std::string model;
    std::string items_path;
    std::string out;
    std::string shape = "plain";
    std::string prompt_template;
    double temperature = -1.0;
    std::int64_t max_tokens = -1;
    std::int64_t seed = -1;
    double timeout_seconds = 30.0;
    std::size_t retries = 2;
};

int cmd_bench(const BenchArgs& args) {
    using namespace divprof;
    const auto items = genharness::load_bench_items(args.items_path);
    genharness::BenchOptions options;
    options.shape = genharness::response_shape_from_string(args.shape);
    options.prompt_template = args.prompt_template;
    options.timeout_seconds = args.timeout_seconds;
    options.retries = args.retries;
    if (args.temperature >= 0.0) options.params.temperature = args.temperature;
    if (args.max_tokens >= 0) options.params.max_tokens = static_cast<int>(args.max_tokens);
    if (args.seed >= 0) options.params.seed = args.seed;

    const auto result = genharness::run_benchmark(args.endpoint, args.model, items, options);
    report::write_json_file(genharness::bench_result_to_json(result), args.out);
    std::cout << "model " << result.model << ": " << result.correct << "/" << result.total
              << " correct (accuracy " << result.accuracy() << ", unparseable "
              << result.unparseable << ") -> " << args.out << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"divergent-generation profiler for text corpora"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "load, filter and rewrite a JSONL corpus");
    ingest->add_option("--input", ingest_args.input, "input JSONL corpus")->required();
    ingest->add_option("--output", ingest_args.output, "filtered JSONL output")->required();
    ingest->add_flag("--lenient", ingest_args.lenient, "skip malformed lines instead of failing");
    ingest->add_option("--min-tokens", ingest_args.min_tokens, "minimum response tokens (default 10)");
    ingest->add_option("--max-tokens", ingest_args.max_tokens, "maximum response tokens");
    ingest->add_flag("--no-dedup", ingest_args.no_dedup, "keep exact duplicate responses");
    ingest->add_option("--per-model-cap", ingest_args.per_model_cap, "cap records per model");

    ProfileArgs profile_args;
    auto* profile = app.add_subcommand("profile", "score per-response metrics per model");
    profile->add_option("--corpus", profile_args.corpus_path, "filtered JSONL corpus")->required();
    profile->add_option("--lexicon", profile_args.lexicon_path, "sentiment lexicon (token<TAB>valence)")->required();
    profile->add_option("--embedder", profile_args.embedder, "builtin or http:<url> (default builtin)");
    profile->add_option("--embed-dim", profile_args.embed_dim, "embedding dimension (default 512)");
    profile->add_option("--threads", profile_args.threads, "worker threads (0 = auto)");
    profile->add_option("--entropy-base", profile_args.entropy_base, "entropy log base (default 2)");
    profile->add_flag("--hapax-per-tokens", profile_args.hapax_per_tokens,
                      "hapax ratio over tokens instead of types");
    profile->add_option("--abbrev", profile_args.abbrev_file, "extra abbreviations, one per line");
    profile->add_option("--out", profile_args.out, "profiles JSON output")->required();

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "cross-model tests and correlations");
    compare->add_option("--profiles", compare_args.profile_paths, "profile JSON files")
        ->required()
        ->expected(-1);
    compare->add_option("--out", compare_args.out, "report JSON output")->required();

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "emit report files from a comparison report");
    render->add_option("--report", render_args.report_path, "report JSON from compare")->required();
    render->add_option("--format", render_args.format, "json, csv or svg (default svg)");
    render->add_option("--out-dir", render_args.out_dir, "output directory (default .)");

    GenerateArgs generate_args;
    auto* generate = app.add_subcommand("generate", "collect samples from a generation endpoint");
    generate->add_option("--config", generate_args.config_path, "generation task JSON")->required();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "score a multiple-choice benchmark over an endpoint");
    bench->add_option("--endpoint", bench_args.endpoint, "generation endpoint URL")->required();
    bench->add_option("--model", bench_args.model, "model identifier")->required();
    bench->add_option("--items", bench_args.items_path, "bench items JSONL")->required();
    bench->add_option("--out", bench_args.out, "result JSON output")->required();
    bench->add_option("--shape", bench_args.shape, "response shape: plain, openai, ollama");
    bench->add_option("--template", bench_args.prompt_template,
                      "prompt template with {question} and {choices} placeholders");
    bench->add_option("--temperature", bench_args.temperature, "sampling temperature");
    bench->add_option("--max-tokens", bench_args.max_tokens, "max tokens per response");
    bench->add_option("--seed", bench_args.seed, "sampling seed");
    bench->add_option("--timeout", bench_args.timeout_seconds, "request timeout in seconds");
    bench->add_option("--retries", bench_args.retries, "retries per request");

    try {
        app.parse(argc, argv);
        if (ingest->parsed()) return cmd_ingest(ingest_args);
        if (profile->parsed()) return cmd_profile(profile_args);
        if (compare->parsed()) return cmd_compare(compare_args);
        if (render->parsed()) return cmd_render(render_args);
        if (generate->parsed()) return cmd_generate(generate_args);
        if (bench->parsed()) return cmd_bench(bench_args);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const divprof::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const divprof::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const divprof::ProviderError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const divprof::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
