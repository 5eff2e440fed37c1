#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "divprof/corpus.hpp"
#include "divprof/error.hpp"
#include "divprof/genharness.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <thread>

using namespace divprof;
using genharness::BenchItem;

namespace {

std::vector<std::pair<char, std::string>> abcd(const std::vector<std::string>& texts) {
    std::vector<std::pair<char, std::string>> choices;
    char label = 'A';
    for (const auto& t : texts) choices.emplace_back(label++, t);
    return choices;
}

std::vector<BenchItem> fixture_items() {
    // answers: B, A, B, D -> a constant "Answer: B" scorer gets 2/4
    std::vector<BenchItem> items;
    BenchItem q1{"q1", "What do cells use for energy?",
                 abcd({"granite", "the mitochondria", "paint", "gravel"}), 'B'};
    BenchItem q2{"q2", "Which is a primary color?", abcd({"red", "cyan", "brown", "olive"}), 'A'};
    BenchItem q3{"q3", "How many legs does a spider have?", abcd({"six", "eight", "four", "ten"}),
                 'B'};
    BenchItem q4{"q4", "Which planet is largest?", abcd({"Mars", "Venus", "Earth", "Jupiter"}),
                 'D'};
    items.push_back(q1);
    items.push_back(q2);
    items.push_back(q3);
    items.push_back(q4);
    return items;
}

struct MockServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    std::string base() const { return "http://127.0.0.1:" + std::to_string(port); }

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~MockServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }
};

} // namespace

TEST_CASE("extract_choice label patterns") {
    const auto choices = abcd({"alpha", "beta", "gamma", "delta"});
    using genharness::extract_choice;

    CHECK(extract_choice("Answer: B", choices) == 'B');
    CHECK(extract_choice("the answer is c", choices) == 'C');
    CHECK(extract_choice("b", choices) == 'B');
    CHECK(extract_choice("  (C)", choices) == 'C');
    CHECK(extract_choice("A.", choices) == 'A');
    CHECK(extract_choice("D) because of gravity", choices) == 'D');
    CHECK(extract_choice("c: gamma obviously", choices) == 'C');

    // isolated label on its own line
    CHECK(extract_choice("I considered all of them.\nB.\nThat is final.", choices) == 'B');
    CHECK(extract_choice("thinking...\n(D)\n", choices) == 'D');

    // leading word that merely starts with a label letter is not a label
    CHECK(extract_choice("Although unclear, who knows", choices) == std::nullopt);
    // label outside the choice set is not returned
    CHECK(extract_choice("Answer: E", choices) == std::nullopt);
    CHECK(extract_choice("", choices) == std::nullopt);
}

TEST_CASE("extract_choice containment rule") {
    const auto choices = abcd({"granite", "the mitochondria", "paint", "gravel"});
    CHECK(genharness::extract_choice("it is the mitochondria, clearly", choices) == 'B');
    CHECK(genharness::extract_choice("It is THE MITOCHONDRIA", choices) == 'B');
    // two choice texts contained -> ambiguous -> none
    CHECK(genharness::extract_choice("granite or gravel, hard to say", choices) == std::nullopt);
    // Joycean babble matches nothing
    CHECK(genharness::extract_choice("riverrun past Eve and Adam's bend of bay", choices) ==
          std::nullopt);
}

TEST_CASE("extract_choice determinism") {
    const auto choices = abcd({"one", "two", "three"});
    for (int i = 0; i < 10; ++i) {
        CHECK(genharness::extract_choice("Answer: a", choices) == 'A');
    }
}

TEST_CASE("bench template rendering") {
    const BenchItem item{"id", "Why?", abcd({"x", "y"}), 'A'};
    const std::string prompt =
        genharness::render_bench_prompt(genharness::default_bench_template(), item);
    CHECK(prompt == "Question: Why?\nA. x\nB. y\nAnswer:");
}

TEST_CASE("load_bench_items") {
    {
        std::ofstream out("items_ok.jsonl");
        out << R"({"item_id":"i1","question":"Q1?","choices":[{"label":"A","text":"yes"},{"label":"B","text":"no"}],"answer_label":"A"})"
            << "\n\n";
        out << R"({"item_id":"i2","question":"Q2?","choices":[{"label":"A","text":"1"},{"label":"B","text":"2"},{"label":"C","text":"3"}],"answer_label":"C"})"
            << "\n";
    }
    const auto items = genharness::load_bench_items("items_ok.jsonl");
    REQUIRE(items.size() == 2);
    CHECK(items[0].answer_label == 'A');
    CHECK(items[1].choices.size() == 3);
    std::remove("items_ok.jsonl");

    {
        std::ofstream out("items_bad.jsonl");
        out << R"({"item_id":"i1","question":"Q","choices":[{"label":"A","text":"x"}],"answer_label":"A"})"
            << "\n";
    }
    CHECK_THROWS_AS(genharness::load_bench_items("items_bad.jsonl"), ParseError); // one choice
    std::remove("items_bad.jsonl");

    {
        std::ofstream out("items_answer.jsonl");
        out << R"({"item_id":"i1","question":"Q","choices":[{"label":"A","text":"x"},{"label":"B","text":"y"}],"answer_label":"C"})"
            << "\n";
    }
    CHECK_THROWS_AS(genharness::load_bench_items("items_answer.jsonl"), ParseError);
    std::remove("items_answer.jsonl");

    CHECK_THROWS_AS(genharness::load_bench_items("missing_items.jsonl"), IoError);
}

TEST_CASE("run_benchmark against scripted endpoints") {
    const auto items = fixture_items();
    std::map<std::string, char> answer_by_question;
    for (const auto& item : items) answer_by_question[item.question] = item.answer_label;

    MockServer mock;
    mock.server.Post("/oracle", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        const std::string prompt = body.at("prompt").get<std::string>();
        char answer = '?';
        for (const auto& [question, label] : answer_by_question) {
            if (prompt.find(question) != std::string::npos) answer = label;
        }
        nlohmann::json out;
        out["text"] = std::string("Answer: ") + answer;
        res.set_content(out.dump(), "application/json");
    });
    mock.server.Post("/noise", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"text\":\"zzz unintelligible drivel zzz\"}", "application/json");
    });
    mock.server.Post("/always_b", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"text\":\"Answer: B\"}", "application/json");
    });
    mock.start();

    genharness::BenchOptions options;
    options.timeout_seconds = 5.0;

    const auto oracle = genharness::run_benchmark(mock.base() + "/oracle", "m", items, options);
    CHECK(oracle.total == 4);
    CHECK(oracle.correct == 4);
    CHECK(oracle.unparseable == 0);
    CHECK(oracle.accuracy() == doctest::Approx(1.0));
    CHECK(oracle.prompt_template == genharness::default_bench_template());

    // custom template is used and echoed for provenance
    genharness::BenchOptions custom = options;
    custom.prompt_template = "Pick one.\n{question}\n{choices}\nReply with the letter:";
    const auto custom_run = genharness::run_benchmark(mock.base() + "/oracle", "m", items, custom);
    CHECK(custom_run.correct == 4);
    CHECK(custom_run.prompt_template == custom.prompt_template);

    const auto noise = genharness::run_benchmark(mock.base() + "/noise", "m", items, options);
    CHECK(noise.correct == 0);
    CHECK(noise.unparseable == noise.total);
    CHECK(noise.accuracy() == doctest::Approx(0.0));

    // fixture has two items whose answer is B
    const auto fixed = genharness::run_benchmark(mock.base() + "/always_b", "m", items, options);
    CHECK(fixed.correct == 2);
    CHECK(fixed.accuracy() == doctest::Approx(0.5));
    CHECK(fixed.unparseable == 0);

    const auto json = genharness::bench_result_to_json(fixed);
    CHECK(json["accuracy"] == doctest::Approx(0.5));
    CHECK(json["per_item"].size() == 4);

    CHECK_THROWS_AS(
        genharness::run_benchmark(mock.base() + "/oracle", "m", std::vector<BenchItem>{}, options),
        InvalidArgument);
}

TEST_CASE("generate_samples writes loadable records") {
    MockServer mock;
    mock.server.Post("/gen", [](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        nlohmann::json out;
        out["text"] = "echo of " + body.at("prompt").get<std::string>();
        res.set_content(out.dump(), "application/json");
    });
    mock.start();

    const std::string path = "gen_out.jsonl";
    std::remove(path.c_str());

    genharness::GenerationTask task;
    task.endpoint = mock.base() + "/gen";
    task.model = "mock-model";
    task.prompts = {{"p1", "first prompt"}, {"p2", "second prompt"}};
    task.samples_per_prompt = 3;
    task.parallelism = 2;
    task.timeout_seconds = 5.0;
    task.params.temperature = 0.9;
    task.params.seed = 7;

    const auto report = genharness::generate_samples(task, path);
    CHECK(report.records.size() == 6);
    CHECK(report.failures.empty());

    const auto loaded = corpus::load_jsonl(path);
    REQUIRE(loaded.corpus.records.size() == 6);
    std::multiset<std::string> want, got;
    for (const auto& r : report.records) want.insert(r.prompt_id + "|" + r.response);
    for (const auto& r : loaded.corpus.records) {
        got.insert(r.prompt_id + "|" + r.response);
        CHECK(r.model == "mock-model");
        CHECK(r.meta.at("temperature") == doctest::Approx(0.9));
        CHECK(r.meta.at("seed") == 7);
    }
    CHECK(want == got);

    // append-only: a second run doubles the file
    genharness::generate_samples(task, path);
    CHECK(corpus::load_jsonl(path).corpus.records.size() == 12);
    std::remove(path.c_str());
}

TEST_CASE("generate_samples empty task and retry behavior") {
    MockServer mock;
    std::atomic<int> calls{0};
    mock.server.Post("/flaky", [&](const httplib::Request& req, httplib::Response& res) {
        if (calls.fetch_add(1) == 0) {
            res.status = 500;
            res.set_content("busy", "text/plain");
            return;
        }
        const auto body = nlohmann::json::parse(req.body);
        nlohmann::json out;
        out["text"] = "ok: " + body.at("prompt").get<std::string>();
        res.set_content(out.dump(), "application/json");
    });
    mock.server.Post("/dead", [](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
        res.set_content("down", "text/plain");
    });
    mock.start();

    const std::string path = "gen_retry.jsonl";
    std::remove(path.c_str());

    genharness::GenerationTask empty_task;
    empty_task.endpoint = mock.base() + "/flaky";
    empty_task.model = "m";
    const auto empty_report = genharness::generate_samples(empty_task, path);
    CHECK(empty_report.records.empty());
    CHECK(empty_report.failures.empty());

    genharness::GenerationTask task;
    task.endpoint = mock.base() + "/flaky";
    task.model = "m";
    task.prompts = {{"p1", "alpha"}, {"p2", "beta"}};
    task.samples_per_prompt = 1;
    task.retries = 2;
    task.backoff_ms = 10;
    task.timeout_seconds = 5.0;
    const auto report = genharness::generate_samples(task, path);
    CHECK(report.records.size() == 2);
    CHECK(report.retries_used >= 1);

    genharness::GenerationTask doomed = task;
    doomed.endpoint = mock.base() + "/dead";
    doomed.retries = 1;
    const auto failed = genharness::generate_samples(doomed, path);
    CHECK(failed.records.empty());
    CHECK(failed.failures.size() == 2);
    CHECK(failed.failures[0].error.find("503") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("response shape adapters") {
    MockServer mock;
    mock.server.Post("/openai_chat", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices":[{"message":{"content":"from chat"}}]})",
                        "application/json");
    });
    mock.server.Post("/openai_completion", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices":[{"text":"from completion"}]})", "application/json");
    });
    mock.server.Post("/ollama", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"response":"from ollama"})", "application/json");
    });
    mock.start();

    auto one_sample = [&](const std::string& route, genharness::ResponseShape shape) {
        genharness::GenerationTask task;
        task.endpoint = mock.base() + route;
        task.model = "m";
        task.prompts = {{"p", "q"}};
        task.shape = shape;
        task.timeout_seconds = 5.0;
        const std::string path = "gen_shape.jsonl";
        std::remove(path.c_str());
        const auto report = genharness::generate_samples(task, path);
        std::remove(path.c_str());
        REQUIRE(report.records.size() == 1);
        return report.records[0].response;
    };

    CHECK(one_sample("/openai_chat", genharness::ResponseShape::openai) == "from chat");
    CHECK(one_sample("/openai_completion", genharness::ResponseShape::openai) ==
          "from completion");
    CHECK(one_sample("/ollama", genharness::ResponseShape::ollama) == "from ollama");
    // wrong shape for the payload is a failure, not a silent empty record
    genharness::GenerationTask task;
    task.endpoint = mock.base() + "/ollama";
    task.model = "m";
    task.prompts = {{"p", "q"}};
    task.shape = genharness::ResponseShape::plain;
    task.retries = 0;
    task.timeout_seconds = 5.0;
    const auto report = genharness::generate_samples(task, "gen_shape2.jsonl");
    CHECK(report.records.empty());
    CHECK(report.failures.size() == 1);
    std::remove("gen_shape2.jsonl");

    CHECK(genharness::response_shape_from_string("openai") == genharness::ResponseShape::openai);
    CHECK_THROWS_AS(genharness::response_shape_from_string("smoke"), InvalidArgument);
}
