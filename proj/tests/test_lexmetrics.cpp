#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "divprof/error.hpp"
#include "divprof/lexmetrics.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <random>

using namespace divprof;
using doctest::Approx;

namespace {

std::vector<textseg::Token> toks(const std::vector<std::string>& keys) {
    std::vector<textseg::Token> out;
    for (const std::string& k : keys) {
        textseg::Token t;
        t.surface = k;
        t.char_length = k.size();
        t.lowercase_key = k;
        out.push_back(std::move(t));
    }
    return out;
}

corpus::ResponseRecord response_of(const std::string& text) {
    corpus::ResponseRecord r;
    r.model = "m";
    r.prompt_id = "p";
    r.prompt = "q";
    r.response = text;
    return r;
}

} // namespace

TEST_CASE("frequency_spectrum fixtures and invariants") {
    const auto fs = lexmetrics::frequency_spectrum(toks({"a", "b", "c"}));
    CHECK(fs.total_tokens == 3);
    CHECK(fs.spectrum.at(1) == 3);

    const auto fs2 = lexmetrics::frequency_spectrum(toks({"a", "a", "b"}));
    CHECK(fs2.total_tokens == 3);
    CHECK(fs2.spectrum.at(1) == 1);
    CHECK(fs2.spectrum.at(2) == 1);
    CHECK(fs2.type_count() == 2);

    const auto empty = lexmetrics::frequency_spectrum(toks({}));
    CHECK(empty.total_tokens == 0);
    CHECK(empty.type_counts.empty());
    CHECK(empty.spectrum.empty());

    // sum(i * V_i) == N and sum(V_i) == types, random inputs
    std::mt19937 rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        const auto keys = oracles::random_token_keys(rng);
        const auto fs3 = lexmetrics::frequency_spectrum(toks(keys));
        std::size_t token_sum = 0, type_sum = 0;
        for (const auto& [i, v] : fs3.spectrum) {
            token_sum += i * v;
            type_sum += v;
        }
        CHECK(token_sum == fs3.total_tokens);
        CHECK(type_sum == fs3.type_count());
        CHECK(fs3.spectrum == oracles::ref_spectrum(keys));
    }
}

TEST_CASE("unique_word_ratio") {
    CHECK(lexmetrics::unique_word_ratio(toks({"a", "b", "c", "d"})) == Approx(1.0));
    CHECK(lexmetrics::unique_word_ratio(toks({"the", "cat", "the"})) == Approx(2.0 / 3.0));
    CHECK(lexmetrics::unique_word_ratio(toks({"x", "x", "x", "x"})) == Approx(0.25));
    CHECK_THROWS_AS(lexmetrics::unique_word_ratio(toks({})), UndefinedMetric);
}

TEST_CASE("avg_word_length") {
    CHECK(lexmetrics::avg_word_length(toks({"cat", "dogs"})) == Approx(3.5));
    CHECK(lexmetrics::avg_word_length(toks({"a"})) == Approx(1.0));
    CHECK(lexmetrics::avg_word_length(toks({"abcde", "abcde", "abcde"})) == Approx(5.0));
    CHECK_THROWS_AS(lexmetrics::avg_word_length(toks({})), UndefinedMetric);
}

TEST_CASE("token_diversity") {
    CHECK(lexmetrics::token_diversity(toks({"x", "x", "x"})) == Approx(0.0));
    CHECK(lexmetrics::token_diversity(toks({"a", "b"})) == Approx(1.0));
    CHECK(lexmetrics::token_diversity(toks({"a", "b", "c", "d"})) == Approx(2.0));
    // natural-log base rescales
    CHECK(lexmetrics::token_diversity(toks({"a", "b"}), std::exp(1.0)) ==
          Approx(std::log(2.0)));
    CHECK_THROWS_AS(lexmetrics::token_diversity(toks({})), UndefinedMetric);
    CHECK_THROWS_AS(lexmetrics::token_diversity(toks({"a"}), 1.0), InvalidArgument);
}

TEST_CASE("sentence_complexity") {
    CHECK(lexmetrics::sentence_complexity("It rains. It pours.") == Approx(2.0));
    CHECK(lexmetrics::sentence_complexity("one two three four five six seven") == Approx(7.0));
    CHECK(lexmetrics::sentence_complexity("A. B b. C c c.") == Approx(2.0));
    CHECK_THROWS_AS(lexmetrics::sentence_complexity("?!"), UndefinedMetric);
}

TEST_CASE("yules_k") {
    const auto singletons = lexmetrics::frequency_spectrum(toks({"a", "b", "c", "d", "e"}));
    CHECK(lexmetrics::yules_k(singletons) == Approx(0.0));

    const auto aab = lexmetrics::frequency_spectrum(toks({"a", "a", "b"}));
    CHECK(lexmetrics::yules_k(aab) == Approx(1e4 * 2.0 / 9.0).epsilon(1e-9));

    const auto aaaa = lexmetrics::frequency_spectrum(toks({"a", "a", "a", "a"}));
    CHECK(lexmetrics::yules_k(aaaa) == Approx(7500.0));

    const auto single = lexmetrics::frequency_spectrum(toks({"a"}));
    CHECK_THROWS_AS(lexmetrics::yules_k(single), UndefinedMetric);
}

TEST_CASE("hapax_ratio") {
    const auto all_distinct = lexmetrics::frequency_spectrum(toks({"a", "b", "c"}));
    CHECK(lexmetrics::hapax_ratio(all_distinct) == Approx(1.0));

    const auto aab = lexmetrics::frequency_spectrum(toks({"a", "a", "b"}));
    CHECK(lexmetrics::hapax_ratio(aab) == Approx(0.5));
    CHECK(lexmetrics::hapax_ratio(aab, lexmetrics::HapaxBasis::tokens) == Approx(1.0 / 3.0));

    const auto aabb = lexmetrics::frequency_spectrum(toks({"a", "a", "b", "b"}));
    CHECK(lexmetrics::hapax_ratio(aabb) == Approx(0.0));

    const auto empty = lexmetrics::frequency_spectrum(toks({}));
    CHECK_THROWS_AS(lexmetrics::hapax_ratio(empty), UndefinedMetric);
}

TEST_CASE("vocabulary_size") {
    const std::vector<corpus::ResponseRecord> two = {response_of("a b"), response_of("b c")};
    CHECK(lexmetrics::vocabulary_size(two) == 3);
    CHECK(lexmetrics::vocabulary_size(std::vector<corpus::ResponseRecord>{}) == 0);
    const std::vector<corpus::ResponseRecord> one = {response_of("x x x")};
    CHECK(lexmetrics::vocabulary_size(one) == 1);
    // case-folded identity
    const std::vector<corpus::ResponseRecord> folded = {response_of("The the THE")};
    CHECK(lexmetrics::vocabulary_size(folded) == 1);
}

TEST_CASE("brute-force oracle agreement on random token lists") {
    std::mt19937 rng(20240601);
    for (int trial = 0; trial < 300; ++trial) {
        const auto keys = oracles::random_token_keys(rng);
        const auto tokens = toks(keys);
        const auto fs = lexmetrics::frequency_spectrum(tokens);
        CHECK(lexmetrics::unique_word_ratio(tokens) ==
              Approx(oracles::ref_unique_word_ratio(keys)).epsilon(1e-12));
        CHECK(lexmetrics::token_diversity(tokens) ==
              Approx(oracles::ref_token_diversity_bits(keys)).epsilon(1e-12));
        CHECK(lexmetrics::hapax_ratio(fs) ==
              Approx(oracles::ref_hapax_ratio_types(keys)).epsilon(1e-12));
        if (keys.size() >= 2) {
            CHECK(lexmetrics::yules_k(fs) == Approx(oracles::ref_yules_k(keys)).epsilon(1e-12));
        }
    }
}

TEST_CASE("permutation invariance") {
    std::mt19937 rng(555);
    for (int trial = 0; trial < 50; ++trial) {
        auto keys = oracles::random_token_keys(rng, 2, 30, 8);
        const auto tokens = toks(keys);
        const double uwr = lexmetrics::unique_word_ratio(tokens);
        const double div = lexmetrics::token_diversity(tokens);
        const double k = lexmetrics::yules_k(lexmetrics::frequency_spectrum(tokens));
        std::shuffle(keys.begin(), keys.end(), rng);
        const auto shuffled = toks(keys);
        CHECK(lexmetrics::unique_word_ratio(shuffled) == Approx(uwr).epsilon(1e-12));
        CHECK(lexmetrics::token_diversity(shuffled) == Approx(div).epsilon(1e-12));
        CHECK(lexmetrics::yules_k(lexmetrics::frequency_spectrum(shuffled)) ==
              Approx(k).epsilon(1e-12));
    }
}

TEST_CASE("all-singleton equivalences") {
    // UWR == 1 <=> hapax == 1 <=> K == 0, and diversity == log2(N)
    std::mt19937 rng(777);
    for (int trial = 0; trial < 50; ++trial) {
        const auto keys = oracles::random_token_keys(rng, 2, 20, 12);
        const auto tokens = toks(keys);
        const auto fs = lexmetrics::frequency_spectrum(tokens);
        const bool uwr_one = lexmetrics::unique_word_ratio(tokens) == 1.0;
        const bool hapax_one = lexmetrics::hapax_ratio(fs) == 1.0;
        const bool k_zero = lexmetrics::yules_k(fs) == 0.0;
        CHECK(uwr_one == hapax_one);
        CHECK(uwr_one == k_zero);
        const double max_bits = std::log2(static_cast<double>(keys.size()));
        CHECK(lexmetrics::token_diversity(tokens) <= max_bits + 1e-9);
        if (uwr_one) {
            CHECK(lexmetrics::token_diversity(tokens) == Approx(max_bits).epsilon(1e-12));
        }
        CHECK(lexmetrics::yules_k(fs) >= 0.0);
    }
}

TEST_CASE("metrics csv row schema") {
    CHECK(lexmetrics::metrics_csv_header() ==
          "model,prompt_id,token_count,unique_word_ratio,avg_word_length,token_diversity,"
          "sentence_complexity,yules_k,hapax_ratio,fk_grade,sentiment,semantic_similarity");
    lexmetrics::MetricVector mv;
    mv.token_count = 3;
    mv.unique_word_ratio = 2.0 / 3.0;
    mv.sentiment = -0.25;
    const std::string row = lexmetrics::metrics_csv_row("m,1", "p", mv);
    CHECK(row == "\"m,1\",p,3,0.666667,,,,,,,-0.250000,");
}
