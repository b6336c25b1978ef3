#include "ina/error.hpp"
#include "ina/synthesis.hpp"

#include "../support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace ina;

namespace {

std::vector<std::string> step_tokens(const std::vector<SynthesisStep>& steps, Direction d) {
    std::vector<std::string> out;
    for (const auto& s : steps)
        if (s.direction == d) out.push_back(s.token);
    return out;
}

std::string random_corpus(std::mt19937_64& rng, std::size_t sentences) {
    static const std::vector<std::string> subjects = {"John", "men", "the sun", "his sisters", "the bank", "clients"};
    static const std::vector<std::string> verbs = {"listens", "go", "shines", "offers", "need", "sees", "make"};
    static const std::vector<std::string> tail = {"to",    "classical", "music", "every", "day",  "at",
                                                  "morning", "work",    "money", "loans", "green", "apples",
                                                  "emo",   "house",     "city",  "river", "quickly", "bright"};
    std::string text;
    for (std::size_t s = 0; s < sentences; ++s) {
        text += subjects[rng() % subjects.size()] + " " + verbs[rng() % verbs.size()];
        const std::size_t extra = 1 + rng() % 17;
        std::vector<std::string> pool = tail;
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t k = 0; k < extra && k < pool.size(); ++k) text += " " + pool[k];
        text += ". ";
    }
    return text;
}

}  // namespace

TEST_SUITE("synthesis") {

TEST_CASE("worked example: his sisters") {
    const auto john = test::john_bundle().bundle;
    const auto trace = synthesize(john, "What do his sisters listen to?");
    REQUIRE(!trace.rejected);
    CHECK(trace.mlsu->id == 2);
    CHECK(trace.verb == "listen");
    CHECK(step_tokens(trace.steps, Direction::Right) == std::vector<std::string>{"to", "emo", kEndToken});
    CHECK(step_tokens(trace.steps, Direction::Left) ==
          std::vector<std::string>{"sister", "he", "while", kStartToken});
    CHECK(trace.steps[3].word == "sisters");
    CHECK(trace.steps[4].word == "his");
    CHECK(trace.final_answer == "while his sisters listen to emo");
    CHECK(!trace.truncated);
    CHECK(!trace.early_stop);
}

TEST_CASE("worked example: John") {
    const auto john = test::john_bundle().bundle;
    const auto trace = synthesize(john, "What does John listen to every day?");
    REQUIRE(!trace.rejected);
    CHECK(trace.mlsu->id == 1);
    CHECK(trace.final_answer == "John listens to classical music every day");
}

TEST_CASE("toy answers") {
    const auto toy = test::toy_bundle().bundle;
    CHECK(synthesize(toy, "Where do men go?").final_answer == "Men go to work");
    const auto why = synthesize(toy, "Why it is light at morning?");
    CHECK(why.pos.tag == PosTag::Verb);
    CHECK(why.final_answer == "The sun shines at morning");
}

TEST_CASE("overall confidence is the minimum of its parts") {
    const auto toy = test::toy_bundle().bundle;
    const auto t = synthesize(toy, "Where do men go?");
    double mean = 0.0;
    for (const auto& s : t.steps) mean += s.confidence;
    mean /= static_cast<double>(t.steps.size());
    CHECK(t.overall_confidence == doctest::Approx(std::min({t.pos.confidence, t.mlsu->confidence, mean})));
    CHECK(t.overall_confidence >= 0.0);
    CHECK(t.overall_confidence <= 1.0);
}

TEST_CASE("rejection") {
    const auto toy = test::toy_bundle().bundle;
    auto t = synthesize(toy, "Is a hexagonal moon tasty?");
    CHECK(t.rejected);
    CHECK(t.reason == RejectReason::NoEvidence);
    CHECK(t.steps.empty());
    CHECK(t.final_answer.empty());

    t = synthesize(toy, "Where do men go?", RejectConfig{1.01});
    CHECK(t.rejected);
    CHECK(t.reason == RejectReason::LowConfidence);
    CHECK(t.steps.empty());

    CHECK(reject_config_for(toy).mlsu_min == toy.config().reject_threshold);
    try {
        synthesize(toy, "?!");
        FAIL("expected EmptyQuestion");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyQuestion);
    }
}

TEST_CASE("expand walks one step at a time") {
    const auto john = test::john_bundle().bundle;
    const auto& unit = john.registry().at(2);
    auto s = start_state(unit, 32);
    CHECK(s.direction == Direction::Right);
    CHECK(s.remaining.size() == 5);
    s = expand(s, john);
    CHECK(s.steps.size() == 1);
    CHECK(s.steps.back().token == "to");
    CHECK(s.words_right == std::vector<std::string>{"to"});
    CHECK(std::find(s.remaining.begin(), s.remaining.end(), "to") == s.remaining.end());
    while (s.direction == Direction::Right) s = expand(s, john);
    CHECK(s.steps.back().token == kEndToken);
    CHECK(s.step_count == 0);
    while (!s.finished) s = expand(s, john);
    CHECK(assemble_answer(s) == "while his sisters listen to emo");
    CHECK(expand(s, john).steps.size() == s.steps.size());
}

TEST_CASE("step cap truncates") {
    const auto john = test::john_bundle().bundle;
    const auto s = run_synthesis(john, john.registry().at(1), 2);
    CHECK(s.finished);
    CHECK(s.truncated);
    CHECK(step_tokens(s.steps, Direction::Right).size() <= 2);
    CHECK(step_tokens(s.steps, Direction::Left).size() <= 2);
}

TEST_CASE("unknown context closes the walk early") {
    const auto toy = test::toy_bundle().bundle;
    const auto unit = make_mlsu(9, {{"Zorblat", "zorblat", PosTag::Other}, {"work", "work", PosTag::Noun}}, 0,
                                "Zorblat work");
    const auto s = run_synthesis(toy, unit, 32);
    CHECK(s.finished);
    CHECK(s.early_stop);
    CHECK(s.steps.front().forced);
}

TEST_CASE("synthesis is deterministic") {
    const auto john = test::john_bundle().bundle;
    const auto a = trace_to_string(synthesize(john, "What do his sisters listen to?"));
    const auto b = trace_to_string(synthesize(john, "What do his sisters listen to?"));
    CHECK(a == b);
    const auto j = nlohmann::json::parse(a);
    for (const char* key : {"question", "pos", "mlsu", "verb", "tokens", "steps", "answer", "confidence", "rejected"})
        CHECK(j.contains(key));
}

TEST_CASE("walks terminate without repeating tokens") {
    std::mt19937_64 rng(41);
    for (int round = 0; round < 5; ++round) {
        const auto corpus = random_corpus(rng, 20);
        const auto bundle = train_from_corpus(corpus, {}, test::english(), BundleConfig{}).bundle;
        for (const auto& [id, unit] : bundle.registry()) {
            const auto s = run_synthesis(bundle, unit, 64);
            CHECK(s.finished);
            const std::size_t n = unit.context_tokens.size() - 2;
            CHECK(step_tokens(s.steps, Direction::Right).size() <= n + 1);
            CHECK(step_tokens(s.steps, Direction::Left).size() <= n + 1);
            std::set<std::string> seen;
            for (const auto& st : s.steps) {
                if (st.token == kStartToken || st.token == kEndToken) continue;
                CHECK(seen.insert(st.token).second);
                CHECK(unit.has_token(st.token));
            }
        }
    }
}

}  // TEST_SUITE
