#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <random>

#include "oracles.hpp"
#include "topicbench/coherence.hpp"
#include "topicbench/error.hpp"

using namespace topicbench;
using Words = std::vector<std::string>;

namespace {

Corpus corpus(const oracle::Docs& d) { return corpus_from_tokens(d); }

oracle::Docs random_docs(std::mt19937_64& rng, std::size_t n_docs, std::size_t n_terms) {
    std::uniform_int_distribution<std::size_t> len(0, 25), term(0, n_terms - 1);
    oracle::Docs docs(n_docs);
    for (auto& d : docs) {
        const auto l = len(rng);
        for (std::size_t i = 0; i < l; ++i) d.push_back("t" + std::to_string(term(rng)));
    }
    return docs;
}

} // namespace

TEST(Counting, WindowExample) {
    Words w{"a", "b", "c"};
    auto c = count_contexts(corpus({{"a", "b", "c"}}), w, ContextMode::window, 2);
    EXPECT_EQ(c.n_contexts(), 2u);
    EXPECT_EQ(c.single("a"), 1u);
    EXPECT_EQ(c.single("b"), 2u);
    EXPECT_EQ(c.pair("a", "b"), 1u);
    EXPECT_EQ(c.pair("a", "c"), 0u);
}

TEST(Counting, ShortDocumentsAreOneContext) {
    Words w{"a", "b"};
    auto c = count_contexts(corpus({{"a", "b"}, {"b"}, {}}), w, ContextMode::window, 5);
    EXPECT_EQ(c.n_contexts(), 3u);
    EXPECT_EQ(c.pair("a", "b"), 1u);
}

TEST(Counting, SymmetryAndBounds) {
    std::mt19937_64 rng(4);
    auto docs = random_docs(rng, 30, 10);
    Words w;
    for (int i = 0; i < 10; ++i) w.push_back("t" + std::to_string(i));
    for (auto mode : {ContextMode::document, ContextMode::window}) {
        auto c = count_contexts(corpus(docs), w, mode, 4);
        auto s = count_contexts(corpus(docs), w, mode, 4, Exec::serial);
        for (std::size_t i = 0; i < w.size(); ++i) {
            EXPECT_LE(c.single(i), c.n_contexts());
            EXPECT_EQ(c.single(i), s.single(i));
            for (std::size_t j = 0; j < w.size(); ++j) {
                EXPECT_EQ(c.pair(i, j), c.pair(j, i));
                EXPECT_EQ(c.pair(i, j), s.pair(i, j));
                EXPECT_LE(c.pair(i, j), std::min(c.single(i), c.single(j)));
            }
        }
    }
}

TEST(Counting, DuplicateWordsRejectedByCounts) {
    EXPECT_THROW(CooccurrenceCounts(ContextMode::document, 0, {"a", "a"}), std::exception);
}

TEST(UMass, HandExample) {
    auto docs = corpus({{"a", "b"}, {"a", "c"}, {"a", "b", "c"}});
    Words w{"a", "b", "c"};
    auto c = count_contexts(docs, w, ContextMode::document);
    // conditioning on the earlier-ranked word: ln((pair(a,b)+1)/single(b))
    EXPECT_NEAR(u_mass(Words{"b", "a"}, c).value, std::log(1.5), 1e-15);
    EXPECT_NEAR(u_mass(Words{"a", "b"}, c).value, 0.0, 1e-15);
    EXPECT_EQ(u_mass(Words{"a"}, c).value, 0.0);
    EXPECT_EQ(u_mass(Words{"a"}, c).pairs, 0u);
}

TEST(UMass, NeverCooccurringPairIsNegative) {
    auto docs = corpus({{"a"}, {"a"}, {"a"}, {"b"}});
    auto c = count_contexts(docs, Words{"a", "b"}, ContextMode::document);
    EXPECT_NEAR(u_mass(Words{"a", "b"}, c).value, std::log(1.0 / 3.0), 1e-15);
}

TEST(UMass, MissingConditioningWordIsSkipped) {
    auto docs = corpus({{"a"}, {"b"}});
    auto c = count_contexts(docs, Words{"a", "b", "z"}, ContextMode::document);
    auto s = u_mass(Words{"z", "a", "b"}, c);
    EXPECT_EQ(s.skipped_pairs, 2u);
    EXPECT_EQ(s.pairs, 1u);
}

TEST(Npmi, AlwaysTogether) {
    auto c = count_contexts(corpus({{"a", "b"}, {"c"}}), Words{"a", "b"}, ContextMode::document);
    EXPECT_NEAR(npmi(0, 1, c, 1e-12).value, 1.0, 1e-9);
}

TEST(Npmi, Independence) {
    auto c = count_contexts(corpus({{"a", "b"}, {"a"}, {"b"}, {}}), Words{"a", "b"},
                            ContextMode::document);
    EXPECT_NEAR(npmi(0, 1, c, 1e-12).value, 0.0, 1e-9);
}

TEST(Npmi, NeverTogetherTendsToMinusOne) {
    auto c = count_contexts(corpus({{"a"}, {"b"}}), Words{"a", "b"}, ContextMode::document);
    const double coarse = npmi(0, 1, c, 1e-6).value;
    const double fine = npmi(0, 1, c, 1e-12).value;
    EXPECT_LT(fine, coarse);
    EXPECT_LT(fine, -0.9);
    EXPECT_GE(fine, -1.0);
}

TEST(Npmi, ZeroMarginalIsUndefined) {
    auto c = count_contexts(corpus({{"a"}}), Words{"a", "z"}, ContextMode::document);
    auto s = npmi(0, 1, c, 1e-12);
    EXPECT_TRUE(s.undefined);
    EXPECT_EQ(s.value, 0.0);
}

TEST(Cv, RepeatedWordIsOne) {
    auto c = count_contexts(corpus({{"a", "b"}, {"b"}}), Words{"a"}, ContextMode::window, 110);
    EXPECT_NEAR(c_v(Words{"a", "a"}, c, 1e-12).value, 1.0, 1e-12);
}

TEST(Cv, MatchesBruteForceOracle) {
    oracle::Docs docs = {{"a", "b", "c", "d"}, {"a", "b", "e"},      {"f", "g", "h", "a"},
                         {"c", "c", "d"},      {"b", "e", "f", "g"}, {"h", "a", "b", "c", "d"}};
    Words topic{"a", "b", "c"};
    for (std::size_t window : {2, 3, 110}) {
        auto c = count_contexts(corpus(docs), topic, ContextMode::window, window);
        EXPECT_NEAR(c_v(topic, c, 1e-12).value, oracle::brute_c_v(docs, topic, window, 1e-12), 1e-9);
    }
}

TEST(Cv, RandomCorporaMatchOracles) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        auto docs = random_docs(rng, 15, 8);
        Words topic{"t1", "t4", "t6"};
        auto w = count_contexts(corpus(docs), topic, ContextMode::window, 5);
        auto d = count_contexts(corpus(docs), topic, ContextMode::document);
        EXPECT_NEAR(c_v(topic, w, 1e-12).value, oracle::brute_c_v(docs, topic, 5, 1e-12), 1e-9);
        const auto um = u_mass(topic, d);
        if (um.skipped_pairs == 0) EXPECT_NEAR(um.value, oracle::brute_u_mass(docs, topic), 1e-9);
    }
}

TEST(Cv, OrderInvariantUMassIsNot) {
    auto docs = corpus({{"a", "b"}, {"a", "c"}, {"a", "b", "c"}, {"b"}});
    Words w{"a", "b", "c"};
    auto win = count_contexts(docs, w, ContextMode::window, 110);
    auto doc = count_contexts(docs, w, ContextMode::document);
    EXPECT_EQ(c_v(Words{"a", "b", "c"}, win, 1e-12).value, c_v(Words{"c", "a", "b"}, win, 1e-12).value);
    EXPECT_NE(u_mass(Words{"a", "b", "c"}, doc).value, u_mass(Words{"c", "a", "b"}, doc).value);
}

TEST(Cv, DuplicatedCorpusInvariance) {
    oracle::Docs docs = {{"a", "b"}, {"a", "c"}, {"a", "b", "c"}, {"b", "d"}};
    oracle::Docs twice = docs;
    twice.insert(twice.end(), docs.begin(), docs.end());
    Words w{"a", "b", "c"};
    auto one = count_contexts(corpus(docs), w, ContextMode::window, 110);
    auto two = count_contexts(corpus(twice), w, ContextMode::window, 110);
    EXPECT_NEAR(c_v(w, one, 1e-12).value, c_v(w, two, 1e-12).value, 1e-9);
    auto d1 = count_contexts(corpus(docs), w, ContextMode::document);
    auto d2 = count_contexts(corpus(twice), w, ContextMode::document);
    EXPECT_NEAR(u_mass(w, d2).value, oracle::brute_u_mass(twice, w), 1e-12);
    EXPECT_NEAR(u_mass(w, d1).value, oracle::brute_u_mass(docs, w), 1e-12);
}

TEST(Evaluate, DegenerateAndSkipped) {
    auto docs = corpus({{"a", "b"}, {"a", "c"}});
    std::vector<Topic> topics = {Topic{0, {{"a", 1.0}}}, Topic{1, {{"a", 1.0}, {"zzz", 0.5}, {"b", 0.2}}}};
    auto r = evaluate(topics, docs, CoherenceParams{});
    ASSERT_EQ(r.per_topic.size(), 2u);
    EXPECT_TRUE(r.per_topic[0].degenerate);
    EXPECT_EQ(r.per_topic[0].u_mass, 0.0);
    EXPECT_EQ(r.per_topic[1].skipped_words, Words{"zzz"});
    EXPECT_FALSE(r.per_topic[1].degenerate);
    EXPECT_DOUBLE_EQ(r.c_v, (r.per_topic[0].c_v + r.per_topic[1].c_v) / 2);
    EXPECT_DOUBLE_EQ(r.u_mass, (r.per_topic[0].u_mass + r.per_topic[1].u_mass) / 2);
    for (const auto& t : r.per_topic) {
        EXPECT_GE(t.c_v, -1.0);
        EXPECT_LE(t.c_v, 1.0);
    }
}

TEST(Evaluate, TopNTruncates) {
    auto docs = corpus({{"a", "b"}, {"a", "c"}, {"b", "c"}});
    std::vector<Topic> topics = {Topic{0, {{"a", 3}, {"b", 2}, {"c", 1}}}};
    CoherenceParams p;
    p.top_n = 2;
    auto r = evaluate(topics, docs, p);
    auto d = count_contexts(docs, Words{"a", "b"}, ContextMode::document);
    EXPECT_DOUBLE_EQ(r.per_topic[0].u_mass, u_mass(Words{"a", "b"}, d).value);
}

TEST(Evaluate, Errors) {
    auto docs = corpus({{"a", "b"}});
    std::vector<Topic> absent = {Topic{0, {{"x", 1.0}, {"y", 0.5}}}};
    EXPECT_THROW(evaluate(absent, docs, CoherenceParams{}), InputError);
    EXPECT_THROW(evaluate(std::vector<Topic>{}, docs, CoherenceParams{}), InputError);
    CoherenceParams bad;
    bad.top_n = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Report, JsonShape) {
    auto docs = corpus({{"a", "b"}, {"a", "c"}});
    std::vector<Topic> topics = {Topic{0, {{"a", 1.0}, {"b", 0.5}, {"q", 0.1}}}};
    auto r = evaluate(topics, docs, CoherenceParams{});
    const auto text = report_to_json(r, "lsa");
    auto j = nlohmann::json::parse(text);
    EXPECT_TRUE(j["aggregate"].contains("c_v"));
    EXPECT_TRUE(j["aggregate"].contains("u_mass"));
    EXPECT_EQ(j["per_topic"][0]["skipped_words"][0], "q");
    EXPECT_EQ(j["params"]["window"], 110);
    EXPECT_EQ(j["params"]["method"], "lsa");
    EXPECT_EQ(text.find("{\n  \"aggregate\""), 0u);
}
