#include "teachable/errors.hpp"
#include "teachable/interactive.hpp"

#include "doctest.h"
#include "fixture_bridge.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace teachable;
using teachable::testing::bundled_pipeline;
using teachable::testing::to_bag;
using teachable::testing::to_docs;
using teachable::testing::to_embeddings;
using teachable::testing::to_store;

namespace {

constexpr auto rel = KeywordPolarity::relevant;
constexpr auto irr = KeywordPolarity::irrelevant;
constexpr auto text = KeywordOrigin::internal_text;

EmbeddingStore sports_vectors() {
    EmbeddingStore store(3);
    const std::vector<std::pair<std::string, std::vector<float>>> rows = {
        {"football", {1, 0, 0}}, {"soccer", {0.9f, 0.2f, 0}}, {"goal", {0.8f, -0.3f, 0.1f}},
        {"ballot", {0, 1, 0}},   {"senate", {0, 0.2f, 1}},
    };
    for (const auto& [w, v] : rows)
        store.insert(w, v);
    return store;
}

}  // namespace

TEST_CASE("record_keyword normalizes and resolves by recency") {
    KeywordStore store;
    const auto added = record_keyword(store, bundled_pipeline(), "Football", ClassLabel::Sports, rel, text);
    REQUIRE(added.size() == 1);
    CHECK(added[0].lemma == "football");
    CHECK(store.relevant(ClassLabel::Sports) == std::set<std::string>{"football"});
    CHECK(store.total(ClassLabel::Sports) == 1);

    record_keyword(store, bundled_pipeline(), "football", ClassLabel::Sports, irr, text);
    CHECK(store.relevant(ClassLabel::Sports).empty());
    CHECK(store.irrelevant(ClassLabel::Sports) == std::set<std::string>{"football"});
    CHECK(store.total(ClassLabel::Sports) == 0);
    CHECK(store.records().size() == 2);
    CHECK(store.records()[1].sequence_number == 1);

    CHECK(record_keyword(store, bundled_pipeline(), "the", ClassLabel::World, rel, text).empty());
    CHECK(record_keyword(store, bundled_pipeline(), "  ", ClassLabel::World, rel, text).empty());
    CHECK(store.records().size() == 2);

    CHECK(record_keyword(store, bundled_pipeline(), "Goals", ClassLabel::Sports, rel, text)[0].lemma == "goal");
}

TEST_CASE("scripted inserts give hand-counted totals") {
    struct Step {
        const char* word;
        ClassLabel c;
        KeywordPolarity p;
    };
    const Step script[] = {
        {"war", ClassLabel::World, rel},       {"army", ClassLabel::World, rel},
        {"vote", ClassLabel::World, rel},      {"war", ClassLabel::World, rel},
        {"goal", ClassLabel::Sports, rel},     {"team", ClassLabel::Sports, rel},
        {"goal", ClassLabel::Sports, irr},     {"coach", ClassLabel::Sports, rel},
        {"stock", ClassLabel::Business, rel},  {"market", ClassLabel::Business, rel},
        {"profit", ClassLabel::Business, rel}, {"market", ClassLabel::Business, irr},
        {"market", ClassLabel::Business, rel}, {"chip", ClassLabel::SciTech, rel},
        {"software", ClassLabel::SciTech, rel}, {"said", ClassLabel::SciTech, irr},
        {"war", ClassLabel::SciTech, irr},     {"army", ClassLabel::World, irr},
        {"space", ClassLabel::SciTech, rel},   {"team", ClassLabel::World, rel},
    };
    KeywordStore store;
    for (const auto& s : script)
        record_keyword(store, bundled_pipeline(), s.word, s.c, s.p, text);
    CHECK(store.records().size() == 20);
    // World: war, vote, team (army flipped). Sports: team, coach. Business:
    // stock, market, profit. SciTech: chip, software, space.
    CHECK(store.total(ClassLabel::World) == 3);
    CHECK(store.total(ClassLabel::Sports) == 2);
    CHECK(store.total(ClassLabel::Business) == 3);
    CHECK(store.total(ClassLabel::SciTech) == 3);
    CHECK(store.irrelevant(ClassLabel::SciTech) == std::set<std::string>{"say", "war"});
    for (ClassLabel c : kAllClasses) {
        for (const auto& w : store.relevant(c))
            CHECK(store.irrelevant(c).count(w) == 0);
    }
}

TEST_CASE("keyword likelihood examples") {
    const auto vectors = sports_vectors();
    KeywordStore store;
    for (const char* w : {"soccer", "goal", "ballot", "senate"})
        store.add(w, ClassLabel::Sports, rel, text);
    const InteractiveConfig config;
    // soccer and goal are similar to football, ballot and senate are not.
    CHECK(*vectors.similarity("football", "soccer") >= 0.2);
    CHECK(*vectors.similarity("football", "goal") >= 0.2);
    CHECK(*vectors.similarity("football", "ballot") < 0.2);
    CHECK(*vectors.similarity("football", "senate") < 0.2);
    CHECK(keyword_likelihood(store, vectors, config, "football", ClassLabel::Sports) == 0.5);
    CHECK(keyword_likelihood(store, vectors, config, "unrelated", ClassLabel::Sports) == doctest::Approx(0.1));

    KeywordStore one;
    one.add("football", ClassLabel::Sports, rel, text);
    CHECK(keyword_likelihood(one, EmbeddingStore(3), config, "football", ClassLabel::Sports) == 0.75);
}

TEST_CASE("keywords-only prediction") {
    const EmbeddingStore none(3);
    const InteractiveConfig config;
    const KeywordStore empty;
    const auto p = predict_keywords_only(empty, none, config, {{"football", 1}}, uniform_log_priors());
    CHECK(p.label == ClassLabel::World);
    for (double x : softmax(p.scores))
        CHECK(x == doctest::Approx(0.25));

    KeywordStore store;
    store.add("football", ClassLabel::Sports, rel, text);
    // Untaught classes stay at factor 1 by default, and an exact match only
    // reaches 1.5/2, so World keeps the tie.
    CHECK(predict_keywords_only(store, none, config, {{"football", 1}}, uniform_log_priors()).label ==
          ClassLabel::World);
    InteractiveConfig smoothed;
    smoothed.untaught_classes = UntaughtClass::smoothed;
    const auto sm = predict_keywords_only(store, none, smoothed, {{"football", 1}}, uniform_log_priors());
    CHECK(sm.label == ClassLabel::Sports);
    CHECK(sm.scores[1] == doctest::Approx(std::log(0.25) + std::log(0.75)));
    CHECK(sm.scores[0] == doctest::Approx(std::log(0.25) + std::log(0.5)));
    CHECK(predict_keywords_only(store, none, config, {{"ballot", 1}}, uniform_log_priors()).label ==
          ClassLabel::World);
    CHECK(predict_keywords_only(store, none, smoothed, {{"ballot", 1}}, uniform_log_priors()).label ==
          ClassLabel::World);

    // Three-class store, two-word doc, scored by hand.
    KeywordStore three;
    three.add("war", ClassLabel::World, rel, text);
    three.add("army", ClassLabel::World, rel, text);
    three.add("goal", ClassLabel::Sports, rel, text);
    three.add("stock", ClassLabel::Business, rel, text);
    three.add("war", ClassLabel::Business, irr, text);
    const LemmaBag doc{{"war", 1}, {"goal", 1}};
    const auto s = predict_keywords_only(three, none, config, doc, uniform_log_priors()).scores;
    const double q = std::log(0.25);
    CHECK(s[0] == doctest::Approx(q + std::log(1.5 / 3) + std::log(0.5 / 3)));
    CHECK(s[1] == doctest::Approx(q + std::log(0.5 / 2) + std::log(1.5 / 2)));
    CHECK(s[2] == doctest::Approx(q + std::log(0.5 / 2)));  // war excluded by the irrelevant set
    CHECK(s[3] == doctest::Approx(q));
}

TEST_CASE("combined prediction") {
    const std::vector<oracle::Doc> toy = {
        {0, {{"war", 2}, {"army", 1}}},   {1, {{"win", 2}, {"team", 1}}},
        {2, {{"stock", 2}, {"win", 1}}},  {3, {{"chip", 1}, {"war", 1}}},
    };
    const auto base = NaiveBayesModel::fit(to_docs(toy), NBVariant::multinomial);
    const EmbeddingStore none(3);
    const InteractiveConfig config;

    const LemmaBag doc{{"win", 1}, {"team", 2}};
    const auto neutral = predict_combined(KeywordStore{}, none, config, doc, base);
    CHECK(neutral.scores == base.predict(doc).scores);
    CHECK(neutral.label == base.predict(doc).label);

    KeywordStore sports;
    sports.add("team", ClassLabel::Sports, rel, text);
    sports.add("win", ClassLabel::Sports, rel, text);
    const auto boosted = predict_combined(sports, none, config, doc, base);
    // Keyword factors never exceed 1, so the absolute Sports score drops:
    // win and both team tokens each contribute (1 + 0.5) / (2 + 1).
    CHECK(boosted.scores[1] == doctest::Approx(base.predict(doc).scores[1] + 3 * std::log(0.5)));
    CHECK(boosted.scores[0] == base.predict(doc).scores[0]);

    // Once every class has keywords, the Sports margin grows.
    auto taught = sports;
    taught.add("war", ClassLabel::World, rel, text);
    taught.add("stock", ClassLabel::Business, rel, text);
    taught.add("chip", ClassLabel::SciTech, rel, text);
    const auto all = predict_combined(taught, none, config, doc, base).scores;
    const auto plain = base.predict(doc).scores;
    for (std::size_t k : {0, 2, 3})
        CHECK(all[1] - all[k] > plain[1] - plain[k]);

    const std::vector<oracle::Keyword> records = {{"team", 1, true}, {"win", 1, true}};
    const auto want = oracle::combined(toy, records, {{"win", 1}, {"team", 2}}, false, {}, 0.2);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(std::abs(boosted.scores[k] - want[k]) <= 1e-9);
}

TEST_CASE("random fixtures match the keyword and combined evaluators") {
    std::mt19937_64 rng(77);
    for (int round = 0; round < 150; ++round) {
        const auto f = oracle::random_fixture(rng);
        const auto embeddings = to_embeddings(f.vectors);
        const auto vectors = teachable::testing::rounded(f.vectors);
        const auto store = to_store(f.keywords);
        InteractiveConfig config;
        config.tau = SimilarityThreshold(f.tau);
        const KeywordMatcher matcher(store, embeddings, config);
        const LemmaBag doc = to_bag(f.doc);

        const auto ko = matcher.predict_keywords_only(doc, uniform_log_priors());
        const auto ko_want = oracle::keywords_only(f.keywords, f.doc, vectors, f.tau);
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(std::abs(ko.scores[k] - ko_want[k]) <= 1e-9);
        CHECK(class_index(ko.label) == std::size_t(oracle::argmax(ko_want)));

        InteractiveConfig smoothed = config;
        smoothed.untaught_classes = UntaughtClass::smoothed;
        const auto ks = KeywordMatcher(store, embeddings, smoothed).predict_keywords_only(doc, uniform_log_priors());
        const auto ks_want = oracle::keywords_only(f.keywords, f.doc, vectors, f.tau, true);
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(std::abs(ks.scores[k] - ks_want[k]) <= 1e-9);

        for (bool bernoulli : {false, true}) {
            const auto base =
                NaiveBayesModel::fit(to_docs(f.train), bernoulli ? NBVariant::bernoulli : NBVariant::multinomial);
            const auto got = matcher.predict_combined(doc, base);
            const auto want = oracle::combined(f.train, f.keywords, f.doc, bernoulli, vectors, f.tau);
            for (std::size_t k = 0; k < 4; ++k)
                CHECK(std::abs(got.scores[k] - want[k]) <= 1e-9);
            CHECK(class_index(got.label) == std::size_t(oracle::argmax(want)));
        }
    }
}

TEST_CASE("teaching a word in the document never hurts its class margin") {
    // Holds for single-lemma documents when the class already has a relevant
    // keyword and the word is not excluded by the class's irrelevant set.
    std::mt19937_64 rng(13);
    int checked = 0;
    for (int round = 0; round < 400; ++round) {
        const auto f = oracle::random_fixture(rng);
        const auto embeddings = to_embeddings(f.vectors);
        InteractiveConfig config;
        config.tau = SimilarityThreshold(f.tau);
        const std::string word = f.doc.begin()->first;
        const LemmaBag doc{{word, f.doc.begin()->second}};
        const auto store = to_store(f.keywords);
        const ClassLabel target = class_from_index(rng() % 4);
        const KeywordMatcher before(store, embeddings, config);
        if (store.total(target) == 0 || before.match(word).matches_irrelevant[class_index(target)])
            continue;
        ++checked;

        auto margin = [&](const KeywordStore& s) {
            const auto scores = KeywordMatcher(s, embeddings, config).predict_keywords_only(doc, uniform_log_priors()).scores;
            double other = -INFINITY;
            for (std::size_t k = 0; k < 4; ++k) {
                if (k != class_index(target))
                    other = std::max(other, scores[k]);
            }
            return scores[class_index(target)] - other;
        };
        auto taught = store;
        taught.add(word, target, rel, text);
        CHECK(margin(taught) >= margin(store));
    }
    CHECK(checked > 100);
}

TEST_CASE("first keyword of a class lowers its score for the taught word") {
    // Classes without relevant keywords keep factor 1, and 1.5/2 < 1.
    KeywordStore store;
    const EmbeddingStore none(3);
    const InteractiveConfig config;
    const LemmaBag doc{{"goal", 1}};
    const auto before = predict_keywords_only(store, none, config, doc, uniform_log_priors()).scores;
    store.add("goal", ClassLabel::Sports, rel, text);
    const auto after = predict_keywords_only(store, none, config, doc, uniform_log_priors()).scores;
    CHECK(after[1] - after[0] < before[1] - before[0]);
    CHECK(after[1] - after[0] == doctest::Approx(std::log(0.75)));
}

TEST_CASE("raising tau never raises a numerator") {
    const auto vectors = sports_vectors();
    KeywordStore store;
    for (const char* w : {"soccer", "goal", "ballot", "senate"})
        store.add(w, ClassLabel::Sports, rel, text);
    for (const char* word : {"football", "ballot", "senate", "unknown"}) {
        std::size_t previous = 99;
        for (double tau = -1.0; tau <= 1.0; tau += 0.1) {
            InteractiveConfig config;
            config.tau = SimilarityThreshold(std::min(tau, 1.0));
            const auto n = KeywordMatcher(store, vectors, config).match(word).similar_relevant[1];
            CHECK(n <= previous);
            previous = n;
        }
    }
}

TEST_CASE("merge_stores") {
    KeywordStore a, b, empty;
    a.add("goal", ClassLabel::Sports, rel, text);
    a.add("team", ClassLabel::Sports, rel, text);
    b.add("vote", ClassLabel::World, rel, text);

    const std::vector<KeywordStore> with_empty{a, empty};
    const auto m1 = merge_stores(with_empty);
    for (ClassLabel c : kAllClasses) {
        CHECK(m1.relevant(c) == a.relevant(c));
        CHECK(m1.irrelevant(c) == a.irrelevant(c));
    }

    const std::vector<KeywordStore> disjoint{a, b};
    const auto m2 = merge_stores(disjoint);
    for (ClassLabel c : kAllClasses)
        CHECK(m2.total(c) == a.total(c) + b.total(c));
    CHECK(m2.records().size() == 3);
    CHECK(m2.records()[2].sequence_number == 2);

    // a says goal is relevant for Sports, c later says irrelevant; the later
    // store in the list wins.
    KeywordStore c;
    c.add("goal", ClassLabel::Sports, irr, text);
    const std::vector<KeywordStore> conflict{a, c};
    const auto m3 = merge_stores(conflict);
    CHECK(m3.relevant(ClassLabel::Sports) == std::set<std::string>{"team"});
    CHECK(m3.irrelevant(ClassLabel::Sports) == std::set<std::string>{"goal"});
    const std::vector<KeywordStore> reversed{c, a};
    CHECK(merge_stores(reversed).relevant(ClassLabel::Sports) == std::set<std::string>{"goal", "team"});
}

TEST_CASE("keyword store JSON round trip") {
    KeywordStore store;
    store.add("goal", ClassLabel::Sports, rel, KeywordOrigin::external);
    store.add("vote", ClassLabel::World, irr, KeywordOrigin::highlight);
    const auto back = keywords_from_json(nlohmann::json::parse(keywords_to_json(store).dump()));
    CHECK(back == store);

    auto doc = keywords_to_json(store);
    doc["records"][1]["sequence_number"] = 0;
    CHECK_THROWS_AS(keywords_from_json(doc), ParseError);
    KeywordStore manual;
    CHECK_THROWS_AS(manual.apply(KeywordRecord{"", ClassLabel::World, rel, text, 0}), ValidationError);
}
