#include "teachable/corpus.hpp"
#include "teachable/errors.hpp"
#include "teachable/text_pipeline.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <fstream>
#include <random>
#include <set>

using namespace teachable;
using teachable::testing::bundled_pipeline;

using Tokens = std::vector<std::string>;

TEST_CASE("tokenize splits whitespace and punctuation") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("Stocks rallied, again.") == Tokens{"Stocks", "rallied", ",", "again", "."});
    CHECK(tokenize("U.S. GDP up 3%") == Tokens{"U", ".", "S", ".", "GDP", "up", "3", "%"});
    CHECK(tokenize("  (Reuters) - well-known firm's \"deal\"") ==
          Tokens{"(", "Reuters", ")", "-", "well-known", "firm's", "\"", "deal", "\""});
    CHECK(tokenize("trailing- 'quoted'") == Tokens{"trailing", "-", "'", "quoted", "'"});
    // U+00A0 no-break space and U+2014 em dash.
    CHECK(tokenize("a b—c") == Tokens{"a", "b", "—", "c"});
    CHECK(tokenize("café naïve") == Tokens{"café", "naïve"});
}

TEST_CASE("tokenize keeps every alphanumeric span in order") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "abcXYZ019 ,.-'!?%\t\n";
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const auto len = rng() % 40;
        for (std::uint64_t i = 0; i < len; ++i)
            text.push_back(alphabet[rng() % alphabet.size()]);
        std::string expected, joined;
        for (char c : text) {
            if (std::isalnum(static_cast<unsigned char>(c)))
                expected.push_back(c);
        }
        for (const auto& t : tokenize(text)) {
            CHECK(!t.empty());
            for (char c : t) {
                if (std::isalnum(static_cast<unsigned char>(c)))
                    joined.push_back(c);
            }
        }
        CHECK(joined == expected);
    }
}

TEST_CASE("normalize lowercases without locale") {
    CHECK(normalize({"GDP"}) == Tokens{"gdp"});
    CHECK(normalize({}).empty());
    CHECK(normalize({"ÜBER"}) == Tokens{"über"});
    CHECK(normalize({"İSTANBUL", "МОСКВА", "ΑΘΗΝΑ"}) ==
          Tokens{"istanbul", "москва", "αθηνα"});
    const Tokens in{"MiXeD", "x", "ÉTÉ"};
    CHECK(normalize(in).size() == in.size());
}

TEST_CASE("remove_stopwords is a set difference") {
    const auto& config = bundled_pipeline();
    CHECK(remove_stopwords({"the", "match"}, config) == Tokens{"match"});
    CHECK(remove_stopwords({}, config).empty());

    // Independent reading of the bundled list.
    std::set<std::string> list;
    std::ifstream in(teachable::testing::data_dir() / "stopwords.txt");
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#')
            list.insert(line);
    }
    REQUIRE(list.size() == 179);

    const Tokens sentence = normalize(tokenize(
        "the government said on monday that it would not raise taxes for the next year because "
        "of a very weak economy and their own budget this spring in the capital"));
    REQUIRE(sentence.size() == 30);
    Tokens expected;
    for (const auto& t : sentence) {
        if (!list.count(t))
            expected.push_back(t);
    }
    CHECK(remove_stopwords(sentence, config) == expected);
    CHECK(expected == Tokens{"government", "said", "monday", "would", "raise", "taxes", "next", "year",
                             "weak", "economy", "budget", "spring", "capital"});
    CHECK(remove_stopwords(remove_stopwords(sentence, config), config) == expected);
}

TEST_CASE("lemmatize uses dictionary, then suffix rules") {
    const auto& config = bundled_pipeline();
    CHECK(lemmatize("run", config) == "run");
    CHECK(lemmatize("companies", PosTag::noun, config) == "company");
    CHECK(lemmatize("rallied", PosTag::verb, config) == "rally");
    CHECK(lemmatize("matches", PosTag::noun, config) == "match");
    CHECK(lemmatize("played", config) == "play");
    CHECK(lemmatize("scored", config) == "score");
    CHECK(lemmatize("went", config) == "go");
    CHECK(lemmatize("glasses", config) == "glass");
    CHECK(lemmatize("news", config) == "news");
    CHECK(lemmatize("gas", config) == "gas");
    CHECK(lemmatize("bigger", config) == "big");
    CHECK(lemmatize("firm's", config) == "firm");
}

TEST_CASE("unknown part of speech takes the noun path") {
    const auto& config = bundled_pipeline();
    CHECK(tag_pos("data", config) == PosTag::noun);
    CHECK(lemmatize("data", PosTag::other, config) == "datum");
    CHECK(lemmatize("data", PosTag::other, config) == lemmatize("data", PosTag::noun, config));
}

TEST_CASE("preprocess composes the stages") {
    const auto& config = bundled_pipeline();
    CHECK(preprocess("", config).empty());
    CHECK(preprocess("The teams played matches", config) == LemmaBag{{"team", 1}, {"play", 1}, {"match", 1}});
    CHECK(preprocess("Goal! goals, GOAL.", config) == LemmaBag{{"goal", 3}});
    CHECK(preprocess("... -- !!", config).empty());
}

namespace {

std::vector<std::string> property_texts() {
    std::vector<std::string> texts;
    const auto docs = read_ag_news_csv(teachable::testing::test_data_dir() / "desk_test.csv");
    for (std::size_t i = 0; i < docs.size(); i += 10)
        texts.push_back(docs[i].text());
    std::mt19937_64 rng(11);
    const std::vector<std::string> pieces = {"Running", "ties", "U.S.", "don't", "re-used", "3%", "ÉTÉ",
                                             "flies", "meetings", "played,", "crises", "bigger", "'quoted'",
                                             "x-rays", "buses", "goes", "the", "an", "cafés", "lying"};
    for (int i = 0; i < 200; ++i) {
        std::string text;
        for (int w = 0; w < 12; ++w)
            text += pieces[rng() % pieces.size()] + " ";
        texts.push_back(text);
    }
    return texts;
}

}  // namespace

TEST_CASE("pipeline properties: idempotence, determinism, no stopword survives") {
    const auto& config = bundled_pipeline();
    for (const auto& text : property_texts()) {
        const LemmaBag once = preprocess(text, config);
        CHECK(preprocess(join_lemmas(once), config) == once);
        CHECK(preprocess(text, config) == once);
        for (const auto& [lemma, count] : once) {
            CHECK_FALSE(config.is_stopword(lemma));
            CHECK(to_lower(lemma) == lemma);
            CHECK(lemmatize(lemma, config) == lemma);
        }
        for (const Token& token : analyze(text, config)) {
            if (has_alnum(token.surface))
                CHECK(!token.lemma.empty());
        }
    }
}

TEST_CASE("config files are validated") {
    teachable::testing::TempDir dir;
    {
        std::ofstream(dir.path() / "bad_stop.txt") << "# comment\nthe\nThe\n";
        std::ofstream(dir.path() / "bad_lemmas.tsv") << "went\tverb\tgo\nfoo\tbar\n";
        std::ofstream(dir.path() / "bad_pos.tsv") << "went\tpreposition\tgo\n";
    }
    CHECK_THROWS_AS(load_stopwords(dir.path() / "bad_stop.txt"), ParseError);
    CHECK_THROWS_AS(load_lemma_dictionary(dir.path() / "bad_lemmas.tsv"), ParseError);
    CHECK_THROWS_AS(load_lemma_dictionary(dir.path() / "bad_pos.tsv"), ParseError);
    CHECK_THROWS_AS(load_stopwords(dir.path() / "missing.txt"), ParseError);
}
