#include "teachable/errors.hpp"
#include "teachable/service.hpp"

#include "doctest.h"
#include "fixture_bridge.hpp"
#include "oracles.hpp"
#include "service_fixture.hpp"

#include <fstream>
#include <random>
#include <thread>

using namespace teachable;
using teachable::testing::article_words;
using teachable::testing::replay_matches;
using teachable::testing::service_resources;
using teachable::testing::TempDir;

namespace {

std::vector<EventKind> kinds(const SessionEventLog& log, std::size_t from = 0) {
    std::vector<EventKind> out;
    for (std::size_t i = from; i < log.size(); ++i)
        out.push_back(log.events()[i].kind);
    return out;
}

std::string curve_of(const SessionEventLog& log, const ServiceResources& res) {
    const EvalSetup setup{PredictionMode::keywords_only, &res.embeddings(), {}, nullptr};
    return curve_csv(epoch_curve(log, res.corpus().test, setup));
}

// Teaches the two most frequent content words of each article, then moves on.
void teach_articles(SessionManager& sessions, const std::string& id, int articles) {
    for (int a = 0; a < articles; ++a) {
        const auto words = article_words(sessions.resources(), sessions.dialog_state(id));
        REQUIRE(words.size() >= 2);
        sessions.post_utterance(id, words[0] + " and " + words[1]);
        sessions.post_utterance(id, "next");
    }
}

}  // namespace

TEST_CASE("create_session picks 20 balanced teaching articles deterministically") {
    SessionManager sessions(service_resources());
    const auto a = sessions.create_session({.seed = 42});
    const auto b = sessions.create_session({.seed = 42});
    const auto c = sessions.create_session({.seed = 43});
    CHECK(a["session_id"] != b["session_id"]);
    CHECK(a["teaching_articles"] == b["teaching_articles"]);
    CHECK(a["test_articles"] == b["test_articles"]);
    CHECK(a["teaching_articles"] != c["teaching_articles"]);

    const auto ids = a["teaching_articles"].get<std::vector<std::int64_t>>();
    REQUIRE(ids.size() == 20);
    PerClass<int> per_class{};
    for (const auto id : ids) {
        const auto* doc = sessions.resources().train_doc(id);
        REQUIRE(doc != nullptr);
        ++per_class[class_index(doc->label)];
    }
    CHECK(per_class == PerClass<int>{5, 5, 5, 5});
    CHECK(a["test_articles"].size() == 20);
    for (const auto& t : a["test_articles"])
        CHECK(sessions.resources().test_doc(t["id"].get<std::int64_t>()) != nullptr);

    CHECK(a["mode"] == "teaching");
    CHECK(a["prediction_mode"] == "combined");
    CHECK(a["article"]["id"] == ids[0]);
    CHECK(a["article"].contains("category"));
    CHECK_FALSE(a["reply"].get<std::string>().empty());

    const auto id = a["session_id"].get<std::string>();
    const auto text = sessions.export_log(id);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
    CHECK(read_jsonl(text).header().seed == 42);
    CHECK(sessions.session_ids().size() == 3);
}

TEST_CASE("prediction mode needs a baseline model unless keywords_only") {
    const auto bare = teachable::testing::make_service_resources(std::nullopt);
    SessionManager sessions(bare, ServiceConfig{.prediction_mode = PredictionMode::keywords_only});
    CHECK(sessions.create_session()["prediction_mode"] == "keywords_only");
    CHECK_THROWS_AS(sessions.create_session({.prediction_mode = PredictionMode::combined}), ValidationError);
    CHECK_THROWS_AS(session_options_from_json({{"prediction_mode", "psychic"}}), ValidationError);
    CHECK_THROWS_AS(session_options_from_json({{"seed", "x"}}), ValidationError);
    CHECK_THROWS_AS(session_options_from_json({{"seed", -1}}), ValidationError);
    CHECK_THROWS_AS(session_options_from_json(nlohmann::json::array()), ValidationError);
    CHECK(session_options_from_json({{"seed", 9}}).seed == 9u);
}

TEST_CASE("teaching utterances reach the store and the log") {
    SessionManager sessions(service_resources());
    const auto id = sessions.create_session({.seed = 1})["session_id"].get<std::string>();
    const auto state = sessions.dialog_state(id);
    const auto category = sessions.resources().train_doc(state.current_article_id())->label;
    const auto words = article_words(sessions.resources(), state);

    const auto before = sessions.metrics(id, 40);
    const auto r = sessions.post_utterance(id, words[0] + " and " + words[1]);
    CHECK(r["intent"] == "teach_words");
    CHECK(r["keywords"].size() == 2);
    CHECK(r["keyword_totals"][std::string(class_name(category))] == 2);
    const auto after = sessions.metrics(id, 40);
    CHECK(after["keywords"].get<int>() == before["keywords"].get<int>() + 2);

    const auto log = sessions.log(id);
    CHECK(kinds(log) == std::vector{EventKind::utterance_in, EventKind::keyword, EventKind::keyword, EventKind::agent_reply});
    CHECK(log.events()[0].payload["text"] == words[0] + " and " + words[1]);
    CHECK(log.events()[1].payload["article_id"] == state.current_article_id());
    CHECK(log.events()[3].payload["text"] == r["reply"]);
    CHECK(log.request_count() == 1);

    const auto store = sessions.store(id);
    CHECK(store.relevant(category).count(words[0]) == 1);
    CHECK(store.records()[0].origin == KeywordOrigin::internal_text);
    CHECK(replay_matches(sessions, id));
}

TEST_CASE("repeat returns the previous reply verbatim") {
    SessionManager sessions(service_resources());
    const auto created = sessions.create_session({.seed = 2});
    const auto id = created["session_id"].get<std::string>();
    CHECK(sessions.post_utterance(id, "repeat")["reply"] == created["reply"]);
    const auto words = article_words(sessions.resources(), sessions.dialog_state(id));
    const auto taught = sessions.post_utterance(id, words[0]);
    CHECK(sessions.post_utterance(id, "could you repeat that?")["reply"] == taught["reply"]);
    CHECK(sessions.store(id).records().size() == 1);
    CHECK(replay_matches(sessions, id));
}

TEST_CASE("highlights") {
    SessionManager sessions(service_resources());
    const auto id = sessions.create_session({.seed = 3})["session_id"].get<std::string>();
    const auto state = sessions.dialog_state(id);
    const auto article = state.current_article_id();
    const auto category = sessions.resources().train_doc(article)->label;

    const auto r = sessions.post_highlight(id, "Football", article);
    CHECK(r["keywords"].size() == 1);
    const auto store = sessions.store(id);
    REQUIRE(store.records().size() == 1);
    CHECK(store.records()[0] == KeywordRecord{"football", category, KeywordPolarity::relevant, KeywordOrigin::highlight, 0});
    CHECK(sessions.dialog_state(id) == state);

    const auto events = sessions.log(id).size();
    CHECK_THROWS_AS(sessions.post_highlight(id, "the", article), ValidationError);
    CHECK_THROWS_AS(sessions.post_highlight(id, "football", article + 100000), Conflict);
    sessions.post_mode(id, "testing");
    const auto events_after_switch = sessions.log(id).size();
    CHECK(events_after_switch > events);
    CHECK_THROWS_AS(sessions.post_highlight(id, "football", article), Conflict);
    CHECK(sessions.log(id).size() == events_after_switch);
    CHECK(replay_matches(sessions, id));
}

TEST_CASE("mode switches") {
    SessionManager sessions(service_resources());
    const auto id = sessions.create_session({.seed = 4})["session_id"].get<std::string>();
    sessions.post_mode(id, "testing");
    sessions.post_mode(id, "teaching");
    auto log = sessions.log(id);
    std::size_t switches = 0;
    for (const auto& e : log.events())
        switches += e.kind == EventKind::mode_switch;
    CHECK(switches == 2);
    CHECK(log.request_count() == 2);

    const auto state = sessions.dialog_state(id);
    const auto same = sessions.post_mode(id, "teaching");
    CHECK(same["changed"] == false);
    CHECK(sessions.dialog_state(id) == state);
    log = sessions.log(id);
    CHECK(log.request_count() == 3);
    CHECK(log.events().back().kind == EventKind::mode_switch);
    CHECK(log.events().back().payload["changed"] == false);

    CHECK_THROWS_AS(sessions.post_mode(id, "demo"), ValidationError);
    CHECK(sessions.log(id).request_count() == 3);
    CHECK(replay_matches(sessions, id));
}

TEST_CASE("classification requests") {
    SessionManager sessions(service_resources());
    const auto created = sessions.create_session({.seed = 5});
    const auto id = created["session_id"].get<std::string>();
    const auto test_id = created["test_articles"][0]["id"].get<std::int64_t>();
    CHECK_THROWS_AS(sessions.post_classify(id, test_id), Conflict);
    sessions.post_mode(id, "testing");
    CHECK_THROWS_AS(sessions.post_classify(id, 987654), NotFound);

    const auto& res = sessions.resources();
    for (const auto& doc : res.corpus().test) {
        const auto c = sessions.post_classify(id, doc.id)["classification"];
        const auto expected = res.base()->predict(doc.lemmas);
        CHECK(c["predicted"] == class_name(expected.label));
        CHECK(c["gold"] == class_name(doc.label));
        CHECK(c["correct"] == (expected.label == doc.label));
        for (ClassLabel k : kAllClasses)
            CHECK(c["scores"][std::string(class_name(k))].get<double>() == expected.scores[class_index(k)]);
    }
    const auto via_dialog = sessions.post_utterance(id, "classify it");
    CHECK(via_dialog["classification"]["article_id"] == sessions.dialog_state(id).current_article_id());
    CHECK(replay_matches(sessions, id));
}

TEST_CASE("classification after scripted teaching matches the composed oracle") {
    const auto res = service_resources();
    SessionManager sessions(res, ServiceConfig{.prediction_mode = PredictionMode::keywords_only});
    const auto id = sessions.create_session({.seed = 6})["session_id"].get<std::string>();
    teach_articles(sessions, id, 8);
    sessions.post_mode(id, "testing");

    std::vector<oracle::Keyword> records;
    const auto store = sessions.store(id);
    for (const auto& r : store.records())
        records.push_back({r.lemma, static_cast<int>(class_index(r.label)), r.polarity == KeywordPolarity::relevant});
    oracle::Vectors vectors;
    for (const auto& w : res->embeddings().words()) {
        const auto v = res->embeddings().vector(w);
        vectors[w] = std::vector<double>(v.begin(), v.end());
    }
    for (std::size_t i = 0; i < 30; ++i) {
        const auto& doc = res->corpus().test[i];
        std::map<std::string, int> words;
        for (const auto& [w, n] : doc.lemmas)
            words[w] = static_cast<int>(n);
        const auto expected = oracle::keywords_only(records, words, vectors, 0.2);
        const auto c = sessions.post_classify(id, doc.id)["classification"];
        CHECK(c["predicted"] == class_name(class_from_index(static_cast<std::size_t>(oracle::argmax(expected)))));
        for (ClassLabel k : kAllClasses)
            CHECK(c["scores"][std::string(class_name(k))].get<double>() ==
                  doctest::Approx(expected[class_index(k)]).epsilon(1e-9));
    }
    CHECK(replay_matches(sessions, id));
}

TEST_CASE("metrics") {
    SessionManager sessions(service_resources(), ServiceConfig{.prediction_mode = PredictionMode::keywords_only});
    const auto id = sessions.create_session({.seed = 7})["session_id"].get<std::string>();
    CHECK_THROWS_AS(sessions.metrics(id, 3), ValidationError);
    const auto empty = sessions.metrics(id, 60);
    CHECK(empty["sample_n"] == 60);
    const double f1 = empty["metrics"]["macro_f1"].get<double>();
    CHECK(f1 >= 0.08);
    CHECK(f1 <= 0.26);
    CHECK(sessions.metrics(id, 60) == empty);
    CHECK(sessions.metrics(id)["sample_n"] == 100);
    CHECK(sessions.log(id).empty());

    teach_articles(sessions, id, 12);
    CHECK(sessions.metrics(id, 60)["metrics"]["macro_f1"].get<double>() > f1);
}

TEST_CASE("deleted sessions are gone") {
    TempDir dir;
    SessionManager sessions(service_resources(), ServiceConfig{.log_dir = dir.path()});
    const auto id = sessions.create_session()["session_id"].get<std::string>();
    CHECK(std::filesystem::exists(dir.path() / (id + ".jsonl")));
    sessions.delete_session(id);
    CHECK_FALSE(std::filesystem::exists(dir.path() / (id + ".jsonl")));
    CHECK_THROWS_AS(sessions.post_utterance(id, "hello"), NotFound);
    CHECK_THROWS_AS(sessions.article(id), NotFound);
    CHECK_THROWS_AS(sessions.export_log(id), NotFound);
    CHECK_THROWS_AS(sessions.metrics(id, 10), NotFound);
    CHECK_THROWS_AS(sessions.delete_session(id), NotFound);
    CHECK_THROWS_AS(sessions.post_utterance("nope", "hello"), NotFound);
}

TEST_CASE("write-through logs survive a restart") {
    TempDir dir;
    const ServiceConfig config{.log_dir = dir.path(), .prediction_mode = PredictionMode::keywords_only};
    std::string id;
    std::string exported;
    DialogState state;
    KeywordStore store;
    {
        SessionManager sessions(service_resources(), config);
        id = sessions.create_session({.seed = 8})["session_id"].get<std::string>();
        sessions.create_session({.seed = 9});
        teach_articles(sessions, id, 3);
        sessions.post_highlight(id, "stadium", sessions.dialog_state(id).current_article_id());
        sessions.post_utterance(id, "blorf zzkq");
        sessions.post_mode(id, "testing");
        sessions.post_utterance(id, "classify it");
        exported = sessions.export_log(id);
        state = sessions.dialog_state(id);
        store = sessions.store(id);
        std::ifstream in(dir.path() / (id + ".jsonl"));
        CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == exported);
    }
    SessionManager restarted(service_resources(), config);
    CHECK(restarted.recovered_sessions() == 2);
    CHECK(restarted.export_log(id) == exported);
    CHECK(restarted.dialog_state(id) == state);
    CHECK(restarted.store(id) == store);

    restarted.post_mode(id, "teaching");
    const auto log = restarted.log(id);
    CHECK(log.events().back().seq == log.size() - 1);
    CHECK(replay_matches(restarted, id));
}

TEST_CASE("tampered logs stop recovery") {
    TempDir dir;
    const ServiceConfig config{.log_dir = dir.path()};
    std::string id;
    {
        SessionManager sessions(service_resources(), config);
        id = sessions.create_session({.seed = 10})["session_id"].get<std::string>();
        teach_articles(sessions, id, 2);
    }
    const auto path = dir.path() / (id + ".jsonl");
    std::vector<std::string> lines;
    {
        std::ifstream in(path);
        for (std::string line; std::getline(in, line);)
            lines.push_back(line);
    }
    SUBCASE("sequence numbers") {
        auto doc = nlohmann::json::parse(lines[3]);
        doc["seq"] = 40;
        lines[3] = doc.dump();
    }
    SUBCASE("edited utterance") {
        auto doc = nlohmann::json::parse(lines[1]);
        doc["payload"]["text"] = "something else entirely";
        lines[1] = doc.dump();
    }
    SUBCASE("forged keyword") {
        auto doc = nlohmann::json::parse(lines[2]);
        doc["payload"]["lemma"] = "forged";
        lines[2] = doc.dump();
    }
    {
        std::ofstream out(path, std::ios::trunc);
        for (const auto& line : lines)
            out << line << '\n';
    }
    CHECK_THROWS_AS(SessionManager(service_resources(), config), ReplayError);
}

TEST_CASE("concurrent requests keep each session's log dense") {
    TempDir dir;
    SessionManager sessions(service_resources(), ServiceConfig{.log_dir = dir.path()});
    std::vector<std::string> ids;
    for (int i = 0; i < 3; ++i)
        ids.push_back(sessions.create_session({.seed = std::uint64_t(20 + i)})["session_id"].get<std::string>());

    const std::vector<std::string> lines = {"stadium and election", "repeat", "next", "what do you mean",
                                            "test mode",          "classify it", "teach mode", "blorf"};
    std::atomic<int> accepted{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            std::mt19937_64 rng(t);
            for (int i = 0; i < 40; ++i) {
                const auto& id = ids[rng() % ids.size()];
                try {
                    switch (rng() % 4) {
                    case 0:
                        sessions.post_mode(id, rng() % 2 ? "testing" : "teaching");
                        break;
                    case 1:
                        sessions.post_highlight(id, "referee", sessions.dialog_state(id).current_article_id());
                        break;
                    default:
                        sessions.post_utterance(id, lines[rng() % lines.size()]);
                    }
                    ++accepted;
                } catch (const Conflict&) {
                }
                if (i % 10 == 0)
                    sessions.metrics(id, 20);
            }
        });
    }
    for (auto& th : threads)
        th.join();

    std::uint64_t requests = 0;
    for (const auto& id : ids) {
        const auto log = sessions.log(id);
        for (std::size_t i = 0; i < log.size(); ++i)
            REQUIRE(log.events()[i].seq == i);
        requests += log.request_count();
        CHECK(replay_matches(sessions, id));
        CHECK(load_jsonl(dir.path() / (id + ".jsonl")).size() == log.size());
    }
    CHECK(requests == static_cast<std::uint64_t>(accepted.load()));
}

TEST_CASE("random sessions replay exactly") {
    const auto res = service_resources();
    SessionManager sessions(res, ServiceConfig{.prediction_mode = PredictionMode::keywords_only});
    const std::vector<std::string> lines = {
        "repeat", "next article", "what do you mean", "test mode", "classify it", "yes", "no", "teach mode",
        "the words are referee and stadium", "i think market", "zzq vvx", "maybe software", "skip"};
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const auto id = sessions.create_session({.seed = rng()})["session_id"].get<std::string>();
        for (int step = 0; step < 60; ++step) {
            try {
                switch (rng() % 6) {
                case 0:
                    sessions.post_mode(id, rng() % 2 ? "testing" : "teaching");
                    break;
                case 1: {
                    const auto state = sessions.dialog_state(id);
                    const auto words = article_words(*res, state);
                    sessions.post_highlight(id, words.empty() ? "football" : words[rng() % words.size()],
                                            state.current_article_id());
                    break;
                }
                case 2:
                    sessions.post_classify(id, res->corpus().test[rng() % res->corpus().test.size()].id);
                    break;
                default:
                    sessions.post_utterance(id, lines[rng() % lines.size()]);
                }
            } catch (const Conflict&) {
            }
        }
        REQUIRE(replay_matches(sessions, id));
        const auto exported = read_jsonl(sessions.export_log(id));
        CHECK(curve_of(exported, *res) == curve_of(sessions.log(id), *res));
    }
}
