#include "teachable/http_server.hpp"

#include "doctest.h"
#include "httplib.h"
#include "service_fixture.hpp"

#include <thread>

using namespace teachable;
using nlohmann::json;
using teachable::testing::replay_matches;
using teachable::testing::service_resources;

namespace {

struct LiveServer {
    SessionManager sessions;
    HttpServer server;
    int port = -1;
    std::thread thread;

    explicit LiveServer(ServiceConfig config = {}) : sessions(service_resources(), std::move(config)), server(sessions) {
        port = server.bind("127.0.0.1", 0);
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LiveServer() {
        server.stop();
        thread.join();
    }

    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

json body_of(const httplib::Result& r) {
    REQUIRE(r);
    return json::parse(r->body);
}

httplib::Result post(httplib::Client& c, const std::string& path, const json& body) {
    return c.Post(path, body.dump(), "application/json");
}

}  // namespace

TEST_CASE("HTTP session lifecycle") {
    LiveServer live;
    auto c = live.client();

    auto r = post(c, "/v1/sessions", {{"seed", 5}, {"prediction_mode", "combined"}});
    REQUIRE(r);
    CHECK(r->status == 201);
    const auto created = json::parse(r->body);
    const std::string id = created["session_id"];
    const std::string base = "/v1/sessions/" + id;
    CHECK(created["teaching_articles"].size() == 20);

    r = c.Get(base + "/article");
    CHECK(r->status == 200);
    const auto article = body_of(r)["article"];
    CHECK(article["id"] == created["teaching_articles"][0]);

    r = c.Get(base + "/log");
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Content-Type") == "application/x-ndjson");
    CHECK(std::count(r->body.begin(), r->body.end(), '\n') == 1);

    r = post(c, base + "/highlight", {{"word", "Football"}, {"article_id", article["id"]}});
    CHECK(r->status == 200);
    r = c.Get(base + "/log");
    const auto log = read_jsonl(r->body);
    REQUIRE(log.size() == 1);
    CHECK(log.events()[0].kind == EventKind::keyword);
    CHECK(log.events()[0].payload["lemma"] == "football");
    CHECK(log.events()[0].payload["origin"] == "highlight");

    r = post(c, base + "/utterance", {{"text", "referees and stadiums"}});
    CHECK(r->status == 200);
    CHECK(body_of(r)["intent"] == "teach_words");

    r = post(c, base + "/mode", {{"mode", "testing"}});
    CHECK(r->status == 200);
    CHECK(body_of(r)["mode"] == "testing");

    const auto test_id = created["test_articles"][0]["id"];
    r = post(c, base + "/classify", {{"article_id", test_id}});
    CHECK(r->status == 200);
    const auto cls = body_of(r)["classification"];
    CHECK(cls["correct"] == (cls["predicted"] == cls["gold"]));

    r = c.Get(base + "/metrics?sample_n=40");
    CHECK(r->status == 200);
    CHECK(body_of(r)["sample_n"] == 40);

    r = c.Get("/v1/sessions");
    CHECK(body_of(r)["sessions"] == json::array({id}));

    CHECK(replay_matches(live.sessions, id));
    CHECK(read_jsonl(c.Get(base + "/log")->body).request_count() == 4);

    r = c.Delete(base);
    CHECK(r->status == 204);
    r = post(c, base + "/utterance", {{"text", "hello"}});
    CHECK(r->status == 404);
}

TEST_CASE("HTTP error statuses") {
    LiveServer live;
    auto c = live.client();
    const std::string id = body_of(post(c, "/v1/sessions", json::object()))["session_id"];
    const std::string base = "/v1/sessions/" + id;
    const auto status_of = [](const httplib::Result& r) {
        REQUIRE(r);
        const auto body = json::parse(r->body);
        CHECK(body["error"]["status"] == r->status);
        CHECK_FALSE(body["error"]["message"].get<std::string>().empty());
        return r->status;
    };

    CHECK(status_of(c.Post(base + "/utterance", "not json", "application/json")) == 400);
    CHECK(status_of(post(c, base + "/utterance", {{"words", "x"}})) == 400);
    CHECK(status_of(post(c, base + "/highlight", {{"word", "x"}, {"article_id", "7"}})) == 400);
    CHECK(status_of(c.Get(base + "/metrics?sample_n=lots")) == 400);
    CHECK(status_of(post(c, "/v1/sessions", {{"seed", -1}})) == 422);

    CHECK(status_of(c.Get("/v1/sessions/missing/article")) == 404);
    CHECK(status_of(c.Get("/v1/nothing")) == 404);
    CHECK(status_of(c.Delete("/v1/sessions/missing")) == 404);

    CHECK(status_of(post(c, base + "/classify", {{"article_id", 0}})) == 409);
    const auto article = body_of(c.Get(base + "/article"))["article"]["id"];
    CHECK(status_of(post(c, base + "/highlight", {{"word", "the"}, {"article_id", article}})) == 422);
    CHECK(status_of(post(c, base + "/mode", {{"mode", "demo"}})) == 422);
    CHECK(status_of(c.Get(base + "/metrics?sample_n=2")) == 422);
    post(c, base + "/mode", {{"mode", "testing"}});
    CHECK(status_of(post(c, base + "/highlight", {{"word", "goal"}, {"article_id", article}})) == 409);
    CHECK(status_of(post(c, base + "/classify", {{"article_id", 123456}})) == 404);

    CHECK(read_jsonl(c.Get(base + "/log")->body).request_count() == 1);
    CHECK(replay_matches(live.sessions, id));
}

TEST_CASE("HTTP clients on one session are serialized") {
    LiveServer live;
    const std::string id = body_of([&] {
        auto c = live.client();
        return post(c, "/v1/sessions", {{"seed", 3}});
    }())["session_id"];
    const std::string base = "/v1/sessions/" + id;

    std::vector<std::thread> clients;
    std::atomic<int> ok{0};
    for (int t = 0; t < 4; ++t) {
        clients.emplace_back([&, t] {
            auto c = live.client();
            const std::vector<std::string> lines = {"goal and stadium", "next", "repeat", "market"};
            for (int i = 0; i < 15; ++i) {
                const auto r = post(c, base + "/utterance", {{"text", lines[std::size_t(t + i) % lines.size()]}});
                if (r && r->status == 200)
                    ++ok;
            }
        });
    }
    for (auto& th : clients)
        th.join();
    auto c = live.client();
    const auto log = read_jsonl(c.Get(base + "/log")->body);
    CHECK(ok == 60);
    CHECK(log.request_count() == 60);
    CHECK(replay_matches(live.sessions, id));
}
