#include "teachable/http_server.hpp"

#include "teachable/errors.hpp"

#include "httplib.h"

#include <charconv>

namespace teachable {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", {{"status", status}, {"message", message}}}});
}

struct BadRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json parse_body(const httplib::Request& req, bool allow_empty = false) {
    if (req.body.empty()) {
        if (allow_empty)
            return json::object();
        throw BadRequest("request body must be a JSON object");
    }
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object())
        throw BadRequest("request body must be a JSON object");
    return body;
}

std::string string_field(const json& body, const char* key) {
    const auto it = body.find(key);
    if (it == body.end() || !it->is_string())
        throw BadRequest(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::int64_t int_field(const json& body, const char* key) {
    const auto it = body.find(key);
    if (it == body.end() || !it->is_number_integer())
        throw BadRequest(std::string("field '") + key + "' must be an integer");
    return it->get<std::int64_t>();
}

// Maps library errors onto HTTP statuses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const BadRequest& e) {
            send_error(res, 400, e.what());
        } catch (const NotFound& e) {
            send_error(res, 404, e.what());
        } catch (const Conflict& e) {
            send_error(res, 409, e.what());
        } catch (const ValidationError& e) {
            send_error(res, 422, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    };
}

}  // namespace

struct HttpServer::Impl {
    SessionManager& sessions;
    httplib::Server server;

    explicit Impl(SessionManager& s) : sessions(s) { routes(); }

    void routes() {
        server.Post("/v1/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 201, sessions.create_session(session_options_from_json(parse_body(req, true))));
        }));
        server.Get("/v1/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"sessions", sessions.session_ids()}});
        }));
        server.Delete("/v1/sessions/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
            sessions.delete_session(req.path_params.at("id"));
            res.status = 204;
        }));
        server.Get("/v1/sessions/:id/article", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, sessions.article(req.path_params.at("id")));
        }));
        server.Post("/v1/sessions/:id/utterance", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            send_json(res, 200, sessions.post_utterance(req.path_params.at("id"), string_field(body, "text")));
        }));
        server.Post("/v1/sessions/:id/highlight", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            send_json(res, 200,
                      sessions.post_highlight(req.path_params.at("id"), string_field(body, "word"),
                                              int_field(body, "article_id")));
        }));
        server.Post("/v1/sessions/:id/mode", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            send_json(res, 200, sessions.post_mode(req.path_params.at("id"), string_field(body, "mode")));
        }));
        server.Post("/v1/sessions/:id/classify", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            send_json(res, 200, sessions.post_classify(req.path_params.at("id"), int_field(body, "article_id")));
        }));
        server.Get("/v1/sessions/:id/metrics", guarded([this](const httplib::Request& req, httplib::Response& res) {
            std::optional<std::size_t> n;
            if (req.has_param("sample_n")) {
                const auto text = req.get_param_value("sample_n");
                std::size_t v = 0;
                const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc{} || end != text.data() + text.size())
                    throw BadRequest("sample_n must be a non-negative integer");
                n = v;
            }
            send_json(res, 200, sessions.metrics(req.path_params.at("id"), n));
        }));
        server.Get("/v1/sessions/:id/log", guarded([this](const httplib::Request& req, httplib::Response& res) {
            res.status = 200;
            res.set_content(sessions.export_log(req.path_params.at("id")), "application/x-ndjson");
        }));
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty())
                send_error(res, res.status, res.status == 404 ? "no such endpoint" : "request failed");
        });
    }
};

HttpServer::HttpServer(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0)
        return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_)
        impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace teachable
