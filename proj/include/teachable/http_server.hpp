#pragma once

#include "teachable/service.hpp"

#include <memory>
#include <string>

namespace teachable {

/// JSON API under /v1/ over a SessionManager.
///
///   POST   /v1/sessions                      {seed?, prediction_mode?}
///   GET    /v1/sessions
///   DELETE /v1/sessions/{id}
///   GET    /v1/sessions/{id}/article
///   POST   /v1/sessions/{id}/utterance       {text}
///   POST   /v1/sessions/{id}/highlight       {word, article_id}
///   POST   /v1/sessions/{id}/mode            {mode}
///   POST   /v1/sessions/{id}/classify        {article_id}
///   GET    /v1/sessions/{id}/metrics?sample_n=N
///   GET    /v1/sessions/{id}/log             JSONL
///
/// Errors are {"error": {"status", "message"}}: 400 malformed body, 404
/// unknown session or article, 409 wrong mode, 422 invalid values.
class HttpServer {
public:
    explicit HttpServer(SessionManager& sessions);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); blocks.
    bool listen_after_bind();
    void stop();
    bool running() const;
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace teachable
