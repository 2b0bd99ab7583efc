#pragma once

#include "teachable/interactive.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace teachable {

enum class EventKind { utterance_in, agent_reply, keyword, mode_switch, classify, article_advanced };

std::string_view event_kind_name(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view text);

struct SessionEvent {
    std::uint64_t seq = 0;
    std::string ts;
    EventKind kind = EventKind::utterance_in;
    std::uint64_t request = 0;  // index of the accepted mutating request that produced it
    nlohmann::json payload = nlohmann::json::object();

    /// Equality ignoring the timestamp.
    bool same_content(const SessionEvent& other) const {
        return seq == other.seq && kind == other.kind && request == other.request && payload == other.payload;
    }
};

/// First line of every log. `source` is "service" for live sessions and
/// "simulated" for generated teacher logs.
struct SessionHeader {
    std::string session_id;
    std::string source = "service";
    std::uint64_t seed = 0;
    std::string created_at;
    std::vector<std::int64_t> teaching_articles;
    std::vector<std::int64_t> test_articles;
    nlohmann::json config = nlohmann::json::object();
};

/// Append-only event sequence with dense numbering from 0.
class SessionEventLog {
public:
    SessionEventLog() = default;
    explicit SessionEventLog(SessionHeader header) : header_(std::move(header)) {}

    const SessionHeader& header() const noexcept { return header_; }
    SessionHeader& header() noexcept { return header_; }
    const std::vector<SessionEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }

    /// Number of distinct request indices.
    std::uint64_t request_count() const noexcept { return events_.empty() ? 0 : events_.back().request + 1; }

    const SessionEvent& append(EventKind kind, std::uint64_t request, nlohmann::json payload, std::string ts = {});

    /// Appends an event read from elsewhere; throws ReplayError unless its
    /// numbering continues this log.
    void push(SessionEvent event);

private:
    SessionHeader header_;
    std::vector<SessionEvent> events_;
};

nlohmann::json header_to_json(const SessionHeader& header);
SessionHeader header_from_json(const nlohmann::json& doc);
nlohmann::json event_to_json(const SessionEvent& event);
SessionEvent event_from_json(const nlohmann::json& doc, std::size_t index);

/// JSONL: header line followed by one event per line.
void write_jsonl(std::ostream& out, const SessionEventLog& log);
std::string to_jsonl(const SessionEventLog& log);

/// Throws ReplayError carrying the index of the offending event (0-based; the
/// header is reported as index 0 with a message saying so).
SessionEventLog read_jsonl(std::istream& in);
SessionEventLog read_jsonl(std::string_view text);
SessionEventLog load_jsonl(const std::filesystem::path& path);

/// Payload helpers shared by the service, replay and evaluation.
nlohmann::json keyword_payload(const KeywordRecord& record, std::int64_t article_id, std::string_view raw = {});
KeywordRecord keyword_from_payload(const nlohmann::json& payload);

/// Store rebuilt from a log's keyword events. Throws ReplayError on
/// malformed or out-of-order records.
KeywordStore replay_keywords(const SessionEventLog& log);

/// UTC timestamp like 2020-04-27T12:00:00.123Z.
std::string utc_timestamp();

}  // namespace teachable
