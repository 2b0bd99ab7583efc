#include "teachable/event_log.hpp"

#include "teachable/errors.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace teachable {

namespace {

constexpr std::string_view kFormat = "teachable-session-log";

}  // namespace

std::string_view event_kind_name(EventKind kind) noexcept {
    switch (kind) {
    case EventKind::utterance_in: return "utterance_in";
    case EventKind::agent_reply: return "agent_reply";
    case EventKind::keyword: return "keyword";
    case EventKind::mode_switch: return "mode_switch";
    case EventKind::classify: return "classify";
    case EventKind::article_advanced: return "article_advanced";
    }
    return "utterance_in";
}

EventKind parse_event_kind(std::string_view text) {
    for (EventKind k : {EventKind::utterance_in, EventKind::agent_reply, EventKind::keyword, EventKind::mode_switch,
                        EventKind::classify, EventKind::article_advanced}) {
        if (event_kind_name(k) == text)
            return k;
    }
    throw ValidationError("unknown event kind '" + std::string(text) + "'");
}

const SessionEvent& SessionEventLog::append(EventKind kind, std::uint64_t request, nlohmann::json payload,
                                            std::string ts) {
    SessionEvent e;
    e.seq = events_.size();
    e.ts = ts.empty() ? utc_timestamp() : std::move(ts);
    e.kind = kind;
    e.request = request;
    e.payload = std::move(payload);
    push(std::move(e));
    return events_.back();
}

void SessionEventLog::push(SessionEvent event) {
    const std::size_t index = events_.size();
    if (event.seq != index)
        throw ReplayError("event sequence number " + std::to_string(event.seq) + " where " + std::to_string(index) +
                              " was expected",
                          index);
    const std::uint64_t expected = request_count();
    if (event.request != expected && !(index > 0 && event.request == expected - 1))
        throw ReplayError("event request index " + std::to_string(event.request) + " breaks request order", index);
    events_.push_back(std::move(event));
}

nlohmann::json header_to_json(const SessionHeader& h) {
    return {{"format", kFormat},
            {"version", 1},
            {"session_id", h.session_id},
            {"source", h.source},
            {"seed", h.seed},
            {"created_at", h.created_at},
            {"teaching_articles", h.teaching_articles},
            {"test_articles", h.test_articles},
            {"config", h.config}};
}

SessionHeader header_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format") != kFormat || doc.at("version") != 1)
            throw ReplayError("log header is not a version 1 session log", 0);
        SessionHeader h;
        h.session_id = doc.at("session_id").get<std::string>();
        h.source = doc.value("source", "service");
        h.seed = doc.at("seed").get<std::uint64_t>();
        h.created_at = doc.value("created_at", "");
        h.teaching_articles = doc.at("teaching_articles").get<std::vector<std::int64_t>>();
        h.test_articles = doc.value("test_articles", std::vector<std::int64_t>{});
        h.config = doc.value("config", nlohmann::json::object());
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw ReplayError(std::string("malformed log header: ") + e.what(), 0);
    }
}

nlohmann::json event_to_json(const SessionEvent& e) {
    return {{"seq", e.seq},
            {"ts", e.ts},
            {"kind", event_kind_name(e.kind)},
            {"request", e.request},
            {"payload", e.payload}};
}

SessionEvent event_from_json(const nlohmann::json& doc, std::size_t index) {
    try {
        SessionEvent e;
        e.seq = doc.at("seq").get<std::uint64_t>();
        e.ts = doc.value("ts", "");
        e.kind = parse_event_kind(doc.at("kind").get<std::string>());
        e.request = doc.at("request").get<std::uint64_t>();
        e.payload = doc.at("payload");
        if (!e.payload.is_object())
            throw ReplayError("event payload is not an object", index);
        return e;
    } catch (const nlohmann::json::exception& e) {
        throw ReplayError(std::string("malformed event: ") + e.what(), index);
    } catch (const ValidationError& e) {
        throw ReplayError(e.what(), index);
    }
}

void write_jsonl(std::ostream& out, const SessionEventLog& log) {
    out << header_to_json(log.header()).dump() << '\n';
    for (const auto& e : log.events())
        out << event_to_json(e).dump() << '\n';
}

std::string to_jsonl(const SessionEventLog& log) {
    std::ostringstream out;
    write_jsonl(out, log);
    return out.str();
}

SessionEventLog read_jsonl(std::istream& in) {
    std::string line;
    bool have_header = false;
    SessionEventLog log;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ReplayError(std::string("invalid JSON: ") + e.what(), have_header ? log.size() : 0);
        }
        if (!have_header) {
            log = SessionEventLog(header_from_json(doc));
            have_header = true;
            continue;
        }
        log.push(event_from_json(doc, log.size()));
    }
    if (!have_header)
        throw ReplayError("log has no header line", 0);
    return log;
}

SessionEventLog read_jsonl(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_jsonl(in);
}

SessionEventLog load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    return read_jsonl(in);
}

nlohmann::json keyword_payload(const KeywordRecord& r, std::int64_t article_id, std::string_view raw) {
    nlohmann::json p = {{"lemma", r.lemma},
                        {"class", class_code(r.label)},
                        {"polarity", polarity_name(r.polarity)},
                        {"origin", origin_name(r.origin)},
                        {"sequence_number", r.sequence_number},
                        {"article_id", article_id}};
    if (!raw.empty())
        p["raw"] = raw;
    return p;
}

KeywordRecord keyword_from_payload(const nlohmann::json& p) {
    const auto label = class_from_code(p.at("class").get<int>());
    if (!label)
        throw ValidationError("keyword event has an invalid class");
    return KeywordRecord{p.at("lemma").get<std::string>(), *label, parse_polarity(p.at("polarity").get<std::string>()),
                         parse_origin(p.at("origin").get<std::string>()), p.at("sequence_number").get<std::uint64_t>()};
}

KeywordStore replay_keywords(const SessionEventLog& log) {
    KeywordStore store;
    for (std::size_t i = 0; i < log.events().size(); ++i) {
        const auto& e = log.events()[i];
        if (e.kind != EventKind::keyword)
            continue;
        try {
            store.apply(keyword_from_payload(e.payload));
        } catch (const nlohmann::json::exception& ex) {
            throw ReplayError(std::string("malformed keyword event: ") + ex.what(), i);
        } catch (const ValidationError& ex) {
            throw ReplayError(ex.what(), i);
        }
    }
    return store;
}

std::string utc_timestamp() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
    const std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms.count()));
    return buf;
}

}  // namespace teachable
