#include "teachable/service.hpp"

#include "teachable/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace teachable {

namespace {

using nlohmann::json;

std::unordered_map<std::int64_t, std::size_t> index_by_id(const std::vector<LabeledDocument>& docs) {
    std::unordered_map<std::int64_t, std::size_t> out;
    for (std::size_t i = 0; i < docs.size(); ++i)
        out.emplace(docs[i].id, i);
    return out;
}

json class_scores(const PerClass<double>& scores) {
    json out = json::object();
    for (ClassLabel c : kAllClasses)
        out[std::string(class_name(c))] = scores[class_index(c)];
    return out;
}

json keyword_totals(const KeywordStore& store) {
    json out = json::object();
    for (ClassLabel c : kAllClasses)
        out[std::string(class_name(c))] = store.total(c);
    return out;
}

struct PlannedEvent {
    EventKind kind;
    json payload;
};

// Result of running one request against a session snapshot. Nothing is
// visible until commit.
struct Outcome {
    DialogState state;
    KeywordStore store;
    std::vector<PlannedEvent> events;
    json response = json::object();
};

// Deterministic request execution shared by live sessions and replay.
class Engine {
public:
    Engine(const ServiceResources& res, const ServiceConfig& cfg, PredictionMode mode)
        : res_(res), cfg_(cfg), mode_(mode) {}

    DialogEnvironment environment(const KeywordStore& store) const {
        DialogEnvironment env;
        env.pipeline = &res_.pipeline();
        env.lexicon = &res_.lexicon();
        env.category = [this](std::int64_t id) { return teaching_doc(id).label; };
        env.title = [this](std::int64_t id) { return testing_doc(id).title; };
        env.classify = [this, &store](std::int64_t id) -> std::optional<ClassLabel> {
            return predict(store, testing_doc(id)).label;
        };
        return env;
    }

    DialogTurn start(const SessionHeader& h, const KeywordStore& empty) const {
        return start_dialog(h.teaching_articles, h.test_articles, res_.tree(), environment(empty));
    }

    Prediction predict(const KeywordStore& store, const LabeledDocument& doc) const {
        EvalSetup setup{mode_, &res_.embeddings(), cfg_.interactive, res_.base()};
        return predict_one(store, doc.lemmas, setup);
    }

    json classification(const KeywordStore& store, std::int64_t article_id, std::string_view via) const {
        const auto& doc = testing_doc(article_id);
        const auto p = predict(store, doc);
        return {{"article_id", article_id},
                {"predicted", class_name(p.label)},
                {"gold", class_name(doc.label)},
                {"correct", p.label == doc.label},
                {"scores", class_scores(p.scores)},
                {"via", via}};
    }

    Outcome utterance(const DialogState& state, const KeywordStore& store, std::string_view text) const {
        Outcome out{state, store, {}, {}};
        out.events.push_back({EventKind::utterance_in, {{"text", text}}});
        const auto turn = advance(state, text, res_.tree(), res_.rules(), environment(store));
        apply_effects(out, state, turn.effects, "utterance");
        out.state = turn.state;
        out.events.push_back({EventKind::agent_reply,
                              {{"text", turn.reply}, {"intent", intent_name(turn.intent)}, {"node", turn.state.tree_position}}});
        out.response["reply"] = turn.reply;
        out.response["intent"] = intent_name(turn.intent);
        return out;
    }

    Outcome highlight_word(const DialogState& state, const KeywordStore& store, std::string_view word,
                           std::int64_t article_id) const {
        if (state.mode != Mode::teaching)
            throw Conflict("highlighting is only possible in teaching mode");
        if (article_id != state.current_article_id())
            throw Conflict("article " + std::to_string(article_id) + " is not the current article (" +
                           std::to_string(state.current_article_id()) + ")");
        const auto turn = teachable::highlight(state, word, environment(store));
        Outcome out{state, store, {}, {}};
        apply_effects(out, state, turn.effects, "highlight");
        out.state = turn.state;
        return out;
    }

    Outcome switch_mode(const DialogState& state, const KeywordStore& store, Mode mode) const {
        Outcome out{state, store, {}, {}};
        const bool changed = state.mode != mode;
        out.events.push_back({EventKind::mode_switch, {{"mode", mode_name(mode)}, {"changed", changed}, {"via", "toggle"}}});
        const auto turn = set_mode(state, mode, res_.tree(), environment(store));
        for (const auto& effect : turn.effects) {
            if (!std::holds_alternative<ModeSwitched>(effect))
                throw std::logic_error("unexpected effect from a mode switch: " + describe_effect(effect));
        }
        out.state = turn.state;
        if (changed) {
            out.events.push_back({EventKind::agent_reply,
                                  {{"text", turn.reply}, {"intent", intent_name(turn.intent)}, {"node", turn.state.tree_position}}});
        }
        out.response["changed"] = changed;
        out.response["reply"] = turn.reply;
        return out;
    }

    Outcome classify(const DialogState& state, const KeywordStore& store, std::int64_t article_id) const {
        if (state.mode != Mode::testing)
            throw Conflict("classification is only possible in testing mode");
        if (!res_.test_doc(article_id))
            throw NotFound("no test article " + std::to_string(article_id));
        Outcome out{state, store, {}, {}};
        auto c = classification(store, article_id, "request");
        out.events.push_back({EventKind::classify, c});
        out.response["classification"] = std::move(c);
        return out;
    }

    const LabeledDocument& teaching_doc(std::int64_t id) const {
        const auto* d = res_.train_doc(id);
        if (!d)
            throw NotFound("no training article " + std::to_string(id));
        return *d;
    }
    const LabeledDocument& testing_doc(std::int64_t id) const {
        const auto* d = res_.test_doc(id);
        if (!d)
            throw NotFound("no test article " + std::to_string(id));
        return *d;
    }

private:
    void apply_effects(Outcome& out, const DialogState& before, const std::vector<DialogEffect>& effects,
                       std::string_view via) const {
        const std::int64_t article = before.current_article_id();
        json keywords = json::array();
        for (const auto& effect : effects) {
            if (const auto* k = std::get_if<KeywordCaptured>(&effect)) {
                const auto& r = out.store.add(k->record.lemma, k->record.label, k->record.polarity, k->record.origin);
                out.events.push_back({EventKind::keyword, keyword_payload(r, article, k->raw)});
                keywords.push_back({{"lemma", r.lemma},
                                    {"class", class_name(r.label)},
                                    {"polarity", polarity_name(r.polarity)},
                                    {"origin", origin_name(r.origin)}});
            } else if (const auto* m = std::get_if<ModeSwitched>(&effect)) {
                out.events.push_back({EventKind::mode_switch, {{"mode", mode_name(m->mode)}, {"changed", true}, {"via", via}}});
            } else if (const auto* c = std::get_if<ClassifyRequested>(&effect)) {
                auto payload = classification(out.store, c->article_id, via);
                out.response["classification"] = payload;
                out.events.push_back({EventKind::classify, std::move(payload)});
            } else if (const auto* a = std::get_if<ArticleAdvanced>(&effect)) {
                json p = {{"mode", mode_name(a->mode)}, {"article_id", a->article_id}};
                p[a->mode == Mode::teaching ? "teaching_index" : "test_index"] = index_of(before, *a);
                out.events.push_back({EventKind::article_advanced, std::move(p)});
            }
        }
        out.response["keywords"] = std::move(keywords);
    }

    static std::size_t index_of(const DialogState& before, const ArticleAdvanced& a) {
        const auto& queue = a.mode == Mode::teaching ? before.teaching_queue : before.test_queue;
        const std::size_t current = a.mode == Mode::teaching ? before.teaching_index : before.test_index;
        return queue.empty() ? 0 : (current + 1) % queue.size();
    }

    const ServiceResources& res_;
    const ServiceConfig& cfg_;
    PredictionMode mode_;
};

PredictionMode header_prediction_mode(const SessionHeader& h) {
    return parse_prediction_mode(h.config.at("prediction_mode").get<std::string>());
}

void check_prediction_mode(PredictionMode mode, const ServiceResources& res) {
    if (mode != PredictionMode::keywords_only && !res.base())
        throw ValidationError(std::string(mode_name(mode)) + " prediction needs a baseline model");
}

bool same_events(const std::vector<PlannedEvent>& planned, const std::vector<const SessionEvent*>& logged) {
    if (planned.size() != logged.size())
        return false;
    for (std::size_t i = 0; i < planned.size(); ++i) {
        if (planned[i].kind != logged[i]->kind || planned[i].payload != logged[i]->payload)
            return false;
    }
    return true;
}

}  // namespace

ServiceResources::ServiceResources(PipelineConfig pipeline, CorpusSplit corpus, EmbeddingStore embeddings,
                                   ConversationTree tree, IntentRules rules, std::optional<NBVariant> base_variant,
                                   NBOptions nb_options)
    : pipeline_(std::move(pipeline)),
      corpus_(preprocess_corpus(std::move(corpus), pipeline_)),
      embeddings_(std::move(embeddings)),
      tree_(std::move(tree)),
      rules_(std::move(rules)) {
    if (base_variant)
        base_ = NaiveBayesModel::fit(corpus_.train, *base_variant, nb_options);
    for (const auto* docs : {&corpus_.train, &corpus_.test}) {
        for (const auto& d : *docs) {
            for (const auto& [lemma, n] : d.lemmas)
                lexicon_.insert(lemma);
        }
    }
    for (const auto& w : embeddings_.words())
        lexicon_.insert(lemmatize(w, pipeline_));
    train_index_ = index_by_id(corpus_.train);
    test_index_ = index_by_id(corpus_.test);
}

const LabeledDocument* ServiceResources::train_doc(std::int64_t id) const {
    const auto it = train_index_.find(id);
    return it == train_index_.end() ? nullptr : &corpus_.train[it->second];
}

const LabeledDocument* ServiceResources::test_doc(std::int64_t id) const {
    const auto it = test_index_.find(id);
    return it == test_index_.end() ? nullptr : &corpus_.test[it->second];
}

SessionOptions session_options_from_json(const json& body) {
    SessionOptions o;
    if (body.is_null())
        return o;
    if (!body.is_object())
        throw ValidationError("session options must be a JSON object");
    try {
        if (body.contains("seed")) {
            const auto& seed = body.at("seed");
            if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
                throw ValidationError("seed must be a non-negative integer");
            o.seed = body.at("seed").get<std::uint64_t>();
        }
        if (body.contains("prediction_mode"))
            o.prediction_mode = parse_prediction_mode(body.at("prediction_mode").get<std::string>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad session options: ") + e.what());
    }
    return o;
}

ReplayedSession replay_session(const SessionEventLog& log, const ServiceResources& res, const ServiceConfig& cfg) {
    PredictionMode mode;
    try {
        mode = header_prediction_mode(log.header());
    } catch (const std::exception& e) {
        throw ReplayError(std::string("log header has no usable prediction_mode: ") + e.what(), 0);
    }
    const Engine engine(res, cfg, mode);
    ReplayedSession out;
    try {
        out.state = engine.start(log.header(), out.store).state;
    } catch (const std::exception& e) {
        throw ReplayError(std::string("cannot start the logged session: ") + e.what(), 0);
    }

    const auto& events = log.events();
    std::size_t i = 0;
    while (i < events.size()) {
        const std::size_t first = i;
        std::vector<const SessionEvent*> group;
        while (i < events.size() && events[i].request == events[first].request)
            group.push_back(&events[i++]);
        const auto& head = *group.front();
        Outcome outcome;
        try {
            switch (head.kind) {
            case EventKind::utterance_in:
                outcome = engine.utterance(out.state, out.store, head.payload.at("text").get<std::string>());
                break;
            case EventKind::keyword:
                if (head.payload.at("origin") != origin_name(KeywordOrigin::highlight))
                    throw ReplayError("request starts with a non-highlight keyword", first);
                outcome = engine.highlight_word(out.state, out.store, head.payload.at("raw").get<std::string>(),
                                                head.payload.at("article_id").get<std::int64_t>());
                break;
            case EventKind::mode_switch:
                outcome = engine.switch_mode(out.state, out.store, parse_mode(head.payload.at("mode").get<std::string>()));
                break;
            case EventKind::classify:
                outcome = engine.classify(out.state, out.store, head.payload.at("article_id").get<std::int64_t>());
                break;
            default:
                throw ReplayError("request starts with a " + std::string(event_kind_name(head.kind)) + " event", first);
            }
        } catch (const ReplayError&) {
            throw;
        } catch (const std::exception& e) {
            throw ReplayError(std::string("request could not be re-executed: ") + e.what(), first);
        }
        if (!same_events(outcome.events, group))
            throw ReplayError("re-executed request produced different events", first);
        out.state = std::move(outcome.state);
        out.store = std::move(outcome.store);
    }
    return out;
}

struct SessionManager::Session {
    std::mutex mutex;
    bool deleted = false;
    SessionEventLog log;
    PredictionMode prediction_mode = PredictionMode::combined;
    DialogState state;
    KeywordStore store;
    std::filesystem::path path;
};

SessionManager::SessionManager(std::shared_ptr<const ServiceResources> resources, ServiceConfig config)
    : resources_(std::move(resources)), config_(std::move(config)), id_rng_(std::random_device{}()) {
    if (!resources_)
        throw ValidationError("session manager needs loaded resources");
    if (!config_.log_dir.empty()) {
        std::filesystem::create_directories(config_.log_dir);
        recover_all();
    }
}

SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end())
        throw NotFound("no session '" + id + "'");
    return it->second;
}

std::string SessionManager::fresh_id() {
    for (;;) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id_rng_()));
        std::string id(buf);
        if (sessions_.count(id))
            continue;
        if (!config_.log_dir.empty() && std::filesystem::exists(config_.log_dir / (id + ".jsonl")))
            continue;
        return id;
    }
}

void SessionManager::recover_all() {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(config_.log_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        auto s = std::make_shared<Session>();
        try {
            s->log = load_jsonl(path);
            auto replayed = replay_session(s->log, *resources_, config_);
            s->state = std::move(replayed.state);
            s->store = std::move(replayed.store);
            s->prediction_mode = header_prediction_mode(s->log.header());
        } catch (const ReplayError& e) {
            throw ReplayError(path.string() + ": " + e.what(), e.index());
        }
        s->path = path;
        const auto id = s->log.header().session_id;
        if (path.stem() != id || sessions_.count(id))
            throw ReplayError(path.string() + ": session id does not match the file name", 0);
        sessions_.emplace(id, std::move(s));
        ++recovered_;
    }
}

void SessionManager::persist(const Session& s, std::size_t from_event) const {
    if (s.path.empty())
        return;
    std::ofstream out(s.path, from_event == 0 ? std::ios::trunc : std::ios::app);
    if (from_event == 0)
        out << header_to_json(s.log.header()).dump() << '\n';
    for (std::size_t i = from_event; i < s.log.size(); ++i)
        out << event_to_json(s.log.events()[i]).dump() << '\n';
    out.flush();
    if (!out)
        throw std::runtime_error("cannot write session log " + s.path.string());
}

namespace {

json article_json(const DialogState& state, const ServiceResources& res) {
    const bool teaching = state.mode == Mode::teaching;
    const std::int64_t id = state.current_article_id();
    const auto* doc = teaching ? res.train_doc(id) : res.test_doc(id);
    json a = {{"id", id},
              {"title", doc->title},
              {"body", doc->body},
              {"mode", mode_name(state.mode)},
              {"index", teaching ? state.teaching_index : state.test_index},
              {"count", teaching ? state.teaching_queue.size() : state.test_queue.size()}};
    if (teaching)
        a["category"] = class_name(doc->label);
    return a;
}

json summary(const DialogState& state, const KeywordStore& store, const ServiceResources& res) {
    return {{"mode", mode_name(state.mode)},
            {"context", context_name(state.context)},
            {"article", article_json(state, res)},
            {"keyword_totals", keyword_totals(store)}};
}

}  // namespace

json SessionManager::create_session(const SessionOptions& options) {
    const auto& res = *resources_;
    const PredictionMode mode = options.prediction_mode.value_or(config_.prediction_mode);
    check_prediction_mode(mode, res);

    auto s = std::make_shared<Session>();
    std::unique_lock lock(sessions_mutex_);
    const std::uint64_t seed = options.seed.value_or(id_rng_() >> 11);
    SessionHeader h;
    h.session_id = fresh_id();
    h.source = "service";
    h.seed = seed;
    h.created_at = utc_timestamp();
    h.teaching_articles = balanced_article_ids(res.corpus().train, config_.teaching_per_class, seed);
    h.test_articles = balanced_article_ids(res.corpus().test, config_.test_per_class, seed);
    h.config = {{"prediction_mode", mode_name(mode)},
                {"tau", config_.interactive.tau.value()},
                {"keyword_alpha", config_.interactive.keyword_alpha},
                {"untaught_classes", untaught_name(config_.interactive.untaught_classes)},
                {"uniform_keyword_priors", config_.interactive.uniform_keyword_priors}};

    const Engine engine(res, config_, mode);
    const auto turn = engine.start(h, s->store);
    s->state = turn.state;
    s->prediction_mode = mode;
    s->log = SessionEventLog(h);
    if (!config_.log_dir.empty())
        s->path = config_.log_dir / (h.session_id + ".jsonl");
    persist(*s, 0);
    sessions_.emplace(h.session_id, s);

    json test_articles = json::array();
    for (const auto id : h.test_articles)
        test_articles.push_back({{"id", id}, {"title", res.test_doc(id)->title}});
    json out = summary(s->state, s->store, res);
    out["session_id"] = h.session_id;
    out["seed"] = seed;
    out["prediction_mode"] = mode_name(mode);
    out["reply"] = turn.reply;
    out["teaching_articles"] = h.teaching_articles;
    out["test_articles"] = std::move(test_articles);
    return out;
}

namespace {

// Runs `run` against the session under its lock and commits the outcome.
template <typename Fn>
json mutate(const std::shared_ptr<SessionManager::Session>& s, const std::function<void(std::size_t)>& persist_from,
            const ServiceResources& res, Fn&& run) {
    Outcome outcome = run();
    const std::uint64_t request = s->log.request_count();
    std::vector<SessionEvent> events;
    for (auto& p : outcome.events) {
        SessionEvent e;
        e.seq = s->log.size() + events.size();
        e.ts = utc_timestamp();
        e.kind = p.kind;
        e.request = request;
        e.payload = std::move(p.payload);
        events.push_back(std::move(e));
    }
    check_invariants(outcome.state);
    const std::size_t from = s->log.size();
    for (auto& e : events)
        s->log.push(std::move(e));
    s->state = std::move(outcome.state);
    s->store = std::move(outcome.store);
    persist_from(from);
    json out = std::move(outcome.response);
    const json state = summary(s->state, s->store, res);
    for (const auto& [key, value] : state.items())
        out[key] = value;
    out["events"] = s->log.size() - from;
    return out;
}

}  // namespace

#define TEACHABLE_LOCKED(id)                     \
    auto s = find(id);                           \
    std::lock_guard session_lock(s->mutex);      \
    if (s->deleted)                              \
        throw NotFound("no session '" + id + "'")

json SessionManager::article(const std::string& session_id) const {
    TEACHABLE_LOCKED(session_id);
    return summary(s->state, s->store, *resources_);
}

json SessionManager::post_utterance(const std::string& session_id, std::string_view text) {
    TEACHABLE_LOCKED(session_id);
    const Engine engine(*resources_, config_, s->prediction_mode);
    return mutate(s, [&](std::size_t from) { persist(*s, from); }, *resources_,
                  [&] { return engine.utterance(s->state, s->store, text); });
}

json SessionManager::post_highlight(const std::string& session_id, std::string_view word, std::int64_t article_id) {
    TEACHABLE_LOCKED(session_id);
    const Engine engine(*resources_, config_, s->prediction_mode);
    return mutate(s, [&](std::size_t from) { persist(*s, from); }, *resources_,
                  [&] { return engine.highlight_word(s->state, s->store, word, article_id); });
}

json SessionManager::post_mode(const std::string& session_id, std::string_view mode) {
    Mode target;
    try {
        target = parse_mode(mode);
    } catch (const std::exception&) {
        throw ValidationError("unknown mode '" + std::string(mode) + "' (expected teaching or testing)");
    }
    TEACHABLE_LOCKED(session_id);
    const Engine engine(*resources_, config_, s->prediction_mode);
    return mutate(s, [&](std::size_t from) { persist(*s, from); }, *resources_,
                  [&] { return engine.switch_mode(s->state, s->store, target); });
}

json SessionManager::post_classify(const std::string& session_id, std::int64_t article_id) {
    TEACHABLE_LOCKED(session_id);
    const Engine engine(*resources_, config_, s->prediction_mode);
    return mutate(s, [&](std::size_t from) { persist(*s, from); }, *resources_,
                  [&] { return engine.classify(s->state, s->store, article_id); });
}

json SessionManager::metrics(const std::string& session_id, std::optional<std::size_t> sample_n) const {
    const std::size_t n = sample_n.value_or(config_.default_sample_n);
    if (n < 4)
        throw ValidationError("sample_n must be at least 4");
    TEACHABLE_LOCKED(session_id);
    const auto& test = resources_->corpus().test;
    std::vector<std::size_t> order(test.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::mt19937_64 rng(s->log.header().seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(std::min(n, order.size()));
    std::sort(order.begin(), order.end());
    std::vector<LabeledDocument> sample;
    sample.reserve(order.size());
    for (const auto i : order)
        sample.push_back(test[i]);
    const EvalSetup setup{s->prediction_mode, &resources_->embeddings(), config_.interactive, resources_->base()};
    return {{"sample_n", sample.size()},
            {"prediction_mode", mode_name(s->prediction_mode)},
            {"keyword_totals", keyword_totals(s->store)},
            {"keywords", s->store.records().size()},
            {"metrics", metrics_to_json(evaluate(s->store, sample, setup))}};
}

std::string SessionManager::export_log(const std::string& session_id) const {
    TEACHABLE_LOCKED(session_id);
    return to_jsonl(s->log);
}

void SessionManager::delete_session(const std::string& session_id) {
    std::shared_ptr<Session> s;
    {
        std::unique_lock lock(sessions_mutex_);
        const auto it = sessions_.find(session_id);
        if (it == sessions_.end())
            throw NotFound("no session '" + session_id + "'");
        s = it->second;
        sessions_.erase(it);
    }
    std::lock_guard session_lock(s->mutex);
    s->deleted = true;
    if (!s->path.empty()) {
        std::error_code ec;
        std::filesystem::remove(s->path, ec);
    }
}

std::vector<std::string> SessionManager::session_ids() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_)
        out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

SessionEventLog SessionManager::log(const std::string& session_id) const {
    TEACHABLE_LOCKED(session_id);
    return s->log;
}

KeywordStore SessionManager::store(const std::string& session_id) const {
    TEACHABLE_LOCKED(session_id);
    return s->store;
}

DialogState SessionManager::dialog_state(const std::string& session_id) const {
    TEACHABLE_LOCKED(session_id);
    return s->state;
}

#undef TEACHABLE_LOCKED

}  // namespace teachable
