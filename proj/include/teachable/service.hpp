#pragma once

#include "teachable/bayes.hpp"
#include "teachable/corpus.hpp"
#include "teachable/dialog.hpp"
#include "teachable/embeddings.hpp"
#include "teachable/evaluation.hpp"
#include "teachable/event_log.hpp"
#include "teachable/interactive.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace teachable {

/// Read-only data shared by every session.
class ServiceResources {
public:
    /// `corpus` is preprocessed here. With `base_variant` set, a baseline model
    /// is fitted on the training split for combined and baseline prediction.
    ServiceResources(PipelineConfig pipeline, CorpusSplit corpus, EmbeddingStore embeddings, ConversationTree tree,
                     IntentRules rules, std::optional<NBVariant> base_variant = NBVariant::multinomial,
                     NBOptions nb_options = {});

    const PipelineConfig& pipeline() const noexcept { return pipeline_; }
    const CorpusSplit& corpus() const noexcept { return corpus_; }
    const EmbeddingStore& embeddings() const noexcept { return embeddings_; }
    const ConversationTree& tree() const noexcept { return tree_; }
    const IntentRules& rules() const noexcept { return rules_; }
    const NaiveBayesModel* base() const noexcept { return base_ ? &*base_ : nullptr; }

    /// Corpus vocabulary plus the lemmatized embedding words.
    const std::unordered_set<std::string>& lexicon() const noexcept { return lexicon_; }

    /// Lookup by document id; nullptr when absent.
    const LabeledDocument* train_doc(std::int64_t id) const;
    const LabeledDocument* test_doc(std::int64_t id) const;

private:
    PipelineConfig pipeline_;
    CorpusSplit corpus_;
    EmbeddingStore embeddings_;
    ConversationTree tree_;
    IntentRules rules_;
    std::optional<NaiveBayesModel> base_;
    std::unordered_set<std::string> lexicon_;
    std::unordered_map<std::int64_t, std::size_t> train_index_;
    std::unordered_map<std::int64_t, std::size_t> test_index_;
};

struct ServiceConfig {
    /// Session logs go to `<log_dir>/<session_id>.jsonl`; empty keeps them in memory.
    std::filesystem::path log_dir;
    PredictionMode prediction_mode = PredictionMode::combined;
    InteractiveConfig interactive;
    std::size_t teaching_per_class = 5;
    std::size_t test_per_class = 5;
    std::size_t default_sample_n = 200;
};

struct SessionOptions {
    std::optional<std::uint64_t> seed;
    std::optional<PredictionMode> prediction_mode;
};

SessionOptions session_options_from_json(const nlohmann::json& body);

/// Sessions in memory with write-through logs. Requests on one session are
/// serialized; different sessions proceed in parallel. Every mutating call
/// appends its events as one request group, or nothing when it throws.
///
/// Errors: NotFound (unknown session or article), Conflict (wrong mode or
/// article), ValidationError (bad arguments).
class SessionManager {
public:
    /// Replays every log found in `config.log_dir`.
    SessionManager(std::shared_ptr<const ServiceResources> resources, ServiceConfig config = {});
    ~SessionManager();

    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    nlohmann::json create_session(const SessionOptions& options = {});
    nlohmann::json article(const std::string& session_id) const;
    nlohmann::json post_utterance(const std::string& session_id, std::string_view text);
    nlohmann::json post_highlight(const std::string& session_id, std::string_view word, std::int64_t article_id);
    nlohmann::json post_mode(const std::string& session_id, std::string_view mode);
    nlohmann::json post_classify(const std::string& session_id, std::int64_t article_id);
    nlohmann::json metrics(const std::string& session_id, std::optional<std::size_t> sample_n = std::nullopt) const;
    std::string export_log(const std::string& session_id) const;
    void delete_session(const std::string& session_id);

    std::vector<std::string> session_ids() const;
    std::size_t recovered_sessions() const noexcept { return recovered_; }

    // Snapshots for inspection.
    SessionEventLog log(const std::string& session_id) const;
    KeywordStore store(const std::string& session_id) const;
    DialogState dialog_state(const std::string& session_id) const;

    const ServiceResources& resources() const noexcept { return *resources_; }
    const ServiceConfig& config() const noexcept { return config_; }

    struct Session;

private:
    std::shared_ptr<Session> find(const std::string& session_id) const;
    std::string fresh_id();
    void recover_all();
    void persist(const Session& s, std::size_t from_event) const;

    std::shared_ptr<const ServiceResources> resources_;
    ServiceConfig config_;
    mutable std::shared_mutex sessions_mutex_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
    std::mt19937_64 id_rng_;
    std::size_t recovered_ = 0;
};

/// Rebuilds a session's final dialog state and store by re-executing the
/// requests recorded in `log` and checks that they produce the same events.
/// Throws ReplayError at the first divergence.
struct ReplayedSession {
    DialogState state;
    KeywordStore store;
};
ReplayedSession replay_session(const SessionEventLog& log, const ServiceResources& resources,
                               const ServiceConfig& config);

}  // namespace teachable
