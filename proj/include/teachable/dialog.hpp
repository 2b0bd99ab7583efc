#pragma once

#include "teachable/class_label.hpp"
#include "teachable/interactive.hpp"
#include "teachable/text_pipeline.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

namespace teachable {

enum class Mode { teaching, testing };

enum class HeuristicContext { externally_relevant, internally_relevant, internally_irrelevant, neutral };

enum class Intent {
    teach_words,
    switch_to_testing,
    switch_to_teaching,
    request_repeat,
    request_rephrase,
    next_article,
    classify_current,
    affirm,
    deny,
    unknown,
};

inline constexpr std::array kAllIntents = {
    Intent::teach_words,      Intent::switch_to_testing, Intent::switch_to_teaching, Intent::request_repeat,
    Intent::request_rephrase, Intent::next_article,      Intent::classify_current,   Intent::affirm,
    Intent::deny,             Intent::unknown,
};

std::string_view mode_name(Mode mode) noexcept;
Mode parse_mode(std::string_view text);
std::string_view context_name(HeuristicContext context) noexcept;
HeuristicContext parse_context(std::string_view text);
std::string_view intent_name(Intent intent) noexcept;
Intent parse_intent_name(std::string_view text);

/// Guidance prompt for a context with the category substituted. Throws
/// ValidationError for the neutral context.
std::string heuristic_prompt(HeuristicContext context, ClassLabel category);

/// Polarity and origin a capture gets in a context.
KeywordPolarity context_polarity(HeuristicContext context) noexcept;
KeywordOrigin context_origin(HeuristicContext context) noexcept;

/// Context that follows `context` after a capture (IR -> II -> ER -> IR).
HeuristicContext next_context(HeuristicContext context) noexcept;

struct IntentRule {
    Intent intent = Intent::unknown;
    std::string pattern;  // lowercase, `*` matches any run of characters
};

/// Ordered rule list; the first match wins.
struct IntentRules {
    int version = 1;
    std::vector<IntentRule> rules;
};

/// File format: first non-comment line `version<TAB>1`, then
/// `INTENT<TAB>pattern` per line. `#` starts a comment line.
IntentRules load_intent_rules(const std::filesystem::path& path);
IntentRules parse_intent_rules(std::string_view text);

/// Case-insensitive glob match. Returns the text captured by each `*`.
std::optional<std::vector<std::string>> glob_match(std::string_view pattern, std::string_view text);

/// Lowercased, whitespace collapsed, trailing . ! ? stripped.
std::string normalize_utterance(std::string_view utterance);

/// What entering a node does besides replying.
enum class NodeAction { none, capture, switch_testing, switch_teaching, next_article, classify };

std::string_view action_name(NodeAction action) noexcept;
NodeAction parse_action(std::string_view text);

struct TreeNode {
    std::string id;
    Mode mode = Mode::teaching;
    NodeAction action = NodeAction::none;
    std::string prompt;  // template with {category} {question} {words} {title} {predicted} {rephrased}
    std::map<Intent, std::string> edges;
};

/// Prompt templates, actions and intent edges. Validated on construction:
/// every node has an edge for every intent and every target exists, every
/// node is reachable from the root, actions agree with node modes, edges only
/// cross modes into switch nodes, and the fallback chain exists for both modes.
class ConversationTree {
public:
    ConversationTree(std::string root, std::map<std::string, TreeNode> nodes, std::map<HeuristicContext, std::string> rephrasings);

    const std::string& root() const noexcept { return root_; }
    const TreeNode& node(std::string_view id) const;
    const std::map<std::string, TreeNode>& nodes() const noexcept { return nodes_; }
    const std::string& rephrasing(HeuristicContext context) const;

private:
    std::string root_;
    std::map<std::string, TreeNode> nodes_;
    std::map<HeuristicContext, std::string> rephrasings_;
};

ConversationTree load_conversation_tree(const std::filesystem::path& path);
ConversationTree conversation_tree_from_json(const nlohmann::json& doc);

/// Node ids the engine relies on, per mode prefix ("teach." / "test.").
std::string fallback_node(Mode mode, int round);

enum class Speaker { teacher, agent };

struct HistoryEntry {
    Speaker speaker = Speaker::agent;
    std::string text;
    std::string node;  // tree node that produced an agent line
    bool operator==(const HistoryEntry&) const = default;
};

struct DialogState {
    Mode mode = Mode::teaching;
    HeuristicContext context = HeuristicContext::internally_relevant;
    HeuristicContext resume_context = HeuristicContext::internally_relevant;  // restored when teaching resumes
    std::vector<std::int64_t> teaching_queue;
    std::vector<std::int64_t> test_queue;
    std::size_t teaching_index = 0;
    std::size_t test_index = 0;
    std::string tree_position;
    std::vector<HistoryEntry> history;
    std::size_t cursor = 0;  // index into history; equals history.size() unless repeating
    int fallback_round = 0;

    std::int64_t current_article_id() const;
    bool operator==(const DialogState&) const = default;
};

/// Throws std::logic_error describing the first violated invariant.
void check_invariants(const DialogState& state);

struct KeywordCaptured {
    KeywordRecord record;  // sequence number assigned when applied to a store
    std::string raw;
    bool operator==(const KeywordCaptured&) const = default;
};
struct ModeSwitched {
    Mode mode = Mode::teaching;
    bool operator==(const ModeSwitched&) const = default;
};
struct ClassifyRequested {
    std::int64_t article_id = 0;
    bool operator==(const ClassifyRequested&) const = default;
};
struct ArticleAdvanced {
    Mode mode = Mode::teaching;
    std::int64_t article_id = 0;  // the new current article
    bool operator==(const ArticleAdvanced&) const = default;
};

using DialogEffect = std::variant<KeywordCaptured, ModeSwitched, ClassifyRequested, ArticleAdvanced>;

std::string describe_effect(const DialogEffect& effect);

/// Everything the engine needs from outside: article metadata, an optional
/// classifier for replies, and the lexicon that separates words from noise.
struct DialogEnvironment {
    const PipelineConfig* pipeline = nullptr;
    std::function<ClassLabel(std::int64_t)> category;
    std::function<std::string(std::int64_t)> title;
    std::function<std::optional<ClassLabel>(std::int64_t)> classify;
    /// Lemmas the agent recognizes; empty means every lemma is accepted.
    const std::unordered_set<std::string>* lexicon = nullptr;
};

struct ParsedIntent {
    Intent intent = Intent::unknown;
    std::vector<std::string> words;  // teach_words only: candidate words, stopwords removed
};

/// First matching rule decides. A teach_words match keeps the words the
/// lexicon knows; if none survive the utterance is unknown.
ParsedIntent parse_intent(std::string_view utterance, const DialogState& state, const IntentRules& rules,
                          const PipelineConfig& pipeline, const std::unordered_set<std::string>* lexicon = nullptr);

struct DialogTurn {
    DialogState state;
    std::string reply;
    Intent intent = Intent::unknown;
    std::vector<DialogEffect> effects;
};

/// Initial state and greeting.
DialogTurn start_dialog(std::vector<std::int64_t> teaching_queue, std::vector<std::int64_t> test_queue,
                        const ConversationTree& tree, const DialogEnvironment& env);

DialogTurn advance(const DialogState& state, std::string_view utterance, const ConversationTree& tree,
                   const IntentRules& rules, const DialogEnvironment& env);

/// Reply for an unrecognized utterance: paraphrase request, then the question
/// again, then skip to the next article.
DialogTurn fallback(const DialogState& state, const ConversationTree& tree, const DialogEnvironment& env);

/// Highlight channel: KeywordCaptured effects (relevant, highlight origin) for
/// the current article's category. Throws Conflict outside teaching mode and
/// ValidationError when the word has no content lemma.
DialogTurn highlight(const DialogState& state, std::string_view word, const DialogEnvironment& env);

/// Direct mode change (UI toggle). Switching to the current mode changes
/// nothing and emits no effect.
DialogTurn set_mode(const DialogState& state, Mode mode, const ConversationTree& tree, const DialogEnvironment& env);

/// Bundled data files.
IntentRules bundled_intent_rules(const std::filesystem::path& data_dir);
ConversationTree bundled_conversation_tree(const std::filesystem::path& data_dir);

}  // namespace teachable
