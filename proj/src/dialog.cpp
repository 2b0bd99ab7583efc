#include "teachable/dialog.hpp"

#include "teachable/errors.hpp"
#include "utf8.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace teachable {

namespace {

constexpr std::string_view kTreeFormat = "teachable-dialog-tree";
constexpr std::string_view kTestingQuestion = "Shall I classify it?";

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
    return text;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// "a", "a and b", "a, b and c"
std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0)
            out += i + 1 == words.size() ? " and " : ", ";
        out += words[i];
    }
    return out;
}

bool glob_rec(std::string_view p, std::string_view t, std::vector<std::string>& caps) {
    if (p.empty())
        return t.empty();
    if (p.front() == '*') {
        for (std::size_t n = 0; n <= t.size(); ++n) {
            caps.emplace_back(t.substr(0, n));
            if (glob_rec(p.substr(1), t.substr(n), caps))
                return true;
            caps.pop_back();
        }
        return false;
    }
    return !t.empty() && p.front() == t.front() && glob_rec(p.substr(1), t.substr(1), caps);
}

}  // namespace

std::string_view mode_name(Mode mode) noexcept { return mode == Mode::teaching ? "teaching" : "testing"; }

Mode parse_mode(std::string_view text) {
    if (text == "teaching")
        return Mode::teaching;
    if (text == "testing")
        return Mode::testing;
    throw ValidationError("unknown mode '" + std::string(text) + "'");
}

std::string_view context_name(HeuristicContext c) noexcept {
    switch (c) {
    case HeuristicContext::externally_relevant: return "externally_relevant";
    case HeuristicContext::internally_relevant: return "internally_relevant";
    case HeuristicContext::internally_irrelevant: return "internally_irrelevant";
    case HeuristicContext::neutral: return "neutral";
    }
    return "neutral";
}

HeuristicContext parse_context(std::string_view text) {
    for (auto c : {HeuristicContext::externally_relevant, HeuristicContext::internally_relevant,
                   HeuristicContext::internally_irrelevant, HeuristicContext::neutral}) {
        if (context_name(c) == text)
            return c;
    }
    throw ValidationError("unknown heuristic context '" + std::string(text) + "'");
}

std::string_view intent_name(Intent intent) noexcept {
    switch (intent) {
    case Intent::teach_words: return "teach_words";
    case Intent::switch_to_testing: return "switch_to_testing";
    case Intent::switch_to_teaching: return "switch_to_teaching";
    case Intent::request_repeat: return "request_repeat";
    case Intent::request_rephrase: return "request_rephrase";
    case Intent::next_article: return "next_article";
    case Intent::classify_current: return "classify_current";
    case Intent::affirm: return "affirm";
    case Intent::deny: return "deny";
    case Intent::unknown: return "unknown";
    }
    return "unknown";
}

Intent parse_intent_name(std::string_view text) {
    for (Intent i : kAllIntents) {
        if (intent_name(i) == text)
            return i;
    }
    throw ValidationError("unknown intent '" + std::string(text) + "'");
}

std::string_view action_name(NodeAction a) noexcept {
    switch (a) {
    case NodeAction::none: return "none";
    case NodeAction::capture: return "capture";
    case NodeAction::switch_testing: return "switch_testing";
    case NodeAction::switch_teaching: return "switch_teaching";
    case NodeAction::next_article: return "next_article";
    case NodeAction::classify: return "classify";
    }
    return "none";
}

NodeAction parse_action(std::string_view text) {
    for (auto a : {NodeAction::none, NodeAction::capture, NodeAction::switch_testing, NodeAction::switch_teaching,
                   NodeAction::next_article, NodeAction::classify}) {
        if (action_name(a) == text)
            return a;
    }
    throw ValidationError("unknown node action '" + std::string(text) + "'");
}

std::string heuristic_prompt(HeuristicContext context, ClassLabel category) {
    const std::string name(class_name(category));
    switch (context) {
    case HeuristicContext::externally_relevant:
        return "Can you tell me few more words that should describe the " + name + " but are not in the text?";
    case HeuristicContext::internally_relevant:
        return "I wonder which words are most relevant while categorizing this text to the " + name + "?";
    case HeuristicContext::internally_irrelevant:
        return "Which words are least relevant while categorizing this text to the " + name + "?";
    case HeuristicContext::neutral: break;
    }
    throw ValidationError("the neutral context has no teaching prompt");
}

KeywordPolarity context_polarity(HeuristicContext c) noexcept {
    return c == HeuristicContext::internally_irrelevant ? KeywordPolarity::irrelevant : KeywordPolarity::relevant;
}

KeywordOrigin context_origin(HeuristicContext c) noexcept {
    return c == HeuristicContext::externally_relevant ? KeywordOrigin::external : KeywordOrigin::internal_text;
}

HeuristicContext next_context(HeuristicContext c) noexcept {
    switch (c) {
    case HeuristicContext::internally_relevant: return HeuristicContext::internally_irrelevant;
    case HeuristicContext::internally_irrelevant: return HeuristicContext::externally_relevant;
    case HeuristicContext::externally_relevant: return HeuristicContext::internally_relevant;
    case HeuristicContext::neutral: return HeuristicContext::neutral;
    }
    return c;
}

// ---- intent rules

IntentRules parse_intent_rules(std::string_view text) {
    IntentRules rules;
    bool have_version = false;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty() || line.front() == '#')
            continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError("expected INTENT<TAB>pattern", lineno);
        const std::string key = line.substr(0, tab);
        const std::string value = line.substr(tab + 1);
        if (!have_version) {
            if (key != "version" || value != "1")
                throw ParseError("intent rules must start with 'version<TAB>1'", lineno);
            have_version = true;
            continue;
        }
        IntentRule rule;
        try {
            rule.intent = parse_intent_name(key);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (rule.intent == Intent::unknown)
            throw ParseError("unknown is what no rule matches; it cannot have a rule", lineno);
        rule.pattern = normalize_utterance(value);
        if (rule.pattern.empty())
            throw ParseError("empty pattern", lineno);
        rules.rules.push_back(std::move(rule));
    }
    if (!have_version)
        throw ParseError("intent rules have no version line");
    return rules;
}

IntentRules load_intent_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_intent_rules(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::optional<std::vector<std::string>> glob_match(std::string_view pattern, std::string_view text) {
    const std::string p = to_lower(pattern), t = to_lower(text);
    std::vector<std::string> caps;
    if (glob_rec(p, t, caps))
        return caps;
    return std::nullopt;
}

std::string normalize_utterance(std::string_view utterance) {
    const std::string lower = to_lower(utterance);
    std::string out;
    bool pending_space = false;
    std::size_t pos = 0;
    while (pos < lower.size()) {
        const std::size_t start = pos;
        const char32_t cp = utf8::next(lower, pos);
        if (utf8::is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space)
            out += ' ';
        pending_space = false;
        out.append(lower, start, pos - start);
    }
    while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == '?' || out.back() == ' '))
        out.pop_back();
    return out;
}

ParsedIntent parse_intent(std::string_view utterance, const DialogState&, const IntentRules& rules,
                          const PipelineConfig& pipeline, const std::unordered_set<std::string>* lexicon) {
    const std::string text = normalize_utterance(utterance);
    if (text.empty())
        return {};
    for (const auto& rule : rules.rules) {
        const auto caps = glob_match(rule.pattern, text);
        if (!caps)
            continue;
        if (rule.intent != Intent::teach_words)
            return {rule.intent, {}};
        std::string captured;
        for (const auto& c : *caps)
            captured += c + " ";
        if (caps->empty())
            captured = text;
        std::vector<std::string> words;
        for (const auto& token : normalize(tokenize(captured))) {
            if (!has_alnum(token) || pipeline.is_stopword(token))
                continue;
            const auto analyzed = analyze(token, pipeline);
            const bool known = std::any_of(analyzed.begin(), analyzed.end(), [&](const Token& t) {
                return !lexicon || lexicon->empty() || lexicon->count(t.lemma);
            });
            if (known && std::find(words.begin(), words.end(), token) == words.end())
                words.push_back(token);
        }
        if (!words.empty())
            return {Intent::teach_words, std::move(words)};
    }
    return {};
}

// ---- conversation tree

std::string fallback_node(Mode mode, int round) {
    static constexpr std::string_view steps[] = {"paraphrase", "requestion", "skip"};
    const std::string prefix = mode == Mode::teaching ? "teach." : "test.";
    return prefix + std::string(steps[std::clamp(round, 0, 2)]);
}

ConversationTree::ConversationTree(std::string root, std::map<std::string, TreeNode> nodes,
                                   std::map<HeuristicContext, std::string> rephrasings)
    : root_(std::move(root)), nodes_(std::move(nodes)), rephrasings_(std::move(rephrasings)) {
    if (!nodes_.count(root_))
        throw ValidationError("root node '" + root_ + "' does not exist");
    for (auto c : {HeuristicContext::externally_relevant, HeuristicContext::internally_relevant,
                   HeuristicContext::internally_irrelevant}) {
        if (!rephrasings_.count(c))
            throw ValidationError("no rephrasing for " + std::string(context_name(c)));
    }
    for (const auto& [id, node] : nodes_) {
        if (node.id != id)
            throw ValidationError("node '" + id + "' is stored under another id");
        const bool testing = node.mode == Mode::testing;
        if ((node.action == NodeAction::capture || node.action == NodeAction::switch_teaching) && testing)
            throw ValidationError("node '" + id + "' has a teaching action in testing mode");
        if ((node.action == NodeAction::classify || node.action == NodeAction::switch_testing) && !testing)
            throw ValidationError("node '" + id + "' has a testing action in teaching mode");
        for (Intent intent : kAllIntents) {
            const auto edge = node.edges.find(intent);
            if (edge == node.edges.end())
                throw ValidationError("node '" + id + "' has no edge for " + std::string(intent_name(intent)));
            const auto target = nodes_.find(edge->second);
            if (target == nodes_.end())
                throw ValidationError("node '" + id + "' points to missing node '" + edge->second + "'");
            const auto& t = target->second;
            if (t.mode != node.mode && t.action != NodeAction::switch_testing && t.action != NodeAction::switch_teaching)
                throw ValidationError("edge " + id + " -> " + t.id + " changes mode without a switch action");
        }
    }
    if (nodes_.at(root_).mode != Mode::teaching || nodes_.at(root_).action != NodeAction::none)
        throw ValidationError("root node must be a plain teaching node");
    for (Mode mode : {Mode::teaching, Mode::testing}) {
        for (int round = 0; round < 3; ++round) {
            const auto id = fallback_node(mode, round);
            const auto it = nodes_.find(id);
            if (it == nodes_.end() || it->second.mode != mode)
                throw ValidationError("fallback node '" + id + "' is missing");
            const auto expected = round == 2 ? NodeAction::next_article : NodeAction::none;
            if (it->second.action != expected)
                throw ValidationError("fallback node '" + id + "' has the wrong action");
            if (it->second.edges.at(Intent::unknown) != fallback_node(mode, (round + 1) % 3))
                throw ValidationError("fallback node '" + id + "' breaks the fallback chain");
        }
    }
    std::set<std::string> seen{root_};
    std::deque<std::string> queue{root_};
    while (!queue.empty()) {
        const auto& node = nodes_.at(queue.front());
        queue.pop_front();
        for (const auto& [intent, target] : node.edges) {
            if (seen.insert(target).second)
                queue.push_back(target);
        }
    }
    for (const auto& [id, node] : nodes_) {
        if (!seen.count(id))
            throw ValidationError("node '" + id + "' is unreachable from the root");
    }
}

const TreeNode& ConversationTree::node(std::string_view id) const {
    const auto it = nodes_.find(std::string(id));
    if (it == nodes_.end())
        throw NotFound("no dialog node '" + std::string(id) + "'");
    return it->second;
}

const std::string& ConversationTree::rephrasing(HeuristicContext context) const {
    const auto it = rephrasings_.find(context);
    if (it == rephrasings_.end())
        throw ValidationError("no rephrasing for " + std::string(context_name(context)));
    return it->second;
}

ConversationTree conversation_tree_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object() || doc.value("format", "") != kTreeFormat || doc.value("version", 0) != 1)
            throw ParseError("not a version 1 dialog tree");
        std::map<Mode, std::map<Intent, std::string>> defaults;
        for (const auto& [mode, edges] : doc.at("defaults").items()) {
            for (const auto& [intent, target] : edges.items())
                defaults[parse_mode(mode)][parse_intent_name(intent)] = target.get<std::string>();
        }
        std::map<std::string, TreeNode> nodes;
        for (const auto& [id, n] : doc.at("nodes").items()) {
            TreeNode node;
            node.id = id;
            node.mode = parse_mode(n.at("mode").get<std::string>());
            node.prompt = n.at("prompt").get<std::string>();
            node.action = parse_action(n.value("action", "none"));
            node.edges = defaults[node.mode];
            node.edges.emplace(Intent::request_repeat, id);
            if (n.contains("edges")) {
                for (const auto& [intent, target] : n.at("edges").items())
                    node.edges[parse_intent_name(intent)] = target.get<std::string>();
            }
            nodes.emplace(id, std::move(node));
        }
        std::map<HeuristicContext, std::string> rephrasings;
        for (const auto& [context, text] : doc.at("rephrasings").items())
            rephrasings[parse_context(context)] = text.get<std::string>();
        return ConversationTree(doc.at("root").get<std::string>(), std::move(nodes), std::move(rephrasings));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed dialog tree: ") + e.what());
    }
}

ConversationTree load_conversation_tree(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return conversation_tree_from_json(doc);
}

IntentRules bundled_intent_rules(const std::filesystem::path& data_dir) {
    return load_intent_rules(data_dir / "intents.tsv");
}

ConversationTree bundled_conversation_tree(const std::filesystem::path& data_dir) {
    return load_conversation_tree(data_dir / "dialog_tree.json");
}

// ---- state

std::int64_t DialogState::current_article_id() const {
    const auto& queue = mode == Mode::teaching ? teaching_queue : test_queue;
    const auto index = mode == Mode::teaching ? teaching_index : test_index;
    if (index >= queue.size())
        throw std::logic_error("article index outside its queue");
    return queue[index];
}

void check_invariants(const DialogState& s) {
    if (s.mode == Mode::testing && s.context != HeuristicContext::neutral)
        throw std::logic_error("testing mode with a teaching context");
    if (s.mode == Mode::teaching && s.context == HeuristicContext::neutral)
        throw std::logic_error("teaching mode without a teaching context");
    if (s.resume_context == HeuristicContext::neutral)
        throw std::logic_error("neutral resume context");
    if (s.cursor > s.history.size())
        throw std::logic_error("history cursor past the end");
    if (s.fallback_round < 0 || s.fallback_round > 2)
        throw std::logic_error("fallback round out of range");
    if (s.teaching_queue.empty() || s.test_queue.empty())
        throw std::logic_error("empty article queue");
    if (s.teaching_index >= s.teaching_queue.size() || s.test_index >= s.test_queue.size())
        throw std::logic_error("article index outside its queue");
    if (s.tree_position.empty())
        throw std::logic_error("no tree position");
}

std::string describe_effect(const DialogEffect& effect) {
    return std::visit(
        [](const auto& e) -> std::string {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, KeywordCaptured>) {
                return "keyword " + e.record.lemma + " " + std::string(class_name(e.record.label)) + " " +
                       std::string(polarity_name(e.record.polarity)) + " " + std::string(origin_name(e.record.origin)) +
                       (e.raw.empty() ? "" : " raw=" + e.raw);
            } else if constexpr (std::is_same_v<T, ModeSwitched>) {
                return "mode " + std::string(mode_name(e.mode));
            } else if constexpr (std::is_same_v<T, ClassifyRequested>) {
                return "classify " + std::to_string(e.article_id);
            } else {
                return "advance " + std::string(mode_name(e.mode)) + " " + std::to_string(e.article_id);
            }
        },
        effect);
}

// ---- engine

namespace {

struct Extras {
    std::string words;
    std::string predicted;
};

std::string render(const TreeNode& node, const DialogState& s, const ConversationTree& tree,
                   const DialogEnvironment& env, const Extras& extras) {
    std::string out = node.prompt;
    const std::int64_t article = s.current_article_id();
    if (s.mode == Mode::teaching) {
        const ClassLabel category = env.category(article);
        out = replace_all(out, "{question}", heuristic_prompt(s.context, category));
        out = replace_all(out, "{rephrased}", tree.rephrasing(s.context));
        out = replace_all(out, "{category}", class_name(category));
    } else {
        out = replace_all(out, "{question}", kTestingQuestion);
    }
    if (out.find("{title}") != std::string::npos)
        out = replace_all(out, "{title}", env.title ? env.title(article) : std::to_string(article));
    out = replace_all(out, "{words}", extras.words);
    out = replace_all(out, "{predicted}", extras.predicted);
    return out;
}

// Runs the node's action on `turn.state`. Returns false when a capture found
// nothing to record.
bool perform(const TreeNode& node, DialogTurn& turn, const std::vector<std::string>& words,
             const DialogEnvironment& env, Extras& extras) {
    auto& s = turn.state;
    switch (node.action) {
    case NodeAction::none: return true;
    case NodeAction::capture: {
        const ClassLabel category = env.category(s.current_article_id());
        std::vector<std::string> lemmas;
        for (const auto& word : words) {
            for (const auto& token : analyze(word, *env.pipeline)) {
                if (std::find(lemmas.begin(), lemmas.end(), token.lemma) != lemmas.end())
                    continue;
                lemmas.push_back(token.lemma);
                turn.effects.push_back(KeywordCaptured{
                    {token.lemma, category, context_polarity(s.context), context_origin(s.context), 0}, word});
            }
        }
        if (lemmas.empty())
            return false;
        extras.words = join_words(lemmas);
        s.context = next_context(s.context);
        return true;
    }
    case NodeAction::switch_testing:
        s.resume_context = s.context;
        s.context = HeuristicContext::neutral;
        s.mode = Mode::testing;
        turn.effects.push_back(ModeSwitched{Mode::testing});
        return true;
    case NodeAction::switch_teaching:
        s.context = s.resume_context;
        s.mode = Mode::teaching;
        turn.effects.push_back(ModeSwitched{Mode::teaching});
        return true;
    case NodeAction::next_article:
        if (s.mode == Mode::teaching) {
            s.teaching_index = (s.teaching_index + 1) % s.teaching_queue.size();
            s.context = HeuristicContext::internally_relevant;
        } else {
            s.test_index = (s.test_index + 1) % s.test_queue.size();
        }
        turn.effects.push_back(ArticleAdvanced{s.mode, s.current_article_id()});
        return true;
    case NodeAction::classify: {
        const auto id = s.current_article_id();
        turn.effects.push_back(ClassifyRequested{id});
        const auto predicted = env.classify ? env.classify(id) : std::nullopt;
        extras.predicted = predicted ? std::string(class_name(*predicted)) : "something I cannot tell yet";
        return true;
    }
    }
    return true;
}

void say(DialogTurn& turn, const TreeNode& node, const ConversationTree& tree, const DialogEnvironment& env,
         const Extras& extras) {
    auto& s = turn.state;
    s.tree_position = node.id;
    turn.reply = render(node, s, tree, env, extras);
    s.history.push_back({Speaker::agent, turn.reply, node.id});
    s.cursor = s.history.size();
}

}  // namespace

DialogTurn start_dialog(std::vector<std::int64_t> teaching_queue, std::vector<std::int64_t> test_queue,
                        const ConversationTree& tree, const DialogEnvironment& env) {
    if (teaching_queue.empty() || test_queue.empty())
        throw ValidationError("a dialog needs at least one teaching and one test article");
    DialogTurn turn;
    turn.state.teaching_queue = std::move(teaching_queue);
    turn.state.test_queue = std::move(test_queue);
    say(turn, tree.node(tree.root()), tree, env, {});
    return turn;
}

DialogTurn fallback(const DialogState& state, const ConversationTree& tree, const DialogEnvironment& env) {
    DialogTurn turn{state, {}, Intent::unknown, {}};
    const auto& node = tree.node(fallback_node(state.mode, state.fallback_round));
    Extras extras;
    perform(node, turn, {}, env, extras);
    turn.state.fallback_round = (state.fallback_round + 1) % 3;
    say(turn, node, tree, env, extras);
    return turn;
}

DialogTurn advance(const DialogState& state, std::string_view utterance, const ConversationTree& tree,
                   const IntentRules& rules, const DialogEnvironment& env) {
    const auto parsed = parse_intent(utterance, state, rules, *env.pipeline, env.lexicon);

    if (parsed.intent == Intent::request_repeat) {
        DialogTurn turn{state, {}, Intent::request_repeat, {}};
        for (std::size_t i = state.history.size(); i-- > 0;) {
            if (state.history[i].speaker == Speaker::agent) {
                turn.state.cursor = i;
                turn.reply = state.history[i].text;
                break;
            }
        }
        return turn;
    }

    DialogState heard = state;
    heard.history.push_back({Speaker::teacher, std::string(utterance), {}});
    heard.cursor = heard.history.size();
    if (parsed.intent == Intent::unknown)
        return fallback(heard, tree, env);

    DialogTurn turn{heard, {}, parsed.intent, {}};
    const auto& node = tree.node(tree.node(state.tree_position).edges.at(parsed.intent));
    Extras extras;
    if (!perform(node, turn, parsed.words, env, extras))
        return fallback(heard, tree, env);
    turn.state.fallback_round = 0;
    say(turn, node, tree, env, extras);
    return turn;
}

DialogTurn highlight(const DialogState& state, std::string_view word, const DialogEnvironment& env) {
    if (state.mode != Mode::teaching)
        throw Conflict("highlights are only accepted in teaching mode");
    DialogTurn turn{state, {}, Intent::teach_words, {}};
    const ClassLabel category = env.category(state.current_article_id());
    std::vector<std::string> lemmas;
    for (const auto& token : analyze(word, *env.pipeline)) {
        if (std::find(lemmas.begin(), lemmas.end(), token.lemma) != lemmas.end())
            continue;
        lemmas.push_back(token.lemma);
        turn.effects.push_back(KeywordCaptured{
            {token.lemma, category, KeywordPolarity::relevant, KeywordOrigin::highlight, 0}, std::string(word)});
    }
    if (lemmas.empty())
        throw ValidationError("highlight '" + std::string(word) + "' has no content word");
    return turn;
}

DialogTurn set_mode(const DialogState& state, Mode mode, const ConversationTree& tree, const DialogEnvironment& env) {
    const Intent intent = mode == Mode::testing ? Intent::switch_to_testing : Intent::switch_to_teaching;
    DialogTurn turn{state, {}, intent, {}};
    if (state.mode == mode)
        return turn;
    const auto& node = tree.node(tree.node(state.tree_position).edges.at(intent));
    Extras extras;
    perform(node, turn, {}, env, extras);
    turn.state.fallback_round = 0;
    say(turn, node, tree, env, extras);
    return turn;
}

}  // namespace teachable
