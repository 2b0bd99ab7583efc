#include "teachable/transcript.hpp"

#include "teachable/errors.hpp"

#include <fstream>
#include <optional>
#include <sstream>

namespace teachable {

namespace {

std::vector<std::int64_t> parse_ids(std::string_view rest, std::size_t lineno) {
    std::vector<std::int64_t> ids;
    std::istringstream in{std::string(rest)};
    std::string word;
    while (in >> word) {
        try {
            std::size_t used = 0;
            ids.push_back(std::stoll(word, &used));
            if (used != word.size())
                throw std::invalid_argument(word);
        } catch (const std::exception&) {
            throw ParseError("bad article id '" + word + "'", lineno);
        }
    }
    if (ids.empty())
        throw ParseError("empty article queue", lineno);
    return ids;
}

void emit(std::string& out, const DialogTurn& turn) {
    if (!turn.reply.empty())
        out += "< " + turn.reply + "\n";
    for (const auto& e : turn.effects)
        out += "= " + describe_effect(e) + "\n";
}

}  // namespace

std::string run_transcript(std::string_view script, const ConversationTree& tree, const IntentRules& rules,
                           const DialogEnvironment& env) {
    std::string out;
    std::optional<std::vector<std::int64_t>> teaching, testing;
    std::optional<DialogState> state;
    std::istringstream in{std::string(script)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.starts_with("<") || line.starts_with("="))
            continue;
        out += line + "\n";
        if (line.empty() || line.starts_with("#"))
            continue;
        if (line.starts_with("teaching ") || line.starts_with("testing ")) {
            if (state)
                throw ParseError("article queues must come before the conversation", lineno);
            (line.starts_with("teaching ") ? teaching : testing) = parse_ids(line.substr(line.find(' ')), lineno);
            if (teaching && testing) {
                auto turn = start_dialog(*teaching, *testing, tree, env);
                emit(out, turn);
                state = std::move(turn.state);
            }
            continue;
        }
        if (!state)
            throw ParseError("conversation line before both article queues", lineno);
        DialogTurn turn;
        if (line.starts_with("> ")) {
            turn = advance(*state, line.substr(2), tree, rules, env);
        } else if (line.starts_with("! highlight ")) {
            turn = highlight(*state, line.substr(12), env);
        } else if (line.starts_with("! mode ")) {
            turn = set_mode(*state, parse_mode(line.substr(7)), tree, env);
        } else {
            throw ParseError("unrecognized transcript line", lineno);
        }
        check_invariants(turn.state);
        emit(out, turn);
        state = std::move(turn.state);
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace teachable
