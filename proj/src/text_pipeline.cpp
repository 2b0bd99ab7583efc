#include "teachable/text_pipeline.hpp"

#include "teachable/errors.hpp"
#include "utf8.hpp"

#include <algorithm>
#include <fstream>

namespace teachable {

namespace {

bool is_word_char(char32_t cp) { return !utf8::is_space(cp) && !utf8::is_punct(cp); }

bool is_joiner(char32_t cp) { return cp == U'-' || cp == U'\'' || cp == 0x2019; }

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_vowel(std::string_view s) {
    return s.find_first_of("aeiouy") != std::string_view::npos;
}

std::string trim_line(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
    return line;
}

// One dictionary/rule step without the fixed-point iteration.
std::string lemmatize_once(std::string_view token, PosTag pos, const PipelineConfig& config) {
    if (pos == PosTag::other)
        pos = PosTag::noun;
    if (const std::string* hit = config.dictionary_lemma(token, pos))
        return *hit;
    for (const SuffixRule& rule : config.suffix_rules()) {
        if (rule.pos != pos || !ends_with(token, rule.suffix))
            continue;
        if (rule.replacement == rule.suffix)
            return std::string(token);
        const std::string_view stem = token.substr(0, token.size() - rule.suffix.size());
        const std::size_t min_stem = rule.replacement.empty() ? 3 : 2;
        if (stem.size() < min_stem || !has_vowel(stem))
            continue;
        std::string candidate = std::string(stem) + rule.replacement;
        const char last = candidate.back();
        if (last == '-' || last == '\'')
            continue;
        return candidate;
    }
    return std::string(token);
}

}  // namespace

PipelineConfig::PipelineConfig(std::unordered_set<std::string> stopwords,
                               std::unordered_map<std::string, std::vector<std::pair<PosTag, std::string>>> lemma_dictionary,
                               std::vector<SuffixRule> suffix_rules)
    : stopwords_(std::move(stopwords)), dictionary_(std::move(lemma_dictionary)), suffix_rules_(std::move(suffix_rules)) {
    for (const auto& word : stopwords_) {
        if (word.empty() || to_lower(word) != word || word.find_first_of(" \t\r\n") != std::string::npos)
            throw ValidationError("stopword must be lowercase without whitespace: '" + word + "'");
    }
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& data_dir) {
    return PipelineConfig(load_stopwords(data_dir / "stopwords.txt"), load_lemma_dictionary(data_dir / "lemmas.tsv"),
                          default_suffix_rules());
}

bool PipelineConfig::is_stopword(std::string_view word) const {
    return stopwords_.count(std::string(word)) != 0;
}

const std::string* PipelineConfig::dictionary_lemma(std::string_view surface, PosTag pos) const {
    auto it = dictionary_.find(std::string(surface));
    if (it == dictionary_.end())
        return nullptr;
    for (const auto& [entry_pos, lemma] : it->second) {
        if (entry_pos == pos)
            return &lemma;
    }
    return nullptr;
}

const PosTag* PipelineConfig::dictionary_pos(std::string_view surface) const {
    auto it = dictionary_.find(std::string(surface));
    if (it == dictionary_.end() || it->second.empty())
        return nullptr;
    return &it->second.front().first;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open stopword file " + path.string());
    std::unordered_set<std::string> words;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_line(std::move(line));
        if (line.empty() || line.front() == '#')
            continue;
        if (line.find_first_of(" \t") != std::string::npos || to_lower(line) != line)
            throw ParseError("stopword must be one lowercase word", line_no);
        words.insert(line);
    }
    return words;
}

std::unordered_map<std::string, std::vector<std::pair<PosTag, std::string>>> load_lemma_dictionary(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open lemma dictionary " + path.string());
    std::unordered_map<std::string, std::vector<std::pair<PosTag, std::string>>> dictionary;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_line(std::move(line));
        if (line.empty() || line.front() == '#')
            continue;
        const auto first = line.find('\t');
        const auto second = first == std::string::npos ? first : line.find('\t', first + 1);
        if (second == std::string::npos || line.find('\t', second + 1) != std::string::npos)
            throw ParseError("expected surface<TAB>pos<TAB>lemma", line_no);
        const std::string surface = line.substr(0, first);
        const std::string pos_text = line.substr(first + 1, second - first - 1);
        const std::string lemma = line.substr(second + 1);
        if (surface.empty() || lemma.empty())
            throw ParseError("empty surface or lemma", line_no);
        PosTag pos;
        try {
            pos = parse_pos(pos_text);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line_no);
        }
        dictionary[to_lower(surface)].emplace_back(pos, to_lower(lemma));
    }
    return dictionary;
}

std::vector<SuffixRule> default_suffix_rules() {
    using P = PosTag;
    return {
        {P::noun, "'s", ""},     {P::noun, "sses", "ss"}, {P::noun, "ies", "y"},   {P::noun, "ches", "ch"},
        {P::noun, "shes", "sh"}, {P::noun, "xes", "x"},   {P::noun, "zzes", "zz"}, {P::noun, "ss", "ss"},
        {P::noun, "us", "us"},   {P::noun, "is", "is"},   {P::noun, "s", ""},

        {P::verb, "ied", "y"},   {P::verb, "eed", "eed"}, {P::verb, "ed", ""},     {P::verb, "ing", ""},
        {P::verb, "ies", "y"},   {P::verb, "sses", "ss"}, {P::verb, "ches", "ch"}, {P::verb, "shes", "sh"},
        {P::verb, "xes", "x"},   {P::verb, "ss", "ss"},   {P::verb, "s", ""},

        {P::adj, "iest", "y"},   {P::adj, "ier", "y"},    {P::adj, "est", ""},     {P::adj, "er", ""},
    };
}

PosTag parse_pos(std::string_view text) {
    if (text == "noun" || text == "n")
        return PosTag::noun;
    if (text == "verb" || text == "v")
        return PosTag::verb;
    if (text == "adj" || text == "a")
        return PosTag::adj;
    if (text == "adv" || text == "r")
        return PosTag::adv;
    if (text == "other")
        return PosTag::other;
    throw ValidationError("unknown part of speech '" + std::string(text) + "'");
}

std::string_view pos_name(PosTag pos) noexcept {
    switch (pos) {
    case PosTag::noun: return "noun";
    case PosTag::verb: return "verb";
    case PosTag::adj: return "adj";
    case PosTag::adv: return "adv";
    case PosTag::other: return "other";
    }
    return "other";
}

std::vector<std::string> tokenize(std::string_view text) {
    // Decode once so joiners can look one code point ahead.
    std::vector<std::pair<char32_t, std::string_view>> cps;
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t start = pos;
        const char32_t cp = utf8::next(text, pos);
        cps.emplace_back(cp, text.substr(start, pos - start));
    }

    std::vector<std::string> tokens;
    std::string word;
    const auto flush = [&] {
        if (!word.empty())
            tokens.push_back(std::move(word));
        word.clear();
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const auto [cp, bytes] = cps[i];
        if (utf8::is_space(cp)) {
            flush();
        } else if (is_word_char(cp)) {
            word.append(bytes);
        } else if (is_joiner(cp) && !word.empty() && i + 1 < cps.size() && is_word_char(cps[i + 1].first)) {
            word.append(bytes);
        } else {
            flush();
            tokens.emplace_back(bytes);
        }
    }
    flush();
    return tokens;
}

std::string to_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t start = pos;
        const char32_t cp = utf8::next(text, pos);
        const char32_t lower = utf8::to_lower(cp);
        if (lower == cp)
            out.append(text.substr(start, pos - start));  // keeps invalid bytes verbatim
        else
            utf8::append(out, lower);
    }
    return out;
}

std::vector<std::string> normalize(std::vector<std::string> tokens) {
    for (auto& token : tokens)
        token = to_lower(token);
    return tokens;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const PipelineConfig& config) {
    std::erase_if(tokens, [&](const std::string& t) { return config.is_stopword(t); });
    return tokens;
}

bool has_alnum(std::string_view token) {
    for (std::size_t pos = 0; pos < token.size();) {
        const char32_t cp = utf8::next(token, pos);
        if (is_word_char(cp))
            return true;
    }
    return false;
}

PosTag tag_pos(std::string_view token, const PipelineConfig& config) {
    if (const PosTag* pos = config.dictionary_pos(token))
        return *pos;
    const std::size_t n = token.size();
    if (n >= 5 && ends_with(token, "ly"))
        return PosTag::adv;
    if (n >= 6 && ends_with(token, "ing"))
        return PosTag::verb;
    if (n >= 5 && ends_with(token, "ed"))
        return PosTag::verb;
    if (n >= 6) {
        for (std::string_view suffix : {"ous", "ful", "ive", "able", "ible", "less", "ical", "ish"}) {
            if (ends_with(token, suffix))
                return PosTag::adj;
        }
    }
    return PosTag::noun;
}

std::string lemmatize(std::string_view token, PosTag pos, const PipelineConfig& config) {
    std::string lemma = lemmatize_once(token, pos, config);
    // Each step either shortens the word or comes from the dictionary; the
    // bound only matters for cyclic dictionary entries.
    for (int step = 0; step < 8; ++step) {
        std::string next = lemmatize_once(lemma, tag_pos(lemma, config), config);
        if (next == lemma)
            break;
        lemma = std::move(next);
    }
    return lemma;
}

std::string lemmatize(std::string_view token, const PipelineConfig& config) {
    return lemmatize(token, tag_pos(token, config), config);
}

std::vector<Token> analyze(std::string_view text, const PipelineConfig& config) {
    std::vector<Token> out;
    for (const std::string& surface : tokenize(text)) {
        if (!has_alnum(surface))
            continue;
        std::string lower = to_lower(surface);
        if (config.is_stopword(lower))
            continue;
        Token token;
        token.pos = tag_pos(lower, config);
        token.lemma = lemmatize(lower, token.pos, config);
        if (token.lemma.empty() || config.is_stopword(token.lemma))
            continue;
        token.surface = surface;
        out.push_back(std::move(token));
    }
    return out;
}

LemmaBag preprocess(std::string_view text, const PipelineConfig& config) {
    LemmaBag bag;
    for (Token& token : analyze(text, config))
        ++bag[std::move(token.lemma)];
    return bag;
}

std::string join_lemmas(const LemmaBag& bag) {
    std::string out;
    for (const auto& [lemma, count] : bag) {
        for (std::uint32_t i = 0; i < count; ++i) {
            if (!out.empty())
                out.push_back(' ');
            out += lemma;
        }
    }
    return out;
}

}  // namespace teachable
