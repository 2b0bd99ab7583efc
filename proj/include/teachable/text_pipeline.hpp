#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace teachable {

enum class PosTag { noun, verb, adj, adv, other };

struct Token {
    std::string surface;
    std::string lemma;
    PosTag pos = PosTag::other;
};

/// Suffix rewrite applied to a token of the given part of speech. A rule whose
/// replacement equals its suffix is a stop rule: it matches and leaves the
/// token unchanged, shielding it from later rules.
struct SuffixRule {
    PosTag pos;
    std::string suffix;
    std::string replacement;
};

/// Bag of lemmas with multiplicities, ordered for deterministic iteration.
using LemmaBag = std::map<std::string, std::uint32_t>;

class PipelineConfig {
public:
    PipelineConfig() = default;
    PipelineConfig(std::unordered_set<std::string> stopwords,
                   std::unordered_map<std::string, std::vector<std::pair<PosTag, std::string>>> lemma_dictionary,
                   std::vector<SuffixRule> suffix_rules);

    /// Loads `stopwords.txt` and `lemmas.tsv` from `data_dir` and pairs them
    /// with `default_suffix_rules()`.
    static PipelineConfig load(const std::filesystem::path& data_dir);

    bool is_stopword(std::string_view word) const;

    /// Dictionary lemma for (surface, pos), or nullptr.
    const std::string* dictionary_lemma(std::string_view surface, PosTag pos) const;

    /// First part of speech the dictionary lists for `surface`, if any.
    const PosTag* dictionary_pos(std::string_view surface) const;

    const std::vector<SuffixRule>& suffix_rules() const noexcept { return suffix_rules_; }
    const std::unordered_set<std::string>& stopwords() const noexcept { return stopwords_; }

private:
    std::unordered_set<std::string> stopwords_;
    // surface -> (pos, lemma) entries in file order
    std::unordered_map<std::string, std::vector<std::pair<PosTag, std::string>>> dictionary_;
    std::vector<SuffixRule> suffix_rules_;
};

/// Stopword file: one word per line, `#` starts a comment line. Entries must be
/// lowercase without whitespace.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// Lemma dictionary: `surface<TAB>pos<TAB>lemma`, pos in {noun, verb, adj, adv}.
std::unordered_map<std::string, std::vector<std::pair<PosTag, std::string>>> load_lemma_dictionary(
    const std::filesystem::path& path);

/// Regular English inflections: plural nouns, verb -ed/-ing/-ied, comparative
/// and superlative adjectives.
std::vector<SuffixRule> default_suffix_rules();

PosTag parse_pos(std::string_view text);
std::string_view pos_name(PosTag pos) noexcept;

/// Splits on Unicode whitespace, then splits punctuation off into single-character
/// tokens. Hyphens and apostrophes between two word characters stay inside the
/// word; periods never do ("U.S." -> "U" "." "S" ".").
std::vector<std::string> tokenize(std::string_view text);

/// Locale-independent lowercase over UTF-8 (ASCII, Latin-1, Latin Extended-A,
/// Greek and Cyrillic capitals).
std::string to_lower(std::string_view text);
std::vector<std::string> normalize(std::vector<std::string> tokens);

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const PipelineConfig& config);

/// True when the token has at least one letter or digit.
bool has_alnum(std::string_view token);

/// Coarse part of speech from the lemma dictionary and suffix heuristics;
/// anything unrecognized is a noun.
PosTag tag_pos(std::string_view token, const PipelineConfig& config);

/// Dictionary lookup, then the first matching suffix rule for `pos`, else the
/// token itself. The result is re-tagged and re-lemmatized until it stops
/// changing, so lemmatize is idempotent. `PosTag::other` uses the noun path.
std::string lemmatize(std::string_view token, PosTag pos, const PipelineConfig& config);
std::string lemmatize(std::string_view token, const PipelineConfig& config);

/// Full pipeline with per-token detail: tokenize, normalize, drop punctuation,
/// drop stopwords, tag, lemmatize, drop lemmas that are stopwords.
std::vector<Token> analyze(std::string_view text, const PipelineConfig& config);

LemmaBag preprocess(std::string_view text, const PipelineConfig& config);

/// Space-joined lemmas, each repeated by its multiplicity.
std::string join_lemmas(const LemmaBag& bag);

}  // namespace teachable
