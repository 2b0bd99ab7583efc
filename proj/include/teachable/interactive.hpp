#pragma once

#include "teachable/bayes.hpp"
#include "teachable/class_label.hpp"
#include "teachable/embeddings.hpp"
#include "teachable/text_pipeline.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace teachable {

enum class KeywordPolarity { relevant, irrelevant };
enum class KeywordOrigin { external, internal_text, highlight };

/// How a document is scored: corpus likelihoods only, conversational keyword
/// likelihoods only, or both multiplied together.
enum class PredictionMode { baseline, keywords_only, combined };

std::string_view polarity_name(KeywordPolarity p) noexcept;
std::string_view origin_name(KeywordOrigin o) noexcept;
std::string_view mode_name(PredictionMode m) noexcept;
KeywordPolarity parse_polarity(std::string_view text);
KeywordOrigin parse_origin(std::string_view text);
PredictionMode parse_prediction_mode(std::string_view text);

struct KeywordRecord {
    std::string lemma;
    ClassLabel label = ClassLabel::World;
    KeywordPolarity polarity = KeywordPolarity::relevant;
    KeywordOrigin origin = KeywordOrigin::internal_text;
    std::uint64_t sequence_number = 0;

    bool operator==(const KeywordRecord&) const = default;
};

/// Conversational keywords captured from one teacher. Records are append-only;
/// the per-class relevant and irrelevant sets reflect the latest record for
/// each (lemma, class) pair.
class KeywordStore {
public:
    /// Appends a record with the next sequence number and returns it.
    const KeywordRecord& add(std::string lemma, ClassLabel label, KeywordPolarity polarity, KeywordOrigin origin);

    /// Appends an existing record (replay). Throws ValidationError unless its
    /// sequence number exceeds every earlier one.
    void apply(const KeywordRecord& record);

    const std::vector<KeywordRecord>& records() const noexcept { return records_; }
    const std::set<std::string>& relevant(ClassLabel label) const { return relevant_[class_index(label)]; }
    const std::set<std::string>& irrelevant(ClassLabel label) const { return irrelevant_[class_index(label)]; }

    /// Number of distinct relevant keywords for the class.
    std::size_t total(ClassLabel label) const { return relevant_[class_index(label)].size(); }

    /// True when no class has a relevant keyword.
    bool no_relevant_keywords() const;

    std::uint64_t next_sequence() const noexcept { return next_sequence_; }

    bool operator==(const KeywordStore&) const = default;

private:
    void resolve(const KeywordRecord& record);

    std::vector<KeywordRecord> records_;
    PerClass<std::set<std::string>> relevant_;
    PerClass<std::set<std::string>> irrelevant_;
    std::uint64_t next_sequence_ = 0;
};

/// Runs `raw_word` through the text pipeline and records every surviving
/// lemma. Returns the new records; empty means the word was rejected (empty or
/// stopwords only).
std::vector<KeywordRecord> record_keyword(KeywordStore& store, const PipelineConfig& pipeline, std::string_view raw_word,
                                          ClassLabel label, KeywordPolarity polarity, KeywordOrigin origin);

/// Concatenates the stores' records in list order, renumbers them 0.., and
/// replays them, so conflicts resolve in favour of later stores.
KeywordStore merge_stores(std::span<const KeywordStore> stores);

nlohmann::json keywords_to_json(const KeywordStore& store);
KeywordStore keywords_from_json(const nlohmann::json& doc);

/// Keyword factor for a class with no relevant keywords while some other
/// class has them. `neutral` leaves the class at its prior (factor 1);
/// `smoothed` applies the keyword smoothing with total 0, i.e. a / 2a = 1/2.
enum class UntaughtClass { neutral, smoothed };

std::string_view untaught_name(UntaughtClass u) noexcept;
UntaughtClass parse_untaught(std::string_view text);

struct InteractiveConfig {
    SimilarityThreshold tau;
    /// Additive smoothing of the keyword likelihood: (similar + a) / (total + 2a).
    double keyword_alpha = 0.5;
    /// Keywords-only scoring uses uniform class priors (no pre-training).
    bool uniform_keyword_priors = true;
    UntaughtClass untaught_classes = UntaughtClass::neutral;
};

PerClass<double> uniform_log_priors();

/// Snapshot of a keyword store bound to word vectors. Per-word matches are
/// memoized, so one matcher must not be shared between threads.
class KeywordMatcher {
public:
    KeywordMatcher(const KeywordStore& store, const EmbeddingStore& embeddings, InteractiveConfig config);

    struct WordMatch {
        PerClass<std::size_t> similar_relevant{};
        PerClass<bool> matches_irrelevant{};
    };

    const WordMatch& match(std::string_view word) const;

    /// Smoothed share of the class's relevant keywords that are similar to
    /// `word`. Requires at least one relevant keyword for the class.
    double keyword_likelihood(std::string_view word, ClassLabel label) const;

    /// Log keyword factor per class; 0 (factor 1) for classes whose irrelevant
    /// set matches the word, for every class when no class has relevant
    /// keywords, and for untaught classes under UntaughtClass::neutral.
    PerClass<double> log_keyword_terms(std::string_view word) const;

    /// log P(C) + sum over document tokens of the keyword log terms.
    Prediction predict_keywords_only(const LemmaBag& doc, const PerClass<double>& log_priors) const;

    /// Corpus likelihoods from `base` times the keyword factors. Identical to
    /// base.predict(doc) when the store has no relevant keywords.
    Prediction predict_combined(const LemmaBag& doc, const NaiveBayesModel& base) const;

    const InteractiveConfig& config() const noexcept { return config_; }
    std::size_t total(ClassLabel label) const { return relevant_[class_index(label)].size(); }

private:
    const EmbeddingStore* embeddings_;
    InteractiveConfig config_;
    PerClass<std::vector<std::string>> relevant_;
    PerClass<std::vector<std::string>> irrelevant_;
    bool any_relevant_ = false;
    mutable std::unordered_map<std::string, WordMatch> cache_;
};

double keyword_likelihood(const KeywordStore& store, const EmbeddingStore& embeddings, const InteractiveConfig& config,
                          std::string_view word, ClassLabel label);

Prediction predict_keywords_only(const KeywordStore& store, const EmbeddingStore& embeddings,
                                 const InteractiveConfig& config, const LemmaBag& doc,
                                 const PerClass<double>& log_priors);

Prediction predict_combined(const KeywordStore& store, const EmbeddingStore& embeddings,
                            const InteractiveConfig& config, const LemmaBag& doc, const NaiveBayesModel& base);

}  // namespace teachable
