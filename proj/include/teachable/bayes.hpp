#pragma once

#include "teachable/class_label.hpp"
#include "teachable/corpus.hpp"
#include "teachable/text_pipeline.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <map>
#include <vector>

namespace teachable {

enum class NBVariant { multinomial, bernoulli };

std::string_view variant_name(NBVariant variant) noexcept;
NBVariant parse_variant(std::string_view text);

/// Exact sufficient statistics over a training set.
struct VocabularyStats {
    struct WordCounts {
        PerClass<std::uint64_t> tokens{};  // occurrences in each class
        PerClass<std::uint64_t> docs{};    // documents of each class containing the word

        bool operator==(const WordCounts&) const = default;
    };

    std::map<std::string, WordCounts, std::less<>> words;  // ordered: sums iterate deterministically
    PerClass<std::uint64_t> class_tokens{};
    PerClass<std::uint64_t> class_docs{};

    void add(const LemmaBag& lemmas, ClassLabel label);

    std::size_t vocabulary_size() const noexcept { return words.size(); }
    std::uint64_t total_docs() const noexcept;
    const WordCounts* find(std::string_view lemma) const;

    bool operator==(const VocabularyStats&) const = default;
};

struct Prediction {
    ClassLabel label = ClassLabel::World;
    PerClass<double> scores{};  // unnormalized log scores
};

/// Scores closer than this (relative to their magnitude, floor 1) are tied.
inline constexpr double kTieTolerance = 1e-10;

/// Highest score; ties go to the lowest class code.
ClassLabel argmax_class(const PerClass<double>& scores) noexcept;

/// Max-subtracted softmax of log scores.
PerClass<double> softmax(const PerClass<double>& log_scores) noexcept;

/// Extra per-class log term added for a document word after its corpus term.
/// Receives the lemma and returns one value per class; zero means "no change".
using WordTerm = std::function<PerClass<double>(std::string_view lemma)>;

struct NBOptions {
    double alpha = 1.0;
    /// Bernoulli only: also multiply in (1 - P(w|C)) for vocabulary words absent
    /// from the document.
    bool bernoulli_absence_terms = false;
};

/// Multinomial or Bernoulli naive Bayes with additive smoothing. Counts are
/// integers; probabilities are derived on demand.
class NaiveBayesModel {
public:
    NaiveBayesModel(NBVariant variant, NBOptions options);

    /// Throws ValidationError naming the first class without documents.
    static NaiveBayesModel fit(const std::vector<LabeledDocument>& train, NBVariant variant, NBOptions options = {});

    /// Model over precomputed counts (deserialization, merged statistics).
    static NaiveBayesModel from_stats(VocabularyStats stats, NBVariant variant, NBOptions options = {});

    /// Adds one more training document. Equivalent to refitting with it.
    void update(const LabeledDocument& doc);

    NBVariant variant() const noexcept { return variant_; }
    const NBOptions& options() const noexcept { return options_; }
    const VocabularyStats& stats() const noexcept { return stats_; }

    double log_prior(ClassLabel label) const;
    PerClass<double> log_priors() const;

    /// Multinomial: log((count + a) / (class_tokens + a|V|)).
    /// Bernoulli:   log((df + a) / (class_docs + 2a)).
    double log_likelihood(std::string_view lemma, ClassLabel label) const;

    /// log P(C) + sum of word terms; `extra`, when given, is added per word
    /// (per occurrence for multinomial, per distinct word for Bernoulli).
    PerClass<double> log_scores(const LemmaBag& doc, const WordTerm* extra = nullptr) const;

    Prediction predict(const LemmaBag& doc) const;
    PerClass<double> posterior(const LemmaBag& doc) const;

    bool operator==(const NaiveBayesModel& other) const {
        return variant_ == other.variant_ && options_.alpha == other.options_.alpha &&
               options_.bernoulli_absence_terms == other.options_.bernoulli_absence_terms && stats_ == other.stats_;
    }

private:
    void refresh_absence_sums();
    void check_fitted() const;

    NBVariant variant_;
    NBOptions options_;
    VocabularyStats stats_;
    PerClass<double> absence_sums_{};  // sum over V of log(1 - P(v|C)), Bernoulli only
};

nlohmann::json model_to_json(const NaiveBayesModel& model);
NaiveBayesModel model_from_json(const nlohmann::json& doc);
void save_model(const NaiveBayesModel& model, const std::filesystem::path& path);
NaiveBayesModel load_model(const std::filesystem::path& path);

}  // namespace teachable
