#pragma once

#include "teachable/bayes.hpp"
#include "teachable/class_label.hpp"
#include "teachable/corpus.hpp"
#include "teachable/embeddings.hpp"
#include "teachable/event_log.hpp"
#include "teachable/interactive.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace teachable {

/// Per-class and macro-averaged (unweighted mean over the four classes)
/// precision, recall and F1. A class never predicted has precision 0; a class
/// absent from the gold labels has recall 0.
struct ClassMetrics {
    PerClass<double> precision{};
    PerClass<double> recall{};
    PerClass<double> f1{};
    double macro_precision = 0;
    double macro_recall = 0;
    double macro_f1 = 0;
    double accuracy = 0;
    PerClass<PerClass<std::uint64_t>> confusion{};  // [gold][predicted]

    bool operator==(const ClassMetrics&) const = default;
};

/// Throws ValidationError on a length mismatch or empty input.
ClassMetrics macro_metrics(std::span<const ClassLabel> predicted, std::span<const ClassLabel> gold);

nlohmann::json metrics_to_json(const ClassMetrics& m);

/// How documents are scored during evaluation.
struct EvalSetup {
    PredictionMode mode = PredictionMode::keywords_only;
    const EmbeddingStore* embeddings = nullptr;
    InteractiveConfig interactive;
    const NaiveBayesModel* base = nullptr;  // required for baseline and combined
};

/// One document under the setup's mode, with per-class log scores.
Prediction predict_one(const KeywordStore& store, const LemmaBag& doc, const EvalSetup& setup);

std::vector<ClassLabel> predict_all(const KeywordStore& store, const std::vector<LabeledDocument>& docs,
                                    const EvalSetup& setup);
ClassMetrics evaluate(const KeywordStore& store, const std::vector<LabeledDocument>& docs, const EvalSetup& setup);

struct EpochPoint {
    std::size_t article_index = 0;
    ClassMetrics metrics;
};

/// Replays the log's keyword events and evaluates after each teaching
/// article. Articles end at teaching `article_advanced` events; one more point
/// follows if keywords arrive after the last boundary, and an empty log gives
/// a single point at index 0.
std::vector<EpochPoint> epoch_curve(const SessionEventLog& log, const std::vector<LabeledDocument>& test_docs,
                                    const EvalSetup& setup);

/// `article_index,macro_precision,macro_recall,macro_f1` with six decimals.
void write_curve_csv(std::ostream& out, const std::vector<EpochPoint>& curve);
std::string curve_csv(const std::vector<EpochPoint>& curve);

/// Least-squares slope of macro F1 against article index (0 for < 2 points).
double f1_trend(const std::vector<EpochPoint>& curve);

/// Binary mutual information (bits) between "document contains the lemma"
/// and "document belongs to the class", from document frequencies.
double mutual_information(const VocabularyStats& stats, std::string_view lemma, ClassLabel label);

/// True when the lemma is more frequent in the class's documents than overall.
bool positively_associated(const VocabularyStats& stats, std::string_view lemma, ClassLabel label);

enum class TeacherKind { oracle_mi, random, adversarial };

std::string_view teacher_name(TeacherKind kind) noexcept;
TeacherKind parse_teacher(std::string_view text);

struct TeacherStrategy {
    TeacherKind kind = TeacherKind::oracle_mi;
    std::size_t k = 3;
    std::uint64_t seed = 0;
};

/// Generated teacher log over `teaching_articles` (ids into `train`, which
/// must be preprocessed). One request per article: its keyword events, then a
/// teaching `article_advanced`.
///
/// oracle_mi: the k article lemmas with the highest MI for the article's class
///   among positively associated ones (ties broken lexicographically).
/// random: k distinct article lemmas drawn uniformly.
/// adversarial: a seeded different class; its k highest-MI vocabulary lemmas
///   that are neither taught yet nor typical of the article's class, recorded
///   as relevant for the article's class.
SessionEventLog simulate_teacher(const TeacherStrategy& strategy, const std::vector<LabeledDocument>& train,
                                 const std::vector<std::int64_t>& teaching_articles, const VocabularyStats& stats);

/// `per_class` ids of each class chosen by a seeded shuffle, then shuffled
/// together. Throws ValidationError when a class is short.
std::vector<std::int64_t> balanced_article_ids(const std::vector<LabeledDocument>& docs, std::size_t per_class,
                                               std::uint64_t seed);

struct TeacherLogs {
    std::vector<SessionEventLog> best;
    std::vector<SessionEventLog> worst;
    std::vector<SessionEventLog> all;
};

/// Simulated teacher panel: one
/// oracle_mi teacher (best) and `adversarial` adversarial teachers (worst),
/// each over its own balanced article set. `all` lists the oracle first.
struct TeacherPanel {
    std::size_t per_class = 5;
    std::size_t k = 3;
    std::size_t adversarial = 3;
    std::uint64_t seed = 20200427;
};

TeacherLogs simulate_panel(const std::vector<LabeledDocument>& train, const TeacherPanel& panel);

struct BenchmarkRow {
    std::string condition;  // "Best Teacher" etc.
    std::string model;
    ClassMetrics metrics;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
};

struct BenchmarkConfig {
    NBOptions bernoulli{};
    NBOptions multinomial{};
    InteractiveConfig interactive{};
};

/// Eight rows: baseline Bernoulli/Multinomial, then best,
/// worst and all teachers with the interactive (combined) variants. Each
/// condition's logs are merged with merge_stores.
BenchmarkReport run_benchmark(const CorpusSplit& corpus, const TeacherLogs& logs, const EmbeddingStore& embeddings,
                              const BenchmarkConfig& config = {});

nlohmann::json report_to_json(const BenchmarkReport& report);
std::string format_report(const BenchmarkReport& report);

}  // namespace teachable
