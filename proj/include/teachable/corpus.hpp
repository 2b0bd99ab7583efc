#pragma once

#include "teachable/class_label.hpp"
#include "teachable/text_pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace teachable {

struct LabeledDocument {
    std::int64_t id = 0;
    ClassLabel label = ClassLabel::World;
    std::string title;
    std::string body;
    LemmaBag lemmas;  // empty until preprocess_corpus

    /// Text fed to the pipeline: title and body joined by one space.
    std::string text() const { return title + " " + body; }
};

struct CorpusSplit {
    std::vector<LabeledDocument> train;
    std::vector<LabeledDocument> test;
};

struct LoadOptions {
    /// Require the canonical AG News sizes (30000 train / 1900 test per class).
    bool strict_counts = false;
};

inline constexpr std::size_t kAgNewsTrainPerClass = 30000;
inline constexpr std::size_t kAgNewsTestPerClass = 1900;

/// Reads AG News CSV rows `label,"title","description"` (no header, UTF-8).
/// Quoted fields may contain commas, doubled quotes and line breaks. Document
/// ids are assigned 0.. in file order.
std::vector<LabeledDocument> read_ag_news_csv(std::istream& in, const std::string& source_name = "<stream>");
std::vector<LabeledDocument> read_ag_news_csv(const std::filesystem::path& path);

/// Writes rows in the same format with both text fields quoted.
void write_ag_news_csv(std::ostream& out, const std::vector<LabeledDocument>& docs);

CorpusSplit load_ag_news(const std::filesystem::path& train_path, const std::filesystem::path& test_path,
                         const LoadOptions& options = {});

PerClass<std::size_t> class_counts(const std::vector<LabeledDocument>& docs);

/// Fills every document's lemmas from `text()`.
CorpusSplit preprocess_corpus(CorpusSplit split, const PipelineConfig& config);
void preprocess_documents(std::vector<LabeledDocument>& docs, const PipelineConfig& config);

struct SubsampleSizes {
    std::size_t train_per_class = 0;
    std::size_t test_per_class = 0;
};

/// Class-balanced sample drawn by a seeded shuffle of each class. Selected
/// documents keep their ids and relative file order. Throws ValidationError
/// when a class has fewer documents than requested.
CorpusSplit subsample(const CorpusSplit& split, SubsampleSizes sizes, std::uint64_t seed);
CorpusSplit subsample(const CorpusSplit& split, std::size_t per_class_n, std::uint64_t seed);

}  // namespace teachable
