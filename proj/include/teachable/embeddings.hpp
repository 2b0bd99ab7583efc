#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace teachable {

/// Minimum cosine similarity for a keyword to count as similar to a word.
class SimilarityThreshold {
public:
    static constexpr double kDefault = 0.2;

    constexpr SimilarityThreshold() = default;
    explicit SimilarityThreshold(double tau);

    constexpr double value() const noexcept { return tau_; }

private:
    double tau_ = kDefault;
};

/// Immutable word -> vector table. Vectors are stored as 32-bit floats with
/// their norms precomputed in double precision.
class EmbeddingStore {
public:
    explicit EmbeddingStore(std::size_t dimension = 300);

    /// Inserts or replaces a vector. Throws ValidationError on a dimension
    /// mismatch or an all-zero vector.
    void insert(std::string word, std::span<const float> vector);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool contains(std::string_view word) const;

    /// Empty span when the word has no vector.
    std::span<const float> vector(std::string_view word) const;

    /// Cosine of two stored words, or nullopt if either is missing.
    std::optional<double> similarity(std::string_view a, std::string_view b) const;

    /// Words in insertion order (a replaced word keeps its first position).
    const std::vector<std::string>& words() const noexcept { return words_; }

private:
    std::optional<std::size_t> slot(std::string_view word) const;

    std::size_t dimension_;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<float> data_;
    std::vector<double> norms_;
};

/// Text format: header `<word_count> <dimension>`, then `word v1 ... vD` per line.
/// Duplicate words keep the last vector.
EmbeddingStore load_text_embeddings(const std::filesystem::path& path);
EmbeddingStore read_text_embeddings(std::istream& in);
void write_text_embeddings(std::ostream& out, const EmbeddingStore& store);

/// Binary format: ASCII header `<word_count> <dimension>\n`, then per word the
/// word bytes, one space, and D little-endian float32 values. A newline before
/// a word (as written by the original word2vec tool) is tolerated.
EmbeddingStore load_binary_embeddings(const std::filesystem::path& path);
EmbeddingStore read_binary_embeddings(std::istream& in);
void write_binary_embeddings(std::ostream& out, const EmbeddingStore& store);

/// dot(a,b) / (|a| |b|) accumulated in double and clamped to [-1, 1]. Throws
/// std::invalid_argument for zero vectors or mismatched dimensions.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const float> a, std::span<const float> b);

/// Number of keywords similar to `word`: a keyword equal to `word` always
/// counts; otherwise both need vectors and cosine >= tau.
template <typename KeywordRange>
std::size_t similar_count(std::string_view word, const KeywordRange& keywords, const EmbeddingStore& store,
                          SimilarityThreshold tau) {
    std::size_t count = 0;
    for (const auto& keyword : keywords) {
        if (std::string_view(keyword) == word) {
            ++count;
            continue;
        }
        const auto sim = store.similarity(word, keyword);
        if (sim && *sim >= tau.value())
            ++count;
    }
    return count;
}

}  // namespace teachable
