#include "teachable/embeddings.hpp"

#include "teachable/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace teachable {

SimilarityThreshold::SimilarityThreshold(double tau) : tau_(tau) {
    if (!(tau >= -1.0 && tau <= 1.0))
        throw ValidationError("similarity threshold must lie in [-1, 1]");
}

EmbeddingStore::EmbeddingStore(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0)
        throw ValidationError("embedding dimension must be positive");
}

void EmbeddingStore::insert(std::string word, std::span<const float> vector) {
    if (vector.size() != dimension_) {
        throw ValidationError("vector for '" + word + "' has " + std::to_string(vector.size()) +
                              " components, expected " + std::to_string(dimension_));
    }
    double norm2 = 0.0;
    for (float x : vector)
        norm2 += static_cast<double>(x) * static_cast<double>(x);
    if (norm2 == 0.0)
        throw ValidationError("zero vector for '" + word + "'");
    if (auto existing = slot(word)) {
        std::copy(vector.begin(), vector.end(), data_.begin() + static_cast<std::ptrdiff_t>(*existing * dimension_));
        norms_[*existing] = std::sqrt(norm2);
        return;
    }
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    data_.insert(data_.end(), vector.begin(), vector.end());
    norms_.push_back(std::sqrt(norm2));
}

std::optional<std::size_t> EmbeddingStore::slot(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

bool EmbeddingStore::contains(std::string_view word) const { return slot(word).has_value(); }

std::span<const float> EmbeddingStore::vector(std::string_view word) const {
    const auto s = slot(word);
    if (!s)
        return {};
    return std::span<const float>(data_.data() + *s * dimension_, dimension_);
}

std::optional<double> EmbeddingStore::similarity(std::string_view a, std::string_view b) const {
    const auto sa = slot(a);
    const auto sb = slot(b);
    if (!sa || !sb)
        return std::nullopt;
    const float* va = data_.data() + *sa * dimension_;
    const float* vb = data_.data() + *sb * dimension_;
    double dot = 0.0;
    for (std::size_t i = 0; i < dimension_; ++i)
        dot += static_cast<double>(va[i]) * static_cast<double>(vb[i]);
    return std::clamp(dot / (norms_[*sa] * norms_[*sb]), -1.0, 1.0);
}

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine of vectors with different dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i], y = b[i];
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("cosine of a zero vector");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::pair<std::size_t, std::size_t> parse_header(const std::string& line) {
    std::size_t count = 0, dim = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto skip = [&] {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r'))
            ++p;
    };
    skip();
    auto r1 = std::from_chars(p, end, count);
    p = r1.ptr;
    skip();
    auto r2 = std::from_chars(p, end, dim);
    p = r2.ptr;
    skip();
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || p != end || dim == 0)
        throw ParseError("embedding header must be '<word_count> <dimension>'", 1);
    return {count, dim};
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }

EmbeddingStore read_text_embeddings(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("missing embedding header", 1);
    const auto [count, dim] = parse_header(line);
    EmbeddingStore store(dim);
    std::vector<float> values;
    values.reserve(dim);
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end && (*p == ' ' || *p == '\t'))
            ++p;
        const char* word_begin = p;
        while (p < end && *p != ' ' && *p != '\t')
            ++p;
        std::string word(word_begin, p);
        values.clear();
        while (true) {
            while (p < end && (*p == ' ' || *p == '\t'))
                ++p;
            if (p == end)
                break;
            float v = 0.0f;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{} || (next < end && *next != ' ' && *next != '\t'))
                throw ParseError("non-numeric vector component for '" + word + "'", line_no);
            values.push_back(v);
            p = next;
        }
        if (values.size() != dim) {
            throw ParseError("'" + word + "' has " + std::to_string(values.size()) + " components, expected " +
                                 std::to_string(dim),
                             line_no);
        }
        try {
            store.insert(std::move(word), values);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line_no);
        }
        ++rows;
    }
    if (rows != count)
        throw ParseError("header declares " + std::to_string(count) + " words but file has " + std::to_string(rows));
    return store;
}

EmbeddingStore load_text_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    return read_text_embeddings(in);
}

void write_text_embeddings(std::ostream& out, const EmbeddingStore& store) {
    out << store.size() << ' ' << store.dimension() << '\n';
    char buf[32];
    for (const auto& word : store.words()) {
        out << word;
        for (float x : store.vector(word)) {
            // Shortest representation that round-trips exactly.
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
            out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
        }
        out << '\n';
    }
}

EmbeddingStore read_binary_embeddings(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw ParseError("missing embedding header");
    const auto [count, dim] = parse_header(header);
    EmbeddingStore store(dim);
    std::vector<float> values(dim);
    std::vector<unsigned char> raw(dim * 4);
    for (std::size_t record = 0; record < count; ++record) {
        std::string word;
        int c = in.get();
        while (c == '\n')
            c = in.get();
        while (c != EOF && c != ' ') {
            word.push_back(static_cast<char>(c));
            c = in.get();
        }
        if (c == EOF)
            throw ParseError("truncated binary embeddings: header declares " + std::to_string(count) +
                                 " words, found " + std::to_string(record),
                             record + 1);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size()))
            throw ParseError("truncated vector for '" + word + "'", record + 1);
        for (std::size_t i = 0; i < dim; ++i) {
            const std::uint32_t bits = std::uint32_t{raw[4 * i]} | (std::uint32_t{raw[4 * i + 1]} << 8) |
                                       (std::uint32_t{raw[4 * i + 2]} << 16) | (std::uint32_t{raw[4 * i + 3]} << 24);
            values[i] = std::bit_cast<float>(bits);
        }
        try {
            store.insert(std::move(word), values);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), record + 1);
        }
    }
    for (int c = in.get(); c != EOF; c = in.get()) {
        if (c != '\n' && c != '\r' && c != ' ')
            throw ParseError("data after the " + std::to_string(count) + " declared words");
    }
    return store;
}

EmbeddingStore load_binary_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    return read_binary_embeddings(in);
}

void write_binary_embeddings(std::ostream& out, const EmbeddingStore& store) {
    out << store.size() << ' ' << store.dimension() << '\n';
    std::vector<char> raw(store.dimension() * 4);
    for (const auto& word : store.words()) {
        out << word << ' ';
        const auto v = store.vector(word);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto bits = std::bit_cast<std::uint32_t>(v[i]);
            for (int b = 0; b < 4; ++b)
                raw[4 * i + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xFF);
        }
        out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    }
}

}  // namespace teachable
