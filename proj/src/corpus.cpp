#include "teachable/corpus.hpp"

#include "teachable/errors.hpp"
#include "teachable/random.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace teachable {

namespace {

// Reads one CSV record. Returns false at end of input. `line_no` is advanced
// past every physical line consumed; `record_line` is where the record began.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no, std::size_t& record_line,
                 const std::string& source) {
    fields.clear();
    int c = in.get();
    while (c == '\n' || c == '\r') {  // blank lines
        if (c == '\n')
            ++line_no;
        c = in.get();
    }
    if (c == EOF)
        return false;
    record_line = line_no + 1;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    for (;; c = in.get()) {
        if (quoted) {
            if (c == EOF)
                throw ParseError(source + ": unterminated quoted field", record_line);
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n')
                    ++line_no;
                field.push_back(static_cast<char>(c));
            }
            continue;
        }
        if (c == '"') {
            if (!field.empty() || field_was_quoted)
                throw ParseError(source + ": stray quote inside field", record_line);
            quoted = true;
            field_was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_was_quoted = false;
        } else if (c == '\n' || c == EOF) {
            fields.push_back(std::move(field));
            ++line_no;
            return true;
        } else if (c == '\r') {
            if (in.peek() != '\n')
                field.push_back('\r');
        } else {
            if (field_was_quoted)
                throw ParseError(source + ": text after closing quote", record_line);
            field.push_back(static_cast<char>(c));
        }
    }
}

void write_quoted(std::ostream& out, const std::string& text) {
    out << '"';
    for (char c : text) {
        if (c == '"')
            out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

std::vector<LabeledDocument> read_ag_news_csv(std::istream& in, const std::string& source_name) {
    std::vector<LabeledDocument> docs;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    std::size_t record_line = 0;
    while (read_record(in, fields, line_no, record_line, source_name)) {
        if (fields.size() != 3)
            throw ParseError(source_name + ": expected 3 columns, found " + std::to_string(fields.size()), record_line);
        int code = 0;
        const std::string& label_text = fields[0];
        const auto [ptr, ec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), code);
        const auto label = class_from_code(code);
        if (ec != std::errc{} || ptr != label_text.data() + label_text.size() || !label)
            throw ParseError(source_name + ": label must be 1-4, got '" + label_text + "'", record_line);
        LabeledDocument doc;
        doc.id = static_cast<std::int64_t>(docs.size());
        doc.label = *label;
        doc.title = std::move(fields[1]);
        doc.body = std::move(fields[2]);
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<LabeledDocument> read_ag_news_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    return read_ag_news_csv(in, path.string());
}

void write_ag_news_csv(std::ostream& out, const std::vector<LabeledDocument>& docs) {
    for (const auto& doc : docs) {
        out << class_code(doc.label) << ',';
        write_quoted(out, doc.title);
        out << ',';
        write_quoted(out, doc.body);
        out << '\n';
    }
}

PerClass<std::size_t> class_counts(const std::vector<LabeledDocument>& docs) {
    PerClass<std::size_t> counts{};
    for (const auto& doc : docs)
        ++counts[class_index(doc.label)];
    return counts;
}

CorpusSplit load_ag_news(const std::filesystem::path& train_path, const std::filesystem::path& test_path,
                         const LoadOptions& options) {
    CorpusSplit split{read_ag_news_csv(train_path), read_ag_news_csv(test_path)};
    if (options.strict_counts) {
        const auto check = [](const std::vector<LabeledDocument>& docs, std::size_t per_class, const char* name) {
            const auto counts = class_counts(docs);
            for (ClassLabel label : kAllClasses) {
                if (counts[class_index(label)] != per_class) {
                    throw ValidationError(std::string(name) + " split has " +
                                          std::to_string(counts[class_index(label)]) + " " +
                                          std::string(class_name(label)) + " documents, expected " +
                                          std::to_string(per_class));
                }
            }
        };
        check(split.train, kAgNewsTrainPerClass, "train");
        check(split.test, kAgNewsTestPerClass, "test");
    }
    return split;
}

void preprocess_documents(std::vector<LabeledDocument>& docs, const PipelineConfig& config) {
    for (auto& doc : docs)
        doc.lemmas = preprocess(doc.text(), config);
}

CorpusSplit preprocess_corpus(CorpusSplit split, const PipelineConfig& config) {
    preprocess_documents(split.train, config);
    preprocess_documents(split.test, config);
    return split;
}

namespace {

std::vector<LabeledDocument> balanced_sample(const std::vector<LabeledDocument>& docs, std::size_t per_class,
                                             std::mt19937_64& rng, const char* split_name) {
    PerClass<std::vector<std::size_t>> positions;
    for (std::size_t i = 0; i < docs.size(); ++i)
        positions[class_index(docs[i].label)].push_back(i);
    std::vector<std::size_t> chosen;
    for (ClassLabel label : kAllClasses) {
        auto& pool = positions[class_index(label)];
        if (pool.size() < per_class) {
            throw ValidationError(std::string("subsample of ") + std::to_string(per_class) + " per class exceeds " +
                                  std::to_string(pool.size()) + " available " + std::string(class_name(label)) +
                                  " documents in " + split_name);
        }
        seeded_shuffle(pool, rng);
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(per_class));
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<LabeledDocument> out;
    out.reserve(chosen.size());
    for (std::size_t i : chosen)
        out.push_back(docs[i]);
    return out;
}

}  // namespace

CorpusSplit subsample(const CorpusSplit& split, SubsampleSizes sizes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CorpusSplit out;
    out.train = balanced_sample(split.train, sizes.train_per_class, rng, "train");
    out.test = balanced_sample(split.test, sizes.test_per_class, rng, "test");
    return out;
}

CorpusSplit subsample(const CorpusSplit& split, std::size_t per_class_n, std::uint64_t seed) {
    return subsample(split, SubsampleSizes{per_class_n, per_class_n}, seed);
}

}  // namespace teachable
