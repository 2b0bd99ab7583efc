#include "teachable/interactive.hpp"

#include "teachable/errors.hpp"

#include <cmath>

namespace teachable {

std::string_view polarity_name(KeywordPolarity p) noexcept {
    return p == KeywordPolarity::relevant ? "relevant" : "irrelevant";
}

std::string_view origin_name(KeywordOrigin o) noexcept {
    switch (o) {
    case KeywordOrigin::external: return "external";
    case KeywordOrigin::internal_text: return "internal_text";
    case KeywordOrigin::highlight: return "highlight";
    }
    return "internal_text";
}

std::string_view mode_name(PredictionMode m) noexcept {
    switch (m) {
    case PredictionMode::baseline: return "baseline";
    case PredictionMode::keywords_only: return "keywords_only";
    case PredictionMode::combined: return "combined";
    }
    return "baseline";
}

std::string_view untaught_name(UntaughtClass u) noexcept {
    return u == UntaughtClass::neutral ? "neutral" : "smoothed";
}

UntaughtClass parse_untaught(std::string_view text) {
    if (text == "neutral")
        return UntaughtClass::neutral;
    if (text == "smoothed")
        return UntaughtClass::smoothed;
    throw ValidationError("unknown untaught-class policy '" + std::string(text) + "'");
}

KeywordPolarity parse_polarity(std::string_view text) {
    if (text == "relevant")
        return KeywordPolarity::relevant;
    if (text == "irrelevant")
        return KeywordPolarity::irrelevant;
    throw ValidationError("unknown keyword polarity '" + std::string(text) + "'");
}

KeywordOrigin parse_origin(std::string_view text) {
    if (text == "external")
        return KeywordOrigin::external;
    if (text == "internal_text")
        return KeywordOrigin::internal_text;
    if (text == "highlight")
        return KeywordOrigin::highlight;
    throw ValidationError("unknown keyword origin '" + std::string(text) + "'");
}

PredictionMode parse_prediction_mode(std::string_view text) {
    if (text == "baseline")
        return PredictionMode::baseline;
    if (text == "keywords_only")
        return PredictionMode::keywords_only;
    if (text == "combined")
        return PredictionMode::combined;
    throw ValidationError("unknown prediction mode '" + std::string(text) + "'");
}

const KeywordRecord& KeywordStore::add(std::string lemma, ClassLabel label, KeywordPolarity polarity,
                                       KeywordOrigin origin) {
    apply(KeywordRecord{std::move(lemma), label, polarity, origin, next_sequence_});
    return records_.back();
}

void KeywordStore::apply(const KeywordRecord& record) {
    if (record.sequence_number < next_sequence_)
        throw ValidationError("keyword sequence number " + std::to_string(record.sequence_number) +
                              " is not greater than the previous one");
    if (record.lemma.empty())
        throw ValidationError("empty keyword lemma");
    records_.push_back(record);
    next_sequence_ = record.sequence_number + 1;
    resolve(record);
}

void KeywordStore::resolve(const KeywordRecord& record) {
    const std::size_t k = class_index(record.label);
    if (record.polarity == KeywordPolarity::relevant) {
        irrelevant_[k].erase(record.lemma);
        relevant_[k].insert(record.lemma);
    } else {
        relevant_[k].erase(record.lemma);
        irrelevant_[k].insert(record.lemma);
    }
}

bool KeywordStore::no_relevant_keywords() const {
    for (const auto& set : relevant_) {
        if (!set.empty())
            return false;
    }
    return true;
}

std::vector<KeywordRecord> record_keyword(KeywordStore& store, const PipelineConfig& pipeline, std::string_view raw_word,
                                          ClassLabel label, KeywordPolarity polarity, KeywordOrigin origin) {
    std::vector<KeywordRecord> added;
    for (const Token& token : analyze(raw_word, pipeline))
        added.push_back(store.add(token.lemma, label, polarity, origin));
    return added;
}

KeywordStore merge_stores(std::span<const KeywordStore> stores) {
    KeywordStore merged;
    std::uint64_t sequence = 0;
    for (const KeywordStore& store : stores) {
        for (KeywordRecord record : store.records()) {
            record.sequence_number = sequence++;
            merged.apply(record);
        }
    }
    return merged;
}

nlohmann::json keywords_to_json(const KeywordStore& store) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : store.records()) {
        records.push_back({{"lemma", r.lemma},
                           {"class", class_code(r.label)},
                           {"polarity", polarity_name(r.polarity)},
                           {"origin", origin_name(r.origin)},
                           {"sequence_number", r.sequence_number}});
    }
    return {{"format", "teachable-keywords"}, {"version", 1}, {"records", std::move(records)}};
}

KeywordStore keywords_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format") != "teachable-keywords" || doc.at("version") != 1)
            throw ParseError("not a version 1 keyword store document");
        KeywordStore store;
        std::size_t index = 0;
        for (const auto& r : doc.at("records")) {
            ++index;
            const auto label = class_from_code(r.at("class").get<int>());
            if (!label)
                throw ParseError("keyword record has an invalid class", index);
            try {
                store.apply(KeywordRecord{r.at("lemma").get<std::string>(), *label,
                                          parse_polarity(r.at("polarity").get<std::string>()),
                                          parse_origin(r.at("origin").get<std::string>()),
                                          r.at("sequence_number").get<std::uint64_t>()});
            } catch (const ValidationError& e) {
                throw ParseError(e.what(), index);
            }
        }
        return store;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed keyword store: ") + e.what());
    }
}

PerClass<double> uniform_log_priors() {
    PerClass<double> p{};
    p.fill(std::log(1.0 / static_cast<double>(kNumClasses)));
    return p;
}

KeywordMatcher::KeywordMatcher(const KeywordStore& store, const EmbeddingStore& embeddings, InteractiveConfig config)
    : embeddings_(&embeddings), config_(config) {
    if (!(config_.keyword_alpha > 0.0))
        throw ValidationError("keyword smoothing constant must be positive");
    for (ClassLabel label : kAllClasses) {
        const std::size_t k = class_index(label);
        relevant_[k].assign(store.relevant(label).begin(), store.relevant(label).end());
        irrelevant_[k].assign(store.irrelevant(label).begin(), store.irrelevant(label).end());
        any_relevant_ = any_relevant_ || !relevant_[k].empty();
    }
}

const KeywordMatcher::WordMatch& KeywordMatcher::match(std::string_view word) const {
    auto it = cache_.find(std::string(word));
    if (it != cache_.end())
        return it->second;
    WordMatch m;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        m.similar_relevant[k] = similar_count(word, relevant_[k], *embeddings_, config_.tau);
        m.matches_irrelevant[k] = similar_count(word, irrelevant_[k], *embeddings_, config_.tau) > 0;
    }
    return cache_.emplace(std::string(word), m).first->second;
}

double KeywordMatcher::keyword_likelihood(std::string_view word, ClassLabel label) const {
    const std::size_t k = class_index(label);
    const double a = config_.keyword_alpha;
    return (static_cast<double>(match(word).similar_relevant[k]) + a) /
           (static_cast<double>(relevant_[k].size()) + 2.0 * a);
}

PerClass<double> KeywordMatcher::log_keyword_terms(std::string_view word) const {
    PerClass<double> terms{};
    if (!any_relevant_)
        return terms;
    const WordMatch& m = match(word);
    for (ClassLabel label : kAllClasses) {
        const std::size_t k = class_index(label);
        if (m.matches_irrelevant[k])
            continue;
        if (relevant_[k].empty()) {
            if (config_.untaught_classes == UntaughtClass::smoothed)
                terms[k] = std::log(0.5);
            continue;
        }
        terms[k] = std::log(keyword_likelihood(word, label));
    }
    return terms;
}

Prediction KeywordMatcher::predict_keywords_only(const LemmaBag& doc, const PerClass<double>& log_priors) const {
    Prediction p;
    p.scores = log_priors;
    for (const auto& [lemma, count] : doc) {
        const PerClass<double> terms = log_keyword_terms(lemma);
        for (std::size_t k = 0; k < kNumClasses; ++k)
            p.scores[k] += static_cast<double>(count) * terms[k];
    }
    p.label = argmax_class(p.scores);
    return p;
}

Prediction KeywordMatcher::predict_combined(const LemmaBag& doc, const NaiveBayesModel& base) const {
    const WordTerm extra = [this](std::string_view lemma) { return log_keyword_terms(lemma); };
    Prediction p;
    p.scores = base.log_scores(doc, &extra);
    p.label = argmax_class(p.scores);
    return p;
}

double keyword_likelihood(const KeywordStore& store, const EmbeddingStore& embeddings, const InteractiveConfig& config,
                          std::string_view word, ClassLabel label) {
    return KeywordMatcher(store, embeddings, config).keyword_likelihood(word, label);
}

Prediction predict_keywords_only(const KeywordStore& store, const EmbeddingStore& embeddings,
                                 const InteractiveConfig& config, const LemmaBag& doc,
                                 const PerClass<double>& log_priors) {
    return KeywordMatcher(store, embeddings, config).predict_keywords_only(doc, log_priors);
}

Prediction predict_combined(const KeywordStore& store, const EmbeddingStore& embeddings,
                            const InteractiveConfig& config, const LemmaBag& doc, const NaiveBayesModel& base) {
    return KeywordMatcher(store, embeddings, config).predict_combined(doc, base);
}

}  // namespace teachable
