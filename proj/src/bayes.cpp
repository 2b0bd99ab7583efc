#include "teachable/bayes.hpp"

#include "teachable/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace teachable {

std::string_view variant_name(NBVariant variant) noexcept {
    return variant == NBVariant::multinomial ? "multinomial" : "bernoulli";
}

NBVariant parse_variant(std::string_view text) {
    if (text == "multinomial")
        return NBVariant::multinomial;
    if (text == "bernoulli")
        return NBVariant::bernoulli;
    throw ValidationError("unknown naive Bayes variant '" + std::string(text) + "'");
}

void VocabularyStats::add(const LemmaBag& lemmas, ClassLabel label) {
    const std::size_t k = class_index(label);
    ++class_docs[k];
    for (const auto& [lemma, count] : lemmas) {
        if (count == 0)
            continue;
        auto it = words.find(lemma);
        if (it == words.end())
            it = words.emplace(lemma, WordCounts{}).first;
        it->second.tokens[k] += count;
        it->second.docs[k] += 1;
        class_tokens[k] += count;
    }
}

std::uint64_t VocabularyStats::total_docs() const noexcept {
    std::uint64_t n = 0;
    for (auto c : class_docs)
        n += c;
    return n;
}

const VocabularyStats::WordCounts* VocabularyStats::find(std::string_view lemma) const {
    auto it = words.find(lemma);
    return it == words.end() ? nullptr : &it->second;
}

ClassLabel argmax_class(const PerClass<double>& scores) noexcept {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kNumClasses; ++k) {
        const double scale = std::max({1.0, std::abs(scores[k]), std::abs(scores[best])});
        if (scores[k] - scores[best] > kTieTolerance * scale)
            best = k;
    }
    return class_from_index(best);
}

PerClass<double> softmax(const PerClass<double>& log_scores) noexcept {
    const double top = *std::max_element(log_scores.begin(), log_scores.end());
    PerClass<double> p{};
    double sum = 0.0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        p[k] = std::exp(log_scores[k] - top);
        sum += p[k];
    }
    for (double& x : p)
        x /= sum;
    return p;
}

NaiveBayesModel::NaiveBayesModel(NBVariant variant, NBOptions options) : variant_(variant), options_(options) {
    if (!(options_.alpha > 0.0))
        throw ValidationError("smoothing constant alpha must be positive");
}

NaiveBayesModel NaiveBayesModel::fit(const std::vector<LabeledDocument>& train, NBVariant variant, NBOptions options) {
    NaiveBayesModel model(variant, options);
    for (const auto& doc : train)
        model.stats_.add(doc.lemmas, doc.label);
    model.check_fitted();
    model.refresh_absence_sums();
    return model;
}

NaiveBayesModel NaiveBayesModel::from_stats(VocabularyStats stats, NBVariant variant, NBOptions options) {
    NaiveBayesModel model(variant, options);
    model.stats_ = std::move(stats);
    model.check_fitted();
    model.refresh_absence_sums();
    return model;
}

void NaiveBayesModel::update(const LabeledDocument& doc) {
    stats_.add(doc.lemmas, doc.label);
    refresh_absence_sums();
}

void NaiveBayesModel::check_fitted() const {
    for (ClassLabel label : kAllClasses) {
        if (stats_.class_docs[class_index(label)] == 0)
            throw ValidationError("no training documents for class " + std::string(class_name(label)));
    }
}

void NaiveBayesModel::refresh_absence_sums() {
    absence_sums_ = {};
    if (variant_ != NBVariant::bernoulli || !options_.bernoulli_absence_terms)
        return;
    for (const auto& [lemma, counts] : stats_.words) {
        for (ClassLabel label : kAllClasses)
            absence_sums_[class_index(label)] += std::log1p(-std::exp(log_likelihood(lemma, label)));
    }
}

double NaiveBayesModel::log_prior(ClassLabel label) const {
    return std::log(static_cast<double>(stats_.class_docs[class_index(label)])) -
           std::log(static_cast<double>(stats_.total_docs()));
}

PerClass<double> NaiveBayesModel::log_priors() const {
    PerClass<double> out{};
    for (ClassLabel label : kAllClasses)
        out[class_index(label)] = log_prior(label);
    return out;
}

double NaiveBayesModel::log_likelihood(std::string_view lemma, ClassLabel label) const {
    const std::size_t k = class_index(label);
    const auto* counts = stats_.find(lemma);
    const double a = options_.alpha;
    if (variant_ == NBVariant::multinomial) {
        const double count = counts ? static_cast<double>(counts->tokens[k]) : 0.0;
        const double denom = static_cast<double>(stats_.class_tokens[k]) + a * static_cast<double>(stats_.vocabulary_size());
        return std::log((count + a) / denom);
    }
    const double df = counts ? static_cast<double>(counts->docs[k]) : 0.0;
    return std::log((df + a) / (static_cast<double>(stats_.class_docs[k]) + 2.0 * a));
}

PerClass<double> NaiveBayesModel::log_scores(const LemmaBag& doc, const WordTerm* extra) const {
    PerClass<double> scores = log_priors();
    const bool bernoulli = variant_ == NBVariant::bernoulli;
    const bool absence = bernoulli && options_.bernoulli_absence_terms;
    if (absence) {
        for (std::size_t k = 0; k < kNumClasses; ++k)
            scores[k] += absence_sums_[k];
    }
    for (const auto& [lemma, count] : doc) {
        if (count == 0)
            continue;
        const bool in_vocabulary = stats_.find(lemma) != nullptr;
        PerClass<double> term{};
        if (extra)
            term = (*extra)(lemma);
        for (ClassLabel label : kAllClasses) {
            const std::size_t k = class_index(label);
            if (bernoulli) {
                if (in_vocabulary) {
                    const double ll = log_likelihood(lemma, label);
                    scores[k] += absence ? ll - std::log1p(-std::exp(ll)) : ll;
                }
                if (extra)
                    scores[k] += term[k];
            } else {
                scores[k] += static_cast<double>(count) * log_likelihood(lemma, label);
                if (extra)
                    scores[k] += static_cast<double>(count) * term[k];
            }
        }
    }
    return scores;
}

Prediction NaiveBayesModel::predict(const LemmaBag& doc) const {
    Prediction p;
    p.scores = log_scores(doc);
    p.label = argmax_class(p.scores);
    return p;
}

PerClass<double> NaiveBayesModel::posterior(const LemmaBag& doc) const { return softmax(log_scores(doc)); }

nlohmann::json model_to_json(const NaiveBayesModel& model) {
    nlohmann::json words = nlohmann::json::object();
    for (const auto& [lemma, counts] : model.stats().words)
        words[lemma] = {{"tf", counts.tokens}, {"df", counts.docs}};
    return {
        {"format", "teachable-nb-model"},
        {"version", 1},
        {"variant", variant_name(model.variant())},
        {"alpha", model.options().alpha},
        {"bernoulli_absence_terms", model.options().bernoulli_absence_terms},
        {"class_docs", model.stats().class_docs},
        {"class_tokens", model.stats().class_tokens},
        {"words", std::move(words)},
    };
}

NaiveBayesModel model_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format") != "teachable-nb-model" || doc.at("version") != 1)
            throw ParseError("not a version 1 naive Bayes model document");
        NBOptions options;
        options.alpha = doc.at("alpha").get<double>();
        options.bernoulli_absence_terms = doc.value("bernoulli_absence_terms", false);
        const NBVariant variant = parse_variant(doc.at("variant").get<std::string>());
        VocabularyStats stats;
        stats.class_docs = doc.at("class_docs").get<PerClass<std::uint64_t>>();
        stats.class_tokens = doc.at("class_tokens").get<PerClass<std::uint64_t>>();
        for (const auto& [lemma, entry] : doc.at("words").items()) {
            VocabularyStats::WordCounts counts;
            counts.tokens = entry.at("tf").get<PerClass<std::uint64_t>>();
            counts.docs = entry.at("df").get<PerClass<std::uint64_t>>();
            stats.words.emplace(lemma, counts);
        }
        return NaiveBayesModel::from_stats(std::move(stats), variant, options);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what());
    }
}

void save_model(const NaiveBayesModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path.string());
    out << model_to_json(model).dump() << '\n';
}

NaiveBayesModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    try {
        return model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in model file: ") + e.what());
    }
}

}  // namespace teachable
