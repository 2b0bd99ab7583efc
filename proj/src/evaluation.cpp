#include "teachable/evaluation.hpp"

#include "teachable/dialog.hpp"
#include "teachable/errors.hpp"
#include "teachable/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace teachable {

namespace {

constexpr std::string_view kSimulatedTs = "1970-01-01T00:00:00.000Z";

const EmbeddingStore& no_vectors() {
    static const EmbeddingStore empty(1);
    return empty;
}

double ratio(double a, double b) { return b > 0 ? a / b : 0.0; }

// Lemmas positively associated with the class, best MI first.
std::vector<std::string> ranked_by_mi(const VocabularyStats& stats, const std::vector<std::string>& lemmas,
                                      ClassLabel label) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& lemma : lemmas) {
        if (positively_associated(stats, lemma, label))
            scored.emplace_back(mutual_information(stats, lemma, label), lemma);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> out;
    out.reserve(scored.size());
    for (auto& [mi, lemma] : scored)
        out.push_back(std::move(lemma));
    return out;
}

}  // namespace

ClassMetrics macro_metrics(std::span<const ClassLabel> predicted, std::span<const ClassLabel> gold) {
    if (predicted.size() != gold.size())
        throw ValidationError("metrics need one prediction per gold label (" + std::to_string(predicted.size()) +
                              " vs " + std::to_string(gold.size()) + ")");
    if (gold.empty())
        throw ValidationError("metrics need at least one item");
    ClassMetrics m;
    std::uint64_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ++m.confusion[class_index(gold[i])][class_index(predicted[i])];
        correct += gold[i] == predicted[i];
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        double tp = double(m.confusion[k][k]), predicted_k = 0, gold_k = 0;
        for (std::size_t j = 0; j < kNumClasses; ++j) {
            predicted_k += double(m.confusion[j][k]);
            gold_k += double(m.confusion[k][j]);
        }
        m.precision[k] = ratio(tp, predicted_k);
        m.recall[k] = ratio(tp, gold_k);
        const double pr = m.precision[k] + m.recall[k];
        m.f1[k] = pr > 0 ? 2 * m.precision[k] * m.recall[k] / pr : 0.0;
        m.macro_precision += m.precision[k] / kNumClasses;
        m.macro_recall += m.recall[k] / kNumClasses;
        m.macro_f1 += m.f1[k] / kNumClasses;
    }
    m.accuracy = double(correct) / double(gold.size());
    return m;
}

nlohmann::json metrics_to_json(const ClassMetrics& m) {
    nlohmann::json per_class = nlohmann::json::object();
    for (ClassLabel c : kAllClasses) {
        const auto k = class_index(c);
        per_class[std::string(class_name(c))] = {
            {"precision", m.precision[k]}, {"recall", m.recall[k]}, {"f1", m.f1[k]}};
    }
    return {{"averaging", "macro"},
            {"macro_precision", m.macro_precision},
            {"macro_recall", m.macro_recall},
            {"macro_f1", m.macro_f1},
            {"accuracy", m.accuracy},
            {"per_class", per_class},
            {"confusion", m.confusion}};
}

Prediction predict_one(const KeywordStore& store, const LemmaBag& doc, const EvalSetup& setup) {
    if (setup.mode != PredictionMode::keywords_only && !setup.base)
        throw ValidationError(std::string(mode_name(setup.mode)) + " prediction needs a fitted model");
    if (setup.mode == PredictionMode::baseline)
        return setup.base->predict(doc);
    const KeywordMatcher matcher(store, setup.embeddings ? *setup.embeddings : no_vectors(), setup.interactive);
    if (setup.mode == PredictionMode::combined)
        return matcher.predict_combined(doc, *setup.base);
    const auto priors = setup.interactive.uniform_keyword_priors || !setup.base ? uniform_log_priors()
                                                                               : setup.base->log_priors();
    return matcher.predict_keywords_only(doc, priors);
}

std::vector<ClassLabel> predict_all(const KeywordStore& store, const std::vector<LabeledDocument>& docs,
                                    const EvalSetup& setup) {
    std::vector<ClassLabel> out;
    out.reserve(docs.size());
    if (setup.mode == PredictionMode::baseline) {
        if (!setup.base)
            throw ValidationError("baseline evaluation needs a fitted model");
        for (const auto& d : docs)
            out.push_back(setup.base->predict(d.lemmas).label);
        return out;
    }
    if (setup.mode == PredictionMode::combined && !setup.base)
        throw ValidationError("combined evaluation needs a fitted model");
    const KeywordMatcher matcher(store, setup.embeddings ? *setup.embeddings : no_vectors(), setup.interactive);
    const auto priors = setup.interactive.uniform_keyword_priors || !setup.base ? uniform_log_priors()
                                                                               : setup.base->log_priors();
    for (const auto& d : docs) {
        out.push_back(setup.mode == PredictionMode::combined ? matcher.predict_combined(d.lemmas, *setup.base).label
                                                             : matcher.predict_keywords_only(d.lemmas, priors).label);
    }
    return out;
}

ClassMetrics evaluate(const KeywordStore& store, const std::vector<LabeledDocument>& docs, const EvalSetup& setup) {
    std::vector<ClassLabel> gold;
    gold.reserve(docs.size());
    for (const auto& d : docs)
        gold.push_back(d.label);
    return macro_metrics(predict_all(store, docs, setup), gold);
}

std::vector<EpochPoint> epoch_curve(const SessionEventLog& log, const std::vector<LabeledDocument>& test_docs,
                                    const EvalSetup& setup) {
    std::vector<EpochPoint> curve;
    KeywordStore store;
    bool pending = false;
    const auto& events = log.events();
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        try {
            if (e.kind == EventKind::keyword) {
                store.apply(keyword_from_payload(e.payload));
                pending = true;
            } else if (e.kind == EventKind::article_advanced &&
                       parse_mode(e.payload.at("mode").get<std::string>()) == Mode::teaching) {
                curve.push_back({curve.size(), evaluate(store, test_docs, setup)});
                pending = false;
            }
        } catch (const nlohmann::json::exception& ex) {
            throw ReplayError(std::string("malformed ") + std::string(event_kind_name(e.kind)) + " event: " + ex.what(),
                              i);
        } catch (const ValidationError& ex) {
            throw ReplayError(ex.what(), i);
        }
    }
    if (pending || curve.empty())
        curve.push_back({curve.size(), evaluate(store, test_docs, setup)});
    return curve;
}

void write_curve_csv(std::ostream& out, const std::vector<EpochPoint>& curve) {
    out << "article_index,macro_precision,macro_recall,macro_f1\n";
    char line[128];
    for (const auto& p : curve) {
        std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f\n", p.article_index, p.metrics.macro_precision,
                      p.metrics.macro_recall, p.metrics.macro_f1);
        out << line;
    }
}

std::string curve_csv(const std::vector<EpochPoint>& curve) {
    std::ostringstream out;
    write_curve_csv(out, curve);
    return out.str();
}

double f1_trend(const std::vector<EpochPoint>& curve) {
    if (curve.size() < 2)
        return 0.0;
    double mx = 0, my = 0;
    for (const auto& p : curve) {
        mx += double(p.article_index);
        my += p.metrics.macro_f1;
    }
    mx /= double(curve.size());
    my /= double(curve.size());
    double sxy = 0, sxx = 0;
    for (const auto& p : curve) {
        sxy += (double(p.article_index) - mx) * (p.metrics.macro_f1 - my);
        sxx += (double(p.article_index) - mx) * (double(p.article_index) - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

double mutual_information(const VocabularyStats& stats, std::string_view lemma, ClassLabel label) {
    const double n = double(stats.total_docs());
    const auto* w = stats.find(lemma);
    if (!w || n == 0)
        return 0.0;
    const auto k = class_index(label);
    double df = 0;
    for (auto d : w->docs)
        df += double(d);
    const double nc = double(stats.class_docs[k]);
    const double n11 = double(w->docs[k]);
    const double cells[2][2] = {{n - df - nc + n11, nc - n11}, {df - n11, n11}};  // [has word][in class]
    const double rows[2] = {n - df, df}, cols[2] = {n - nc, nc};
    double mi = 0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            if (cells[a][b] > 0)
                mi += cells[a][b] / n * std::log2(n * cells[a][b] / (rows[a] * cols[b]));
        }
    }
    return mi;
}

bool positively_associated(const VocabularyStats& stats, std::string_view lemma, ClassLabel label) {
    const auto* w = stats.find(lemma);
    if (!w)
        return false;
    const auto k = class_index(label);
    double df = 0;
    for (auto d : w->docs)
        df += double(d);
    // n11 / nc > df / n, cross-multiplied
    return double(w->docs[k]) * double(stats.total_docs()) > df * double(stats.class_docs[k]);
}

std::string_view teacher_name(TeacherKind kind) noexcept {
    switch (kind) {
    case TeacherKind::oracle_mi: return "oracle_mi";
    case TeacherKind::random: return "random";
    case TeacherKind::adversarial: return "adversarial";
    }
    return "oracle_mi";
}

TeacherKind parse_teacher(std::string_view text) {
    for (auto k : {TeacherKind::oracle_mi, TeacherKind::random, TeacherKind::adversarial}) {
        if (teacher_name(k) == text)
            return k;
    }
    throw ValidationError("unknown teacher strategy '" + std::string(text) + "'");
}

SessionEventLog simulate_teacher(const TeacherStrategy& strategy, const std::vector<LabeledDocument>& train,
                                 const std::vector<std::int64_t>& teaching_articles, const VocabularyStats& stats) {
    if (strategy.k < 1)
        throw ValidationError("a simulated teacher needs k >= 1");
    if (teaching_articles.empty())
        throw ValidationError("a simulated teacher needs at least one article");
    std::map<std::int64_t, const LabeledDocument*> by_id;
    for (const auto& d : train)
        by_id[d.id] = &d;

    SessionHeader header;
    header.session_id = "simulated-" + std::string(teacher_name(strategy.kind)) + "-" + std::to_string(strategy.seed);
    header.source = "simulated";
    header.seed = strategy.seed;
    header.created_at = std::string(kSimulatedTs);
    header.teaching_articles = teaching_articles;
    header.config = {{"strategy", teacher_name(strategy.kind)}, {"k", strategy.k}};
    SessionEventLog log(std::move(header));

    PerClass<std::vector<std::string>> vocabulary_ranked;
    if (strategy.kind == TeacherKind::adversarial) {
        std::vector<std::string> vocab;
        for (const auto& [lemma, counts] : stats.words)
            vocab.push_back(lemma);
        for (ClassLabel c : kAllClasses)
            vocabulary_ranked[class_index(c)] = ranked_by_mi(stats, vocab, c);
    }

    std::mt19937_64 rng(strategy.seed);
    std::set<std::string> taught;
    std::uint64_t sequence = 0;
    for (std::size_t i = 0; i < teaching_articles.size(); ++i) {
        const auto id = teaching_articles[i];
        const auto it = by_id.find(id);
        if (it == by_id.end())
            throw ValidationError("teaching article " + std::to_string(id) + " is not in the training split");
        const auto& doc = *it->second;
        std::vector<std::string> lemmas;
        for (const auto& [lemma, n] : doc.lemmas)
            lemmas.push_back(lemma);

        std::vector<std::string> chosen;
        KeywordOrigin origin = KeywordOrigin::internal_text;
        switch (strategy.kind) {
        case TeacherKind::oracle_mi:
            chosen = ranked_by_mi(stats, lemmas, doc.label);
            break;
        case TeacherKind::random:
            seeded_shuffle(lemmas, rng);
            chosen = std::move(lemmas);
            break;
        case TeacherKind::adversarial: {
            std::vector<ClassLabel> others;
            for (ClassLabel c : kAllClasses) {
                if (c != doc.label)
                    others.push_back(c);
            }
            const ClassLabel decoy = others[uniform_below(rng, others.size())];
            for (const auto& lemma : vocabulary_ranked[class_index(decoy)]) {
                if (chosen.size() == strategy.k)
                    break;
                if (!taught.count(lemma) && !positively_associated(stats, lemma, doc.label))
                    chosen.push_back(lemma);
            }
            origin = KeywordOrigin::external;
            break;
        }
        }
        if (chosen.size() > strategy.k)
            chosen.resize(strategy.k);
        for (const auto& lemma : chosen) {
            taught.insert(lemma);
            const KeywordRecord record{lemma, doc.label, KeywordPolarity::relevant, origin, sequence++};
            log.append(EventKind::keyword, i, keyword_payload(record, id, lemma), std::string(kSimulatedTs));
        }
        const std::size_t next = (i + 1) % teaching_articles.size();
        log.append(EventKind::article_advanced, i,
                   {{"mode", "teaching"}, {"article_id", teaching_articles[next]}, {"teaching_index", next}},
                   std::string(kSimulatedTs));
    }
    return log;
}

std::vector<std::int64_t> balanced_article_ids(const std::vector<LabeledDocument>& docs, std::size_t per_class,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> out;
    for (ClassLabel c : kAllClasses) {
        std::vector<std::int64_t> pool;
        for (const auto& d : docs) {
            if (d.label == c)
                pool.push_back(d.id);
        }
        if (pool.size() < per_class)
            throw ValidationError("only " + std::to_string(pool.size()) + " " + std::string(class_name(c)) +
                                  " documents for " + std::to_string(per_class) + " per class");
        seeded_shuffle(pool, rng);
        out.insert(out.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(per_class));
    }
    seeded_shuffle(out, rng);
    return out;
}

TeacherLogs simulate_panel(const std::vector<LabeledDocument>& train, const TeacherPanel& panel) {
    VocabularyStats stats;
    for (const auto& d : train)
        stats.add(d.lemmas, d.label);
    TeacherLogs logs;
    const auto articles = balanced_article_ids(train, panel.per_class, panel.seed);
    logs.best.push_back(simulate_teacher({TeacherKind::oracle_mi, panel.k, panel.seed}, train, articles, stats));
    for (std::size_t i = 0; i < panel.adversarial; ++i) {
        const std::uint64_t seed = panel.seed + 1 + i;
        logs.worst.push_back(simulate_teacher({TeacherKind::adversarial, panel.k, seed}, train,
                                              balanced_article_ids(train, panel.per_class, seed), stats));
    }
    logs.all = logs.best;
    logs.all.insert(logs.all.end(), logs.worst.begin(), logs.worst.end());
    return logs;
}

BenchmarkReport run_benchmark(const CorpusSplit& corpus, const TeacherLogs& logs, const EmbeddingStore& embeddings,
                              const BenchmarkConfig& config) {
    const auto bernoulli = NaiveBayesModel::fit(corpus.train, NBVariant::bernoulli, config.bernoulli);
    const auto multinomial = NaiveBayesModel::fit(corpus.train, NBVariant::multinomial, config.multinomial);

    auto merged = [](const std::vector<SessionEventLog>& group) {
        std::vector<KeywordStore> stores;
        for (const auto& log : group)
            stores.push_back(replay_keywords(log));
        return merge_stores(stores);
    };
    const KeywordStore empty;
    const KeywordStore best = merged(logs.best), worst = merged(logs.worst), all = merged(logs.all);

    struct Job {
        std::string condition, model;
        const KeywordStore* store;
        const NaiveBayesModel* base;
        PredictionMode mode;
    };
    const std::vector<Job> jobs = {
        {"Without Teachers (Baseline)", "Bernoulli Naive Bayes", &empty, &bernoulli, PredictionMode::baseline},
        {"Without Teachers (Baseline)", "Multinomial Naive Bayes", &empty, &multinomial, PredictionMode::baseline},
        {"Best Teacher", "Interactive Bernoulli Naive Bayes", &best, &bernoulli, PredictionMode::combined},
        {"Best Teacher", "Interactive Multinomial Naive Bayes", &best, &multinomial, PredictionMode::combined},
        {"Worst Teacher", "Interactive Bernoulli Naive Bayes", &worst, &bernoulli, PredictionMode::combined},
        {"Worst Teacher", "Interactive Multinomial Naive Bayes", &worst, &multinomial, PredictionMode::combined},
        {"All Teachers", "Interactive Bernoulli Naive Bayes", &all, &bernoulli, PredictionMode::combined},
        {"All Teachers", "Interactive Multinomial Naive Bayes", &all, &multinomial, PredictionMode::combined},
    };
    std::vector<std::future<ClassMetrics>> results;
    for (const auto& job : jobs) {
        results.push_back(std::async(std::launch::async, [&, job] {
            EvalSetup setup{job.mode, &embeddings, config.interactive, job.base};
            return evaluate(*job.store, corpus.test, setup);
        }));
    }
    BenchmarkReport report;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        report.rows.push_back({jobs[i].condition, jobs[i].model, results[i].get()});
    return report;
}

nlohmann::json report_to_json(const BenchmarkReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"condition", r.condition}, {"model", r.model}, {"metrics", metrics_to_json(r.metrics)}});
    return {{"averaging", "macro"}, {"rows", rows}};
}

std::string format_report(const BenchmarkReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-28s  %-36s  %9s  %6s  %8s\n", "Condition", "Model", "Precision", "Recall",
                  "F1-Score");
    out << line;
    std::string last;
    for (const auto& r : report.rows) {
        std::snprintf(line, sizeof line, "%-28s  %-36s  %9.4f  %6.4f  %8.4f\n",
                      r.condition == last ? "" : r.condition.c_str(), r.model.c_str(), r.metrics.macro_precision,
                      r.metrics.macro_recall, r.metrics.macro_f1);
        out << line;
        last = r.condition;
    }
    out << "(macro-averaged over the four classes)\n";
    return out.str();
}

}  // namespace teachable
