#include "teachable/errors.hpp"
#include "teachable/evaluation.hpp"
#include "teachable/http_server.hpp"
#include "teachable/service.hpp"
#include "teachable/transcript.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace teachable;

namespace {

struct CorpusOptions {
    std::string data_dir = TEACHABLE_DEFAULT_DATA_DIR;
    std::string train;
    std::string test;
    std::size_t train_per_class = 0;
    std::size_t test_per_class = 0;
    std::uint64_t subsample_seed = 20200427;
    bool strict_counts = false;

    void add_to(CLI::App& app) {
        app.add_option("--data-dir", data_dir, "stopwords, lemma dictionary, dialog tree and intent rules")
            ->check(CLI::ExistingDirectory);
        app.add_option("--train", train, "AG News train.csv")->required()->check(CLI::ExistingFile);
        app.add_option("--test", test, "AG News test.csv")->required()->check(CLI::ExistingFile);
        app.add_option("--train-per-class", train_per_class, "class-balanced subsample of the training split");
        app.add_option("--test-per-class", test_per_class, "class-balanced subsample of the test split");
        app.add_option("--subsample-seed", subsample_seed);
        app.add_flag("--strict-counts", strict_counts, "require the canonical AG News sizes");
    }

    PipelineConfig pipeline() const { return PipelineConfig::load(data_dir); }

    CorpusSplit raw() const {
        auto split = load_ag_news(train, test, LoadOptions{strict_counts});
        if (train_per_class || test_per_class) {
            const auto counts_train = class_counts(split.train);
            const auto counts_test = class_counts(split.test);
            const auto all = [](const PerClass<std::size_t>& c) { return *std::min_element(c.begin(), c.end()); };
            split = subsample(split,
                              SubsampleSizes{train_per_class ? train_per_class : all(counts_train),
                                             test_per_class ? test_per_class : all(counts_test)},
                              subsample_seed);
        }
        return split;
    }

    CorpusSplit load(const PipelineConfig& p) const { return preprocess_corpus(raw(), p); }
};

EmbeddingStore load_vectors(const std::string& path) {
    if (path.ends_with(".bin"))
        return load_binary_embeddings(path);
    return load_text_embeddings(path);
}

struct ScoringOptions {
    std::string vectors;
    double tau = SimilarityThreshold::kDefault;
    double keyword_alpha = 0.5;
    std::string untaught = "neutral";
    bool base_priors = false;

    void add_to(CLI::App& app, bool vectors_required = true) {
        auto* v = app.add_option("--vectors", vectors, "word vectors (.txt word2vec text or .bin)");
        if (vectors_required)
            v->required();
        v->check(CLI::ExistingFile);
        app.add_option("--tau", tau, "cosine similarity threshold");
        app.add_option("--keyword-alpha", keyword_alpha, "keyword likelihood smoothing");
        app.add_option("--untaught", untaught, "neutral or smoothed factor for classes without keywords")
            ->check(CLI::IsMember({"neutral", "smoothed"}));
        app.add_flag("--base-priors", base_priors, "keywords_only uses corpus priors instead of uniform ones");
    }

    InteractiveConfig interactive() const {
        InteractiveConfig c;
        c.tau = SimilarityThreshold(tau);
        c.keyword_alpha = keyword_alpha;
        c.untaught_classes = parse_untaught(untaught);
        c.uniform_keyword_priors = !base_priors;
        return c;
    }
};

struct NBFlags {
    double alpha = 1.0;
    bool absence = false;

    void add_to(CLI::App& app) {
        app.add_option("--nb-alpha", alpha, "Laplace smoothing of the corpus likelihoods");
        app.add_flag("--bernoulli-absence", absence, "Bernoulli scoring includes absent vocabulary words");
    }
    NBOptions options() const { return NBOptions{alpha, absence}; }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw std::runtime_error("cannot write " + path);
}

HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server)
        g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversational teaching of a naive Bayes news classifier"};
    app.require_subcommand(1);

    // serve
    auto* serve = app.add_subcommand("serve", "run the /v1/ HTTP API");
    CorpusOptions serve_corpus;
    ScoringOptions serve_scoring;
    NBFlags serve_nb;
    std::string host = "127.0.0.1", log_dir = "sessions", serve_mode = "combined", serve_variant = "multinomial";
    int port = 8080;
    std::size_t sample_n = 200;
    serve_corpus.add_to(*serve);
    serve_scoring.add_to(*serve);
    serve_nb.add_to(*serve);
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    serve->add_option("--log-dir", log_dir, "session logs (JSONL), replayed on start");
    serve->add_option("--prediction-mode", serve_mode)->check(CLI::IsMember({"baseline", "keywords_only", "combined"}));
    serve->add_option("--variant", serve_variant, "baseline model")->check(CLI::IsMember({"multinomial", "bernoulli"}));
    serve->add_option("--sample-n", sample_n, "default metrics sample size");

    // baseline
    auto* baseline = app.add_subcommand("baseline", "fit both naive Bayes variants and report macro metrics");
    CorpusOptions base_corpus;
    NBFlags base_nb;
    bool base_json = false;
    base_corpus.add_to(*baseline);
    base_nb.add_to(*baseline);
    baseline->add_flag("--json", base_json);

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "baseline and teacher rows with simulated best, worst and all teachers");
    CorpusOptions bench_corpus;
    ScoringOptions bench_scoring;
    NBFlags bench_nb;
    TeacherPanel panel;
    bool bench_json = false;
    bench_corpus.add_to(*bench);
    bench_scoring.add_to(*bench);
    bench_nb.add_to(*bench);
    bench->add_option("--articles-per-class", panel.per_class);
    bench->add_option("-k,--keywords-per-article", panel.k);
    bench->add_option("--adversarial", panel.adversarial, "number of adversarial teachers");
    bench->add_option("--seed", panel.seed);
    bench->add_flag("--json", bench_json);

    // simulate
    auto* sim = app.add_subcommand("simulate", "write a simulated teacher log");
    CorpusOptions sim_corpus;
    std::string strategy = "oracle_mi", sim_out = "-";
    std::size_t sim_k = 3, sim_per_class = 5;
    std::uint64_t sim_seed = 20200427;
    sim_corpus.add_to(*sim);
    sim->add_option("--strategy", strategy)->check(CLI::IsMember({"oracle_mi", "random", "adversarial"}));
    sim->add_option("-k,--keywords-per-article", sim_k);
    sim->add_option("--articles-per-class", sim_per_class);
    sim->add_option("--seed", sim_seed);
    sim->add_option("-o,--out", sim_out);

    // replay
    auto* replay = app.add_subcommand("replay", "per-article learning curve of a session log as CSV");
    CorpusOptions replay_corpus;
    ScoringOptions replay_scoring;
    NBFlags replay_nb;
    std::string replay_log, replay_out = "-", replay_mode = "keywords_only", replay_variant = "multinomial";
    replay_corpus.add_to(*replay);
    replay_scoring.add_to(*replay);
    replay_nb.add_to(*replay);
    replay->add_option("--log", replay_log)->required()->check(CLI::ExistingFile);
    replay->add_option("-o,--out", replay_out);
    replay->add_option("--prediction-mode", replay_mode)->check(CLI::IsMember({"keywords_only", "combined"}));
    replay->add_option("--variant", replay_variant)->check(CLI::IsMember({"multinomial", "bernoulli"}));

    // eval
    auto* eval = app.add_subcommand("eval", "macro metrics of one configuration");
    CorpusOptions eval_corpus;
    ScoringOptions eval_scoring;
    NBFlags eval_nb;
    std::vector<std::string> eval_logs;
    std::string eval_mode = "keywords_only", eval_variant = "multinomial";
    eval_corpus.add_to(*eval);
    eval_scoring.add_to(*eval, false);
    eval_nb.add_to(*eval);
    eval->add_option("--log", eval_logs, "keyword logs, merged in order (none: empty store)")->check(CLI::ExistingFile);
    eval->add_option("--prediction-mode", eval_mode)->check(CLI::IsMember({"baseline", "keywords_only", "combined"}));
    eval->add_option("--variant", eval_variant)->check(CLI::IsMember({"multinomial", "bernoulli"}));

    // transcript
    auto* tr = app.add_subcommand("transcript", "regenerate the agent lines of a dialog script");
    CorpusOptions tr_corpus;
    std::string tr_vectors, tr_script, tr_out = "-";
    tr_corpus.add_to(*tr);
    tr->add_option("--vectors", tr_vectors, "vocabulary the agent recognizes besides the corpus")->check(CLI::ExistingFile);
    tr->add_option("--script", tr_script)->required()->check(CLI::ExistingFile);
    tr->add_option("-o,--out", tr_out);

    // lemmas
    auto* lem = app.add_subcommand("lemmas", "dump preprocessed documents as split, class code, lemma:count");
    CorpusOptions lem_corpus;
    std::string lem_out = "-";
    lem_corpus.add_to(*lem);
    lem->add_option("-o,--out", lem_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            const auto t0 = std::chrono::steady_clock::now();
            auto resources = std::make_shared<const ServiceResources>(
                serve_corpus.pipeline(), serve_corpus.raw(), load_vectors(serve_scoring.vectors),
                bundled_conversation_tree(serve_corpus.data_dir), bundled_intent_rules(serve_corpus.data_dir),
                parse_variant(serve_variant), serve_nb.options());
            ServiceConfig config;
            config.log_dir = log_dir;
            config.prediction_mode = parse_prediction_mode(serve_mode);
            config.interactive = serve_scoring.interactive();
            config.default_sample_n = sample_n;
            SessionManager sessions(resources, config);
            HttpServer server(sessions);
            const int bound = server.bind(host, port);
            if (bound < 0) {
                std::cerr << "cannot bind " << host << ":" << port << "\n";
                return 1;
            }
            std::cerr << "loaded " << resources->corpus().train.size() << " train / " << resources->corpus().test.size()
                      << " test articles in " << seconds_since(t0) << " s; " << sessions.recovered_sessions()
                      << " sessions recovered from " << log_dir << "\nlistening on http://" << host << ":" << bound
                      << "/v1/\n";
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.listen_after_bind();
            g_server = nullptr;
            return 0;
        }

        if (*baseline) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto split = base_corpus.load(base_corpus.pipeline());
            nlohmann::json out = nlohmann::json::object();
            for (const auto variant : {NBVariant::bernoulli, NBVariant::multinomial}) {
                const auto model = NaiveBayesModel::fit(split.train, variant, base_nb.options());
                const EvalSetup setup{PredictionMode::baseline, nullptr, {}, &model};
                out[std::string(variant_name(variant))] = metrics_to_json(evaluate({}, split.test, setup));
            }
            out["seconds"] = seconds_since(t0);
            if (base_json) {
                std::cout << out.dump(2) << "\n";
            } else {
                for (const auto* v : {"bernoulli", "multinomial"}) {
                    const auto& m = out[v];
                    std::printf("%-12s macro P %.4f  R %.4f  F1 %.4f  accuracy %.4f\n", v, m["macro_precision"].get<double>(),
                                m["macro_recall"].get<double>(), m["macro_f1"].get<double>(), m["accuracy"].get<double>());
                }
                std::printf("%zu train / %zu test articles, %.1f s\n", split.train.size(), split.test.size(),
                            out["seconds"].get<double>());
            }
            return 0;
        }

        if (*bench) {
            const auto split = bench_corpus.load(bench_corpus.pipeline());
            const auto vectors = load_vectors(bench_scoring.vectors);
            const auto logs = simulate_panel(split.train, panel);
            BenchmarkConfig config{bench_nb.options(), bench_nb.options(), bench_scoring.interactive()};
            const auto report = run_benchmark(split, logs, vectors, config);
            if (bench_json)
                std::cout << report_to_json(report).dump(2) << "\n";
            else
                std::cout << format_report(report);
            return 0;
        }

        if (*sim) {
            const auto split = sim_corpus.load(sim_corpus.pipeline());
            VocabularyStats stats;
            for (const auto& d : split.train)
                stats.add(d.lemmas, d.label);
            const auto articles = balanced_article_ids(split.train, sim_per_class, sim_seed);
            const auto log =
                simulate_teacher({parse_teacher(strategy), sim_k, sim_seed}, split.train, articles, stats);
            write_output(sim_out, to_jsonl(log));
            return 0;
        }

        if (*replay) {
            const auto split = replay_corpus.load(replay_corpus.pipeline());
            const auto vectors = load_vectors(replay_scoring.vectors);
            const auto log = load_jsonl(replay_log);
            std::optional<NaiveBayesModel> base;
            const auto mode = parse_prediction_mode(replay_mode);
            if (mode == PredictionMode::combined)
                base = NaiveBayesModel::fit(split.train, parse_variant(replay_variant), replay_nb.options());
            const EvalSetup setup{mode, &vectors, replay_scoring.interactive(), base ? &*base : nullptr};
            write_output(replay_out, curve_csv(epoch_curve(log, split.test, setup)));
            return 0;
        }

        if (*eval) {
            const auto split = eval_corpus.load(eval_corpus.pipeline());
            const auto mode = parse_prediction_mode(eval_mode);
            std::optional<EmbeddingStore> vectors;
            if (!eval_scoring.vectors.empty())
                vectors = load_vectors(eval_scoring.vectors);
            else if (mode != PredictionMode::baseline && !eval_logs.empty())
                throw ValidationError("--vectors is required to score keywords");
            std::vector<KeywordStore> stores;
            for (const auto& path : eval_logs)
                stores.push_back(replay_keywords(load_jsonl(path)));
            const auto store = merge_stores(stores);
            std::optional<NaiveBayesModel> base;
            if (mode != PredictionMode::keywords_only || eval_scoring.base_priors)
                base = NaiveBayesModel::fit(split.train, parse_variant(eval_variant), eval_nb.options());
            const EvalSetup setup{mode, vectors ? &*vectors : nullptr, eval_scoring.interactive(), base ? &*base : nullptr};
            nlohmann::json out = metrics_to_json(evaluate(store, split.test, setup));
            out["prediction_mode"] = mode_name(mode);
            out["keywords"] = store.records().size();
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*lem) {
            const auto split = lem_corpus.load(lem_corpus.pipeline());
            std::ostringstream out;
            for (const auto& [name, docs] : {std::pair{"train", &split.train}, std::pair{"test", &split.test}}) {
                for (const auto& d : *docs) {
                    out << name << '\t' << class_code(d.label) << '\t';
                    bool first = true;
                    for (const auto& [lemma, n] : d.lemmas) {
                        out << (first ? "" : " ") << lemma << ':' << n;
                        first = false;
                    }
                    out << '\n';
                }
            }
            write_output(lem_out, out.str());
            return 0;
        }

        if (*tr) {
            const auto pipeline = tr_corpus.pipeline();
            const auto split = tr_corpus.load(pipeline);
            std::unordered_set<std::string> lexicon;
            for (const auto* docs : {&split.train, &split.test}) {
                for (const auto& d : *docs) {
                    for (const auto& [lemma, n] : d.lemmas)
                        lexicon.insert(lemma);
                }
            }
            if (!tr_vectors.empty()) {
                const auto vectors = load_vectors(tr_vectors);
                for (const auto& w : vectors.words())
                    lexicon.insert(lemmatize(w, pipeline));
            }
            const auto model = NaiveBayesModel::fit(split.train, NBVariant::multinomial);
            std::map<std::int64_t, const LabeledDocument*> train, test;
            for (const auto& d : split.train)
                train[d.id] = &d;
            for (const auto& d : split.test)
                test[d.id] = &d;
            const auto find = [](const auto& index, std::int64_t id) {
                const auto it = index.find(id);
                if (it == index.end())
                    throw NotFound("no article " + std::to_string(id));
                return it->second;
            };
            DialogEnvironment env;
            env.pipeline = &pipeline;
            env.lexicon = &lexicon;
            env.category = [&](std::int64_t id) { return find(train, id)->label; };
            env.title = [&](std::int64_t id) { return find(test, id)->title; };
            env.classify = [&](std::int64_t id) -> std::optional<ClassLabel> {
                return model.predict(find(test, id)->lemmas).label;
            };
            const auto text = run_transcript(read_text_file(tr_script), bundled_conversation_tree(tr_corpus.data_dir),
                                             bundled_intent_rules(tr_corpus.data_dir), env);
            write_output(tr_out, text);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
