#pragma once

// Slow, direct re-implementations used as test oracles. They share no code
// with the library beyond the ClassLabel enum.

#include "teachable/class_label.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace teachable::oracle {

struct Doc {
    int cls = 0;  // 0..3
    std::map<std::string, int> words;
};

struct Keyword {
    std::string lemma;
    int cls = 0;
    bool relevant = true;
};

using Vectors = std::map<std::string, std::vector<double>>;
using Scores = std::array<double, 4>;

// Highest score; anything within 1e-10 relative of the leader counts as a
// tie and the lower class wins.
inline int argmax(const Scores& s) {
    double top = s[0];
    for (double x : s)
        top = std::max(top, x);
    for (int k = 0; k < 4; ++k) {
        if (top - s[k] <= 1e-10 * std::max(1.0, std::abs(top)))
            return k;
    }
    return 0;
}

inline std::set<std::string> vocabulary(const std::vector<Doc>& docs) {
    std::set<std::string> v;
    for (const auto& d : docs) {
        for (const auto& [w, n] : d.words) {
            if (n > 0)
                v.insert(w);
        }
    }
    return v;
}

inline double prior(const std::vector<Doc>& docs, int k) {
    int n = 0;
    for (const auto& d : docs)
        n += d.cls == k;
    return double(n) / double(docs.size());
}

inline double multinomial_p(const std::vector<Doc>& docs, const std::string& w, int k, double alpha) {
    double count = 0, total = 0;
    for (const auto& d : docs) {
        if (d.cls != k)
            continue;
        for (const auto& [x, n] : d.words) {
            total += n;
            if (x == w)
                count += n;
        }
    }
    return (count + alpha) / (total + alpha * double(vocabulary(docs).size()));
}

inline double bernoulli_p(const std::vector<Doc>& docs, const std::string& w, int k, double alpha) {
    double df = 0, nk = 0;
    for (const auto& d : docs) {
        if (d.cls != k)
            continue;
        ++nk;
        auto it = d.words.find(w);
        if (it != d.words.end() && it->second > 0)
            ++df;
    }
    return (df + alpha) / (nk + 2 * alpha);
}

/// Naive Bayes log score as an explicit product per token (multinomial) or per present
/// vocabulary word (Bernoulli), logged at the end.
inline Scores naive_bayes(const std::vector<Doc>& train, const std::map<std::string, int>& doc, bool bernoulli,
                          double alpha = 1.0) {
    const auto vocab = vocabulary(train);
    Scores s{};
    for (int k = 0; k < 4; ++k) {
        long double product = prior(train, k);
        for (const auto& [w, n] : doc) {
            if (bernoulli) {
                if (n > 0 && vocab.count(w))
                    product *= bernoulli_p(train, w, k, alpha);
            } else {
                for (int i = 0; i < n; ++i)
                    product *= multinomial_p(train, w, k, alpha);
            }
        }
        s[k] = std::log(static_cast<double>(product));
    }
    return s;
}

inline double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

inline bool similar(const std::string& a, const std::string& b, const Vectors& vectors, double tau) {
    if (a == b)
        return true;
    auto x = vectors.find(a), y = vectors.find(b);
    if (x == vectors.end() || y == vectors.end())
        return false;
    return cos_sim(x->second, y->second) >= tau;
}

/// Final relevant/irrelevant sets after replaying records in order.
struct Resolved {
    std::array<std::set<std::string>, 4> relevant, irrelevant;
};

inline Resolved resolve(const std::vector<Keyword>& records) {
    Resolved r;
    for (const auto& kw : records) {
        // Later record for the same (lemma, class) replaces the earlier one.
        r.relevant[kw.cls].erase(kw.lemma);
        r.irrelevant[kw.cls].erase(kw.lemma);
        (kw.relevant ? r.relevant : r.irrelevant)[kw.cls].insert(kw.lemma);
    }
    return r;
}

/// Keyword factor for one word and class; 1 when it does not apply.
inline double keyword_factor(const Resolved& r, const std::string& w, int k, const Vectors& vectors, double tau,
                             bool smoothed_untaught = false, double alpha_s = 0.5) {
    bool any = false;
    for (const auto& set : r.relevant)
        any = any || !set.empty();
    if (!any)
        return 1.0;
    for (const auto& bad : r.irrelevant[k]) {
        if (similar(w, bad, vectors, tau))
            return 1.0;
    }
    if (r.relevant[k].empty())
        return smoothed_untaught ? alpha_s / (2 * alpha_s) : 1.0;
    double hits = 0;
    for (const auto& good : r.relevant[k])
        hits += similar(w, good, vectors, tau);
    return (hits + alpha_s) / (double(r.relevant[k].size()) + 2 * alpha_s);
}

/// Keywords-only score with uniform priors, one factor per token occurrence.
inline Scores keywords_only(const std::vector<Keyword>& records, const std::map<std::string, int>& doc,
                            const Vectors& vectors, double tau, bool smoothed_untaught = false) {
    const Resolved r = resolve(records);
    Scores s{};
    for (int k = 0; k < 4; ++k) {
        long double product = 0.25L;
        for (const auto& [w, n] : doc) {
            for (int i = 0; i < n; ++i)
                product *= keyword_factor(r, w, k, vectors, tau, smoothed_untaught);
        }
        s[k] = std::log(static_cast<double>(product));
    }
    return s;
}

/// Combined score: corpus product times keyword product.
inline Scores combined(const std::vector<Doc>& train, const std::vector<Keyword>& records,
                       const std::map<std::string, int>& doc, bool bernoulli, const Vectors& vectors, double tau,
                       bool smoothed_untaught = false) {
    const Resolved r = resolve(records);
    Scores s = naive_bayes(train, doc, bernoulli);
    for (int k = 0; k < 4; ++k) {
        long double product = 1.0L;
        for (const auto& [w, n] : doc) {
            const int times = bernoulli ? (n > 0) : n;
            for (int i = 0; i < times; ++i)
                product *= keyword_factor(r, w, k, vectors, tau, smoothed_untaught);
        }
        s[k] += std::log(static_cast<double>(product));
    }
    return s;
}

/// Random fixture within the sizes the equivalence criterion names.
struct Fixture {
    std::vector<Doc> train;
    std::vector<Keyword> keywords;
    std::map<std::string, int> doc;
    Vectors vectors;
    double tau = 0.2;
};

inline Fixture random_fixture(std::mt19937_64& rng) {
    Fixture f;
    const int vocab_size = 4 + int(rng() % 12);  // <= 15
    std::vector<std::string> vocab;
    for (int i = 0; i < vocab_size; ++i)
        vocab.push_back("w" + std::to_string(i));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const auto& w : vocab) {
        if (rng() % 5 == 0)
            continue;  // no vector
        std::vector<double> v(4);
        for (double& x : v)
            x = normal(rng);
        f.vectors[w] = v;
    }
    const int ndocs = 4 + int(rng() % 7);  // <= 10, every class present
    for (int d = 0; d < ndocs; ++d) {
        Doc doc;
        doc.cls = d < 4 ? d : int(rng() % 4);
        const int len = 1 + int(rng() % 6);
        for (int i = 0; i < len; ++i)
            ++doc.words[vocab[rng() % vocab.size()]];
        f.train.push_back(doc);
    }
    const int nkw = int(rng() % 9);  // <= 8
    for (int i = 0; i < nkw; ++i)
        f.keywords.push_back({vocab[rng() % vocab.size()], int(rng() % 4), rng() % 4 != 0});
    const int doc_len = 1 + int(rng() % 5);  // <= 5 distinct lemmas
    for (int i = 0; i < doc_len; ++i)
        f.doc[rng() % 6 == 0 ? "unseen" + std::to_string(i) : vocab[rng() % vocab.size()]] += 1 + int(rng() % 2);
    std::uniform_real_distribution<double> tau(-0.3, 0.8);
    f.tau = tau(rng);
    return f;
}

}  // namespace teachable::oracle
