#!/usr/bin/env python3
"""Reference macro F1 for the two naive Bayes baselines, computed with numpy
from the lemma bags printed by `teachable lemmas`.

    build/tools/teachable lemmas --train tests/data/desk_train.csv \
        --test tests/data/desk_test.csv -o /tmp/bags.tsv
    python3 scripts/reference_baselines.py /tmp/bags.tsv
"""

import sys

import numpy as np


def read_bags(path):
    splits = {"train": [], "test": []}
    with open(path, encoding="utf-8") as f:
        for line in f:
            split, label, bag = line.rstrip("\n").split("\t")
            words = {}
            for item in bag.split(" ") if bag else []:
                w, n = item.rsplit(":", 1)
                words[w] = int(n)
            splits[split].append((int(label) - 1, words))
    return splits


def macro_f1(pred, gold, k=4):
    f1 = []
    for c in range(k):
        tp = np.sum((pred == c) & (gold == c))
        fp = np.sum((pred == c) & (gold != c))
        fn = np.sum((pred != c) & (gold == c))
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1.append(2 * p * r / (p + r) if p + r else 0.0)
    return float(np.mean(f1))


def argmax_low(scores):
    # lowest class wins within 1e-10 relative
    best = scores.max(axis=1, keepdims=True)
    tol = 1e-10 * np.maximum(1.0, np.abs(best))
    return np.argmax(scores >= best - tol, axis=1)


def main():
    splits = read_bags(sys.argv[1])
    alpha = 1.0
    train, test = splits["train"], splits["test"]
    vocab = sorted({w for _, bag in train for w in bag})
    index = {w: i for i, w in enumerate(vocab)}
    V = len(vocab)

    counts = np.zeros((4, V))
    df = np.zeros((4, V))
    docs = np.zeros(4)
    for c, bag in train:
        docs[c] += 1
        for w, n in bag.items():
            counts[c, index[w]] += n
            df[c, index[w]] += 1
    log_prior = np.log(docs / docs.sum())
    totals = counts.sum(axis=1)
    log_mn = np.log((counts + alpha) / (totals[:, None] + alpha * V))
    log_mn_unseen = np.log(alpha / (totals + alpha * V))
    p_bn = (df + alpha) / (docs[:, None] + 2 * alpha)
    log_bn = np.log(p_bn)
    log_bn_unseen = np.log(alpha / (docs + 2 * alpha))
    log_bn_absent_all = np.log1p(-p_bn).sum(axis=1)

    gold = np.array([c for c, _ in test])
    mn, bn, bn_abs = [], [], []
    for _, bag in test:
        s_mn = log_prior.copy()
        s_bn = log_prior.copy()
        s_abs = log_prior + log_bn_absent_all
        for w, n in bag.items():
            i = index.get(w)
            if i is None:
                s_mn += n * log_mn_unseen
                s_bn += log_bn_unseen
                s_abs += log_bn_unseen
            else:
                s_mn += n * log_mn[:, i]
                s_bn += log_bn[:, i]
                s_abs += log_bn[:, i] - np.log1p(-p_bn[:, i])
        mn.append(s_mn)
        bn.append(s_bn)
        bn_abs.append(s_abs)
    print(f"multinomial {macro_f1(argmax_low(np.array(mn)), gold):.6f}")
    print(f"bernoulli {macro_f1(argmax_low(np.array(bn)), gold):.6f}")
    print(f"bernoulli_absence {macro_f1(argmax_low(np.array(bn_abs)), gold):.6f}")


if __name__ == "__main__":
    main()
