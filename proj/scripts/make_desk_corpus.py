#!/usr/bin/env python3
"""Generate the synthetic desk-scale corpus and its word-vector file.

The output mimics the AG News CSV layout (label,"title","description") and a
small 50-dimensional embedding file whose vectors cluster by topic. It exists
so the test suites can run without the real dataset or a multi-gigabyte
pretrained vector file. Output is fully determined by --seed.

    python3 scripts/make_desk_corpus.py --out tests/data/desk
"""

import argparse
import itertools
import math
import os
import random

CLASSES = {1: "World", 2: "Sports", 3: "Business", 4: "SciTech"}

# Topical lemmas per class.  Nouns get plural forms, verbs get -s/-ed/-ing
# forms when the bundled lemma rules or dictionary can undo them.
TOPIC_NOUNS = {
    1: """government minister president election vote parliament troop soldier
        army rebel militant insurgent attack bomb explosion ceasefire peace talk
        treaty summit diplomat embassy refugee crisis war conflict border
        sanction leader opposition protest protester police hostage official
        ministry weapon inspector resolution envoy region province capital
        village violence clash casualty victim aid earthquake flood cabinet
        regime coalition referendum militia guerrilla occupation withdrawal
        negotiation independence dictator coup kidnapper prisoner court judge
        trial massacre genocide convoy checkpoint curfew ambassador senator
        commander palestinian""",
    2: """game match team player coach season league goal championship title cup
        tournament victory defeat stadium fan referee quarterback pitcher inning
        touchdown striker midfielder medal athlete sprinter golfer tennis soccer
        football baseball basketball hockey cricket rugby marathon swimmer
        semifinal playoff rookie captain squad club injury knee ankle hamstring
        roster draft streak overtime penalty kick rebound homer yard court ball
        bat racket lap podium trophy champion rival opener derby ace slam
        outfielder linebacker goalkeeper cyclist boxer""",
    3: """company share stock market investor profit revenue sale price oil barrel
        economy economist growth inflation rate interest bank loan debt deal
        merger acquisition bid offer shareholder dividend forecast analyst index
        trader dollar euro yen currency bond yield retailer consumer job
        unemployment factory export import tariff airline fuel insurer executive
        firm industry supplier manufacturer budget deficit tax pension fund
        bankruptcy layoff worker mortgage wholesaler stake takeover regulator
        quarter outlook margin investment asset lender brokerage""",
    4: """software computer internet web site user network server chip processor
        technology device phone wireless broadband search engine browser virus
        worm hacker security spam email download gadget laptop desktop program
        programmer developer code version patch upgrade database storage disk
        memory space spacecraft rocket satellite shuttle astronaut planet moon
        orbit telescope scientist researcher experiment gene protein cell fossil
        climate robot camera screen video console player researcher galaxy
        comet asteroid genome microprocessor handset""",
}

TOPIC_VERBS = {
    1: "kill attack vote elect protest negotiate condemn bomb arrest accuse warn urge invade",
    2: "play score win beat defeat rally kick pitch tackle clinch extend trail sweep",
    3: "rise fall climb slip jump drop gain report earn acquire merge invest trade",
    4: "launch download develop discover hack upgrade search browse orbit compute install",
}

PROPER = {
    1: "Iraq Baghdad Afghanistan Kabul Israel Gaza Iran Sudan Darfur Ukraine Russia Putin Arafat Sharon Najaf Fallujah UN NATO Pakistan Korea",
    2: "Yankees Olympics Athens NFL NBA NHL Chelsea Arsenal Ferrari Schumacher Federer Agassi Woods Singh Phelps",
    3: "Nasdaq Dow Fed Greenspan OPEC Wal-Mart Boeing Airbus GM Ford Yukos Enron Citigroup Oracle",
    4: "Microsoft Google Apple IBM Intel NASA Sony Nokia Yahoo AMD Linux Firefox Mozilla iPod Cassini",
}

# Words that never occur in the corpus but have vectors: material for the
# "words not in the text" teaching heuristic.
EXTERNAL_ONLY = {
    1: "diplomacy sovereignty uprising humanitarian geopolitics insurgency",
    2: "sportsmanship scoreboard locker halftime umpire dugout",
    3: "commerce entrepreneur liquidity valuation profitability conglomerate",
    4: "algorithm silicon bandwidth astronomy physics semiconductor",
}

MASS_NOUNS = set("""aid peace violence independence occupation withdrawal tennis soccer football
    baseball basketball hockey cricket rugby overtime economy growth inflation unemployment fuel
    debt interest software internet technology security spam storage memory space climate news
    life people""".split())

GENERAL_NOUNS = """year week day month time people percent number plan move part end
    start home city country state group source statement spokesman director
    chief head member office family life man woman child world issue question
    point case system service center way area result change level program
    record deal release lead series news morning report""".split()

GENERAL_VERBS = """announce say tell make take give get come go see know show look need want
    try use find keep call ask hold turn bring begin expect continue remain
    face meet seek help hope lead set put run add include follow plan move""".split()

GENERAL_ADJ = """new first last second third major big large small high low top early late
    former likely local national international next several recent""".split()

GENERAL_OTHER = "monday tuesday wednesday thursday friday saturday sunday today tomorrow reuters ap".split()

STOPWORDS_USED = """the a an of to in on for with at by from and or but as is was were be
    been has have had will would could should its their his her it they he she
    this that these those after before over under about into than more most
    also not no up out""".split()


def load_lemma_dictionary(path):
    forms = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            surface, pos, lemma = line.split("\t")
            forms.setdefault((lemma, pos), []).append(surface)
    return forms


def plural(noun, dictionary=None):
    if dictionary and dictionary.get((noun, "noun")):
        return dictionary[(noun, "noun")][0]
    if noun.endswith(("s", "x", "ch", "sh")):
        return noun + "es"
    if noun.endswith("y") and noun[-2] not in "aeiou":
        return noun[:-1] + "ies"
    return noun + "s"


def verb_forms(verb, dictionary):
    out = [verb]
    listed = dictionary.get((verb, "verb"), [])
    out.extend(listed)
    if not verb.endswith("e"):
        out.append(plural(verb))
    if listed:
        return out
    if verb.endswith("e"):
        return out
    if verb.endswith("y") and verb[-2] not in "aeiou":
        out.append(verb[:-1] + "ied")
        out.append(verb + "ing")
        return out
    # Short consonant-vowel-consonant verbs double their final letter.
    if len(verb) <= 4 and verb[-1] not in "aeiouwxy" and verb[-2] in "aeiou" and verb[-3] not in "aeiou":
        return out
    out.append(verb + "ed")
    out.append(verb + "ing")
    return out


class Lexicon:
    """Lemmas with their surface forms, drawn with Zipf-like rank weights."""

    def __init__(self, forms_by_lemma, exponent):
        self.entries = forms_by_lemma
        weights = [1.0 / (rank + 3) ** exponent for rank in range(len(forms_by_lemma))]
        self.cumulative = list(itertools.accumulate(weights))

    def draw(self, rng):
        lemma, forms = rng.choices(self.entries, cum_weights=self.cumulative)[0]
        if len(forms) == 1 or rng.random() < 0.6:
            return forms[0]
        return rng.choice(forms[1:])


def build_lexicons(dictionary, rng):
    topical = {}
    for c in CLASSES:
        entries = []
        for n in TOPIC_NOUNS[c].split():
            forms = [n] if n in MASS_NOUNS else [n, plural(n, dictionary)]
            entries.append((n, forms))
        for v in TOPIC_VERBS[c].split():
            entries.append((v, verb_forms(v, dictionary)))
        for p in PROPER[c].split():
            entries.append((p.lower(), [p]))
        rng.shuffle(entries)
        topical[c] = Lexicon(entries, 1.0)
    general = []
    for n in GENERAL_NOUNS:
        general.append((n, [n] if n in MASS_NOUNS else [n, plural(n, dictionary)]))
    for v in GENERAL_VERBS:
        general.append((v, verb_forms(v, dictionary)))
    for a in GENERAL_ADJ + GENERAL_OTHER:
        general.append((a, [a]))
    rng.shuffle(general)
    return topical, Lexicon(general, 0.8)


def make_text(rng, label, n_words, topical, general, p_topic, p_cross):
    words = []
    others = [c for c in CLASSES if c != label]
    for _ in range(n_words):
        r = rng.random()
        if r < p_topic:
            words.append(topical[label].draw(rng))
        elif r < p_topic + p_cross:
            words.append(topical[rng.choice(others)].draw(rng))
        elif r < p_topic + p_cross + 0.33:
            words.append(rng.choice(STOPWORDS_USED))
        else:
            words.append(general.draw(rng))
    return words


def sentence(words, rng, title=False):
    out = []
    for i, w in enumerate(words):
        if title or i == 0:
            w = w[:1].upper() + w[1:]
        out.append(w)
        if not title and i + 1 < len(words) and rng.random() < 0.06:
            out[-1] += ","
    text = " ".join(out)
    return text if title else text + "."


def make_document(rng, label, topical, general, p_topic, p_cross):
    title_words = make_text(rng, label, rng.randint(4, 8), topical, general, p_topic + 0.1, p_cross)
    title = sentence(title_words, rng, title=True)
    body_parts = []
    for _ in range(rng.randint(1, 3)):
        body_parts.append(sentence(make_text(rng, label, rng.randint(9, 18), topical, general, p_topic, p_cross), rng))
    body = " ".join(body_parts)
    prefix = rng.random()
    if prefix < 0.25:
        body = "REUTERS - " + body
    elif prefix < 0.45:
        body = "AP - " + body
    if rng.random() < 0.1:
        body = body.replace(".", " \"quoted\" remark.", 1)
    return title, body


def csv_quote(s):
    return '"' + s.replace('"', '""') + '"'


def write_split(path, docs):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for label, title, body in docs:
            f.write(f"{label},{csv_quote(title)},{csv_quote(body)}\n")


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def gauss_vec(rng, dim):
    return [rng.gauss(0.0, 1.0) for _ in range(dim)]


def write_embeddings(path, rng, dim):
    centroid = {c: unit(gauss_vec(rng, dim)) for c in CLASSES}
    vectors = {}

    def topical_vec(c, sub):
        noise = unit(gauss_vec(rng, dim))
        return [0.62 * a + 0.30 * b + 0.72 * e for a, b, e in zip(centroid[c], sub, noise)]

    for c in CLASSES:
        subs = [unit(gauss_vec(rng, dim)) for _ in range(4)]
        lemmas = TOPIC_NOUNS[c].split() + TOPIC_VERBS[c].split() + [p.lower() for p in PROPER[c].split()] + EXTERNAL_ONLY[c].split()
        for lemma in lemmas:
            if lemma in vectors:
                continue
            vectors[lemma] = topical_vec(c, rng.choice(subs))
    for w in GENERAL_NOUNS + GENERAL_VERBS + GENERAL_ADJ + GENERAL_OTHER:
        if w not in vectors:
            vectors[w] = gauss_vec(rng, dim)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{len(vectors)} {dim}\n")
        for word in sorted(vectors):
            f.write(word + " " + " ".join(f"{x:.6f}" for x in vectors[word]) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True, help="output prefix, e.g. tests/data/desk")
    ap.add_argument("--lemmas", default=os.path.join(os.path.dirname(__file__), "..", "data", "lemmas.tsv"))
    ap.add_argument("--seed", type=int, default=20200427)
    ap.add_argument("--train-per-class", type=int, default=2000)
    ap.add_argument("--test-per-class", type=int, default=500)
    ap.add_argument("--p-topic", type=float, default=0.20)
    ap.add_argument("--p-cross", type=float, default=0.05)
    ap.add_argument("--dim", type=int, default=50)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    dictionary = load_lemma_dictionary(args.lemmas)
    topical, general = build_lexicons(dictionary, rng)

    for split, per_class in (("train", args.train_per_class), ("test", args.test_per_class)):
        docs = []
        for _ in range(per_class):
            for label in CLASSES:
                title, body = make_document(rng, label, topical, general, args.p_topic, args.p_cross)
                docs.append((label, title, body))
        rng.shuffle(docs)
        write_split(f"{args.out}_{split}.csv", docs)

    write_embeddings(f"{args.out}_vectors.txt", random.Random(args.seed + 1), args.dim)


if __name__ == "__main__":
    main()
