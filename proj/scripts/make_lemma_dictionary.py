#!/usr/bin/env python3
"""Regenerate data/lemmas.tsv from the word lists below.

Covers irregular inflections, e-final verbs (whose -ed/-ing forms the suffix
rules cannot undo), doubled-consonant forms, irregular or rule-resistant nouns
and irregular comparatives. Regular inflections are left to the suffix rules.
"""

import os

IRREGULAR_VERBS = """arise arose arisen|bear bore borne|beat beat beaten|become became become|
begin began begun|bend bent|bet bet|bid bid|bind bound|bite bit bitten|bleed bled|blow blew blown|
break broke broken|breed bred|bring brought|build built|burn burnt|burst burst|buy bought|cast cast|
catch caught|choose chose chosen chooses choosing|cling clung|come came come comes coming|cost cost|
creep crept|cut cut|deal dealt|dig dug|draw drew drawn|drink drank drunk|drive drove driven drives driving|
eat ate eaten|fall fell fallen|feed fed|feel felt|fight fought|find found|flee fled|fly flew flown|
forbid forbade forbidden|forecast forecast|forget forgot forgotten|forgive forgave forgiven|freeze froze frozen|
get got gotten|give gave given gives giving|go went gone goes going|grow grew grown|hang hung|have had|hear heard|
hide hid hidden|hit hit|hold held|hurt hurt|keep kept|know knew known|lay laid|lead led|
leave left leaves leaving|lend lent|let let|lie lay lain lying|light lit|lose lost loses losing|
make made makes making|mean meant|meet met|mislead misled|overcome overcame overcome|overtake overtook overtaken|
pay paid|prove proved proven proves proving|put put|quit quit|read read|rebuild rebuilt|rid rid|
ride rode ridden rides riding|ring rang rung|rise rose risen rises rising|run ran run|say said|see saw seen seeing|
seek sought|sell sold|send sent|set set|shake shook shaken shakes shaking|shed shed|shine shone|shoot shot|
show showed shown|shrink shrank shrunk|shut shut|sing sang sung|sink sank sunk|sit sat|sleep slept|
slide slid slides sliding|speak spoke spoken|spend spent|spin spun|split split|spread spread|spring sprang sprung|
stand stood|steal stole stolen|stick stuck|sting stung|strike struck stricken strikes striking|
strive strove striven|swear swore sworn|sweep swept|swim swam swum|swing swung|take took taken takes taking|
teach taught|tear tore torn|tell told|think thought|throw threw thrown|understand understood|
undertake undertook undertaken|upset upset|wake woke woken|wear wore worn|weep wept|win won|
withdraw withdrew withdrawn|withhold withheld|write wrote written writes writing|be was were been being|
do did done does doing|die died dies dying|tie tied ties tying|flee fled flees fleeing|agree agreed agrees agreeing|
guarantee guaranteed guarantees guaranteeing|free freed frees freeing|see saw seen sees seeing"""

DOUBLED = """bet bid cut get hit let put quit rid run set shut sit spin split stop plan drop ship shop
grab slip trim ban beg chat clap drag drum grip hug jam jog knit mop nag nod pat pin plot rob rub scan
skip slam snap sob spot stab step stir swap tag tap trip wrap admit commit compel control equip occur
omit patrol permit prefer refer regret submit transfer win begin swim dig""".split()

NO_DOUBLED_PAST = set("bet bid cut hit let put quit rid set shut split run sit spin get win begin swim dig".split())

E_VERBS = """accuse achieve acquire advise announce approve argue arrive assume balance blame breathe
bribe capture care cause cease challenge change charge chase close combine compete complete compile
compute concede conclude confuse continue convince cope create damage dance debate decide decline
decrease define delete deserve determine dine dive divide donate double emerge encourage endure
engage escape estimate evacuate evade examine exchange excite excuse exercise expire explore expose
face fade fake feature figure file fire force gauge glance guide hate hope hike hire house ignore
imagine improve include increase indicate influence injure inspire install intervene introduce invade
investigate involve issue joke judge juggle lease license like line live locate love manage measure
merge mine move name negotiate note notice oblige oppose owe page participate pause phase pile place
plunge pose practice prepare preserve price pride produce promote propose prosecute provide pursue
quote race raise range rate realize receive recognize reduce refuse regulate relate release rely
remove rescue resolve restore retire revise rule save scare schedule score secure seize sense serve
settle shape share shave skate slice smoke solve source speculate stage stake state store structure
struggle suppose surge surprise survive suspend tackle tape tease telephone terminate trade translate
tune type unite urge use value vote wage waste welcome wipe""".split()

NOUNS = {
    "men": "man", "women": "woman", "children": "child", "people": "people", "mice": "mouse",
    "feet": "foot", "teeth": "tooth", "geese": "goose", "data": "datum", "media": "medium",
    "criteria": "criterion", "phenomena": "phenomenon", "analyses": "analysis", "crises": "crisis",
    "theses": "thesis", "news": "news", "series": "series", "species": "species",
    "earnings": "earnings", "politics": "politics", "economics": "economics", "physics": "physics",
    "olympics": "olympics", "athletics": "athletics", "lives": "life", "wives": "wife",
    "knives": "knife", "halves": "half", "wolves": "wolf", "thieves": "thief", "shelves": "shelf",
    "companies": "company", "countries": "country", "cities": "city", "bus": "bus", "gas": "gas",
    "status": "status", "virus": "virus", "viruses": "virus", "campus": "campus",
    "campuses": "campus", "census": "census", "bonus": "bonus", "bonuses": "bonus", "focus": "focus",
    "thing": "thing", "things": "thing", "king": "king", "kings": "king", "ring": "ring",
    "rings": "ring", "string": "string", "strings": "string", "spring": "spring",
    "morning": "morning", "mornings": "morning", "evening": "evening", "evenings": "evening",
    "building": "building", "buildings": "building", "meeting": "meeting", "meetings": "meeting",
    "wedding": "wedding", "ceiling": "ceiling", "funding": "funding", "offering": "offering",
    "offerings": "offering", "briefing": "briefing", "inning": "inning", "innings": "inning",
    "beijing": "beijing", "sterling": "sterling", "shipping": "shipping", "spending": "spending",
    "housing": "housing", "trading": "trading", "banking": "banking", "marketing": "marketing",
    "computing": "computing", "gaming": "gaming", "hearing": "hearing", "hearings": "hearing",
    "ruling": "ruling", "rulings": "ruling", "bombing": "bombing", "bombings": "bombing",
    "killing": "killing", "killings": "killing", "uprising": "uprising", "uprisings": "uprising",
    "speed": "speed", "seed": "seed", "need": "need", "feed": "feed", "greed": "greed",
    "bed": "bed", "red": "red", "hundred": "hundred", "hundreds": "hundred", "shed": "shed",
    "united": "united", "analysis": "analysis", "crisis": "crisis", "basis": "basis",
    "axis": "axis", "thesis": "thesis", "means": "means", "sports": "sports", "arms": "arms",
    "goods": "goods", "headquarters": "headquarters", "chassis": "chassis", "texas": "texas",
    "paris": "paris", "athens": "athens", "kansas": "kansas", "yankees": "yankees",
    "brussels": "brussels", "reuters": "reuters", "us": "us", "nasdaq": "nasdaq", "linux": "linux",
    "oasis": "oasis", "tennis": "tennis", "genesis": "genesis",
}

ADJECTIVES = {
    "better": "good", "best": "good", "worse": "bad", "worst": "bad", "bigger": "big",
    "biggest": "big", "larger": "large", "largest": "large", "higher": "high", "highest": "high",
    "lower": "low", "lowest": "low", "stronger": "strong", "strongest": "strong", "weaker": "weak",
    "weakest": "weak", "greater": "great", "greatest": "great", "later": "late", "latest": "late",
    "earlier": "early", "earliest": "early", "smaller": "small", "smallest": "small",
    "older": "old", "oldest": "old", "younger": "young", "youngest": "young", "newer": "new",
    "newest": "new", "faster": "fast", "fastest": "fast", "slower": "slow", "slowest": "slow",
    "wider": "wide", "widest": "wide", "hotter": "hot", "hottest": "hot", "further": "far",
    "farther": "far", "furthest": "far", "tougher": "tough", "toughest": "tough",
    "cheaper": "cheap", "cheapest": "cheap",
}


def rows():
    for entry in IRREGULAR_VERBS.replace("\n", "").split("|"):
        base, *forms = entry.split()
        for form in forms:
            if form != base:
                yield form, "verb", base
    for verb in DOUBLED:
        doubled = verb + verb[-1]
        yield doubled + "ing", "verb", verb
        if verb not in NO_DOUBLED_PAST:
            yield doubled + "ed", "verb", verb
    for verb in E_VERBS:
        yield verb + "d", "verb", verb
        yield verb[:-1] + "ing", "verb", verb
        yield verb + "s", "verb", verb
    for surface, lemma in NOUNS.items():
        yield surface, "noun", lemma
    for surface, lemma in ADJECTIVES.items():
        yield surface, "adj", lemma


def main():
    path = os.path.join(os.path.dirname(__file__), "..", "data", "lemmas.tsv")
    seen = set()
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("# surface<TAB>pos<TAB>lemma, version 1\n")
        for surface, pos, lemma in rows():
            if (surface, pos) in seen:
                continue
            seen.add((surface, pos))
            f.write(f"{surface}\t{pos}\t{lemma}\n")


if __name__ == "__main__":
    main()
