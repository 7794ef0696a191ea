#!/usr/bin/env python3
"""Derive the checked-in resource files under resources/ from upstream data.

Inputs (all public):
  --unigrams   Peter Norvig's count_1w unigram counts (word<TAB>count), as
               shipped in the `wordsegment` PyPI package (unigrams.txt).
  --wordnet    A WordNet 3.0 dict directory (data.*, index.*, *.exc), e.g. the
               copy bundled in the `wn==0.0.23` PyPI sdist.
  --answers    Original Wordle answer list (2,315 words).
  --allowed    Original Wordle guess list (12,972 words, answers included).

The script is deterministic; rerunning it over the same inputs reproduces the
files byte for byte.
"""

import argparse
import csv
import os
import re
from collections import OrderedDict

# Answers dropped from the original list by the puzzle's later maintainers.
REMOVED_ANSWERS = {"agora", "pupal", "lynch", "fibre", "slave", "wench"}

# Clues for common words that WordNet does not cover.
MANUAL_CLUES = OrderedDict(
    [
        ("among", "In the midst of"),
        ("could", "Was able to"),
        ("since", "From that time on"),
        ("their", "Belonging to them"),
        ("these", "This and others nearby"),
        ("those", "That group over there"),
        ("until", "Up to the time of"),
        ("where", "At what place?"),
        ("which", "What one?"),
        ("whose", "Belonging to what person?"),
        ("would", "Was inclined to"),
        ("shall", "Will, formally"),
        ("ought", "Should"),
        ("circa", "Approximately, with a date"),
        ("inbox", "Place for unread email"),
        ("login", "Account sign-in"),
        ("admin", "Office management, for short"),
        ("ramen", "Noodle soup"),
        ("manga", "Japanese comics"),
        ("rehab", "Recovery program, for short"),
        ("turbo", "Engine booster"),
        ("cyber", "Prefix for online things"),
    ]
)

STOPWORDS = set(
    """a about above after again against all also am an and any are as at be
    because been before being below between both but by can did do does doing
    down during each few for from further had has have having he her here hers
    herself him himself his how i if in into is it its itself just me more most
    my myself no nor not now of off on once only or other our ours ourselves out
    over own same she should so some such than that the their theirs them
    themselves then there these they this those through to too under until up
    very was we were what when where which while who whom why will with would
    you your yours yourself yourselves one two three four five six seven eight
    nine ten may might must shall could get got go goes went like well way""".split()
)

POS_FILES = [("n", "noun"), ("v", "verb"), ("a", "adj"), ("r", "adv")]


def load_wordnet(root):
    index = {}  # lemma -> list of (pos, tagsense_cnt, [offsets])
    for pos, name in POS_FILES:
        with open(os.path.join(root, "index." + name), encoding="utf-8") as fh:
            for line in fh:
                if line.startswith(" "):
                    continue
                parts = line.split()
                lemma = parts[0]
                synset_cnt = int(parts[2])
                p_cnt = int(parts[3])
                rest = parts[4 + p_cnt :]
                tagsense = int(rest[1])
                offsets = rest[2 : 2 + synset_cnt]
                index.setdefault(lemma, []).append((pos, tagsense, offsets))
    synsets = {}
    for pos, name in POS_FILES:
        with open(os.path.join(root, "data." + name), encoding="utf-8") as fh:
            for line in fh:
                if line.startswith(" "):
                    continue
                head, _, gloss = line.partition(" | ")
                parts = head.split()
                offset = parts[0]
                w_cnt = int(parts[3], 16)
                words = [parts[4 + 2 * i] for i in range(w_cnt)]
                k = 4 + 2 * w_cnt
                p_cnt = int(parts[k])
                ptrs = []
                for i in range(p_cnt):
                    sym, off, ppos = parts[k + 1 + 4 * i : k + 4 + 4 * i]
                    ptrs.append((sym, off, "a" if ppos == "s" else ppos))
                synsets[(pos, offset)] = (words, ptrs, gloss.strip())
    exceptions = {}
    for pos, name in POS_FILES:
        with open(os.path.join(root, name + ".exc"), encoding="utf-8") as fh:
            for line in fh:
                parts = line.split()
                if len(parts) >= 2:
                    exceptions.setdefault(parts[0], []).append((pos, parts[1]))
    return index, synsets, exceptions


def clean_lemma(word):
    return re.sub(r"\(.*?\)", "", word).replace("_", " ").strip()


def inflection_base(word, index, exceptions):
    """Return (kind, base) when `word` is an inflected form of another lemma."""
    for pos, base in exceptions.get(word, []):
        if base != word and base in index:
            return {"n": "plural", "v": "verb", "a": "comparative", "r": "comparative"}[pos], base
    rules = [
        ("n", "plural", [("ses", "s"), ("xes", "x"), ("zes", "z"), ("ches", "ch"), ("shes", "sh"), ("men", "man"), ("ies", "y"), ("s", "")]),
        ("v", "verb", [("ies", "y"), ("es", "e"), ("es", ""), ("s", ""), ("ed", "e"), ("ed", ""), ("ing", "e"), ("ing", "")]),
        ("a", "comparative", [("er", ""), ("er", "e"), ("est", ""), ("est", "e")]),
    ]
    for pos, kind, pairs in rules:
        for suffix, repl in pairs:
            if word.endswith(suffix) and len(word) > len(suffix) + 1:
                base = word[: -len(suffix)] + repl
                if base != word and any(p == pos for p, _, _ in index.get(base, [])):
                    return kind, base
    return None


def verb_inflection_label(word, base):
    if word.endswith("ing"):
        return "Present participle of " + base
    if word.endswith("s") and not word.endswith("ss"):
        return base.capitalize() + ", in the present"
    return "Past tense of " + base


def short_gloss(gloss):
    gloss = gloss.split(";")[0]
    gloss = re.sub(r"\(.*?\)", "", gloss)
    gloss = re.sub(r"\s+", " ", gloss).strip().strip('"').strip()
    words = gloss.split()
    if len(words) > 10:
        gloss = " ".join(words[:10])
    return gloss[:1].upper() + gloss[1:]


def senses_by_salience(word, index):
    entries = sorted(index.get(word, []), key=lambda e: (-e[1], "nvar".index(e[0])))
    out = []
    for pos, _, offsets in entries:
        for off in offsets:
            out.append((pos, off))
    return out


def wordnet_clue(word, index, synsets):
    senses = senses_by_salience(word, index)
    for key in senses:
        words, _, gloss = synsets[key]
        for w in words:
            cand = clean_lemma(w)
            if cand.lower() != word and word not in cand.lower() and cand.lower() not in word:
                return cand[:1].upper() + cand[1:]
        g = short_gloss(gloss)
        if g and word not in g.lower():
            return g
    for key in senses:
        for sym, off, ppos in synsets[key][1]:
            if sym == "@" and (ppos, off) in synsets:
                for w in synsets[(ppos, off)][0]:
                    cand = clean_lemma(w)
                    if word not in cand.lower():
                        return "Kind of " + cand.lower()
    return None


def make_clue(word, index, synsets, exceptions):
    if word in MANUAL_CLUES:
        return MANUAL_CLUES[word]
    if word in index:
        return wordnet_clue(word, index, synsets)
    infl = inflection_base(word, index, exceptions)
    if infl is None:
        return None
    kind, base = infl
    if kind == "plural":
        return "Plural of " + base
    if kind == "comparative":
        return "More " + base
    return verb_inflection_label(word, base)


def is_content_lemma(word, index, synsets, exceptions):
    if not word.isalpha() or len(word) < 3 or word in STOPWORDS:
        return False
    entries = [e for e in index.get(word, []) if e[0] in ("n", "v", "a")]
    if not entries:
        return False
    if inflection_base(word, index, exceptions) is not None:
        return False
    # proper nouns only appear capitalised in the synset word lists
    for pos, _, offsets in entries:
        for off in offsets:
            words, _, _ = synsets[(pos, off)]
            if any(w.lower() == word and w == w.lower() for w in (re.sub(r"\(.*?\)", "", x) for x in words)):
                return True
    return False


def related_words(word, index, synsets, limit=3):
    out = []

    def push(cand):
        cand = clean_lemma(cand).lower()
        if not cand or word in cand or cand in word or cand in out:
            return
        if not re.fullmatch(r"[a-z]+( [a-z]+)?", cand):
            return
        out.append(cand)

    senses = senses_by_salience(word, index)[:3]
    for key in senses:
        for w in synsets[key][0]:
            push(w)
    for sym in ("@", "+", "~"):
        for key in senses[:2]:
            for s, off, ppos in synsets[key][1]:
                if s == sym and (ppos, off) in synsets:
                    for w in synsets[(ppos, off)][0][:2]:
                        push(w)
    return out[:limit]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--unigrams", required=True)
    ap.add_argument("--wordnet", required=True)
    ap.add_argument("--answers", required=True)
    ap.add_argument("--allowed", required=True)
    ap.add_argument("--out", default="resources")
    args = ap.parse_args()

    counts = []
    with open(args.unigrams, encoding="utf-8") as fh:
        for line in fh:
            w, n = line.rstrip("\n").split("\t")
            counts.append((w, int(n)))
    total = sum(n for _, n in counts)
    per_million = {w: n / total * 1e6 for w, n in counts}

    index, synsets, exceptions = load_wordnet(args.wordnet)

    answers = [w.strip() for w in open(args.answers, encoding="utf-8") if w.strip()]
    targets = sorted(w for w in answers if w not in REMOVED_ANSWERS)
    allowed = sorted({w.strip() for w in open(args.allowed, encoding="utf-8") if w.strip()})

    os.makedirs(os.path.join(args.out, "wordle"), exist_ok=True)
    os.makedirs(os.path.join(args.out, "taboo"), exist_ok=True)
    with open(os.path.join(args.out, "wordle", "possible_words.txt"), "w", encoding="utf-8") as fh:
        fh.write("".join(w + "\n" for w in targets))
    with open(os.path.join(args.out, "wordle", "allowed_words.txt"), "w", encoding="utf-8") as fh:
        fh.write("".join(w + "\n" for w in allowed))
    with open(os.path.join(args.out, "wordle", "frequencies.tsv"), "w", encoding="utf-8") as fh:
        for w in targets:
            if w in per_million:
                fh.write("%s\t%.4f\n" % (w, per_million[w]))
    with open(os.path.join(args.out, "wordle", "clues.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["answer", "clue"])
        for w in targets:
            clue = make_clue(w, index, synsets, exceptions)
            if clue:
                writer.writerow([w, clue])

    content = [(w, f) for w, f in per_million.items() if is_content_lemma(w, index, synsets, exceptions)]
    content.sort(key=lambda x: (-x[1], x[0]))
    with open(os.path.join(args.out, "taboo", "frequencies.tsv"), "w", encoding="utf-8") as fh:
        for w, f in content:
            fh.write("%s\t%.4f\n" % (w, f))
    with open(os.path.join(args.out, "taboo", "related_words.tsv"), "w", encoding="utf-8") as fh:
        for w, f in sorted(content):
            if f < 5.0:
                continue
            rel = related_words(w, index, synsets)
            if len(rel) >= 2:
                fh.write("%s\t%s\n" % (w, "|".join(rel)))


if __name__ == "__main__":
    main()
