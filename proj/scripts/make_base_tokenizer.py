#!/usr/bin/env python3
"""Regenerates data/base_50k: a 50,000-entry general-purpose-style BPE
vocab/merges pair used as the benchmark "large" tokenizer.

The pair mimics the tokenizer of a general text model: metaspace word
boundaries, a natural-language-dominated training mix with a small slice of
source code and math markup, and <pad>/<s>/</s>/<unk> specials at ids 0-3.
Training text is synthesized deterministically from local material (license
prose plus Python standard-library sources), so the output is reproducible
without network access.

Usage: python3 scripts/make_base_tokenizer.py [outdir]
Requires: pip install tokenizers
"""

import glob
import os
import random
import re
import sys

from tokenizers import Tokenizer, models, pre_tokenizers, trainers

VOCAB_SIZE = 50_000
SEED = 20240817
SPECIALS = ["<pad>", "<s>", "</s>", "<unk>"]
PRINTABLE = [chr(c) for c in range(33, 127)]

SUFFIXES = ["", "s", "ed", "ing", "er", "ers", "ly", "tion", "tions", "ment",
            "ness", "able", "ity", "ive", "al", "ous", "ful", "less", "ish"]
PREFIXES = ["", "re", "un", "de", "pre", "over", "under", "non", "sub"]


def license_words():
    words = []
    for path in sorted(glob.glob("/usr/share/common-licenses/*")):
        if not os.path.isfile(path):
            continue
        with open(path, encoding="utf-8", errors="ignore") as f:
            words += re.findall(r"[A-Za-z]+", f.read())
    return words


def build_lexicon(rng):
    base = sorted({w.lower() for w in license_words() if 2 < len(w) < 14})
    lexicon = set(base)
    for word in base:
        for _ in range(4):
            pre = rng.choice(PREFIXES)
            suf = rng.choice(SUFFIXES)
            if pre or suf:
                lexicon.add(pre + word + suf)
    return sorted(lexicon)


def english_text(rng, lexicon, n_chars):
    # Zipf-ranked sampling over the lexicon, assembled into sentence-shaped
    # lines so the trainer sees realistic word frequencies.
    ranked = lexicon[:]
    rng.shuffle(ranked)
    weights = [1.0 / (i + 1) for i in range(len(ranked))]
    out = []
    total = 0
    while total < n_chars:
        n = rng.randint(4, 18)
        words = rng.choices(ranked, weights=weights, k=n)
        if rng.random() < 0.3:
            words.insert(rng.randrange(len(words)), rng.choice(
                ["the", "a", "of", "to", "and", "in", "is", "that", "for", "it"]))
        sentence = " ".join(words).capitalize() + rng.choice([".", ".", ".", "?", "!"])
        out.append(sentence)
        total += len(sentence) + 1
    return out


def code_text(rng, n_chars):
    paths = sorted(glob.glob("/usr/lib/python3.10/*.py"))
    lines = []
    for path in paths:
        with open(path, encoding="utf-8", errors="ignore") as f:
            lines += [ln.strip() for ln in f if ln.strip()]
    rng.shuffle(lines)
    out = []
    total = 0
    for ln in lines:
        ln = "".join(ch for ch in ln if 32 <= ord(ch) < 127)
        if not ln:
            continue
        out.append(ln)
        total += len(ln) + 1
        if total >= n_chars:
            break
    return out


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "data/base_50k"
    rng = random.Random(SEED)
    lexicon = build_lexicon(rng)

    corpus = []
    corpus += english_text(rng, lexicon, 9_000_000)
    corpus += code_text(rng, 120_000)
    corpus += [" ".join(PRINTABLE)] * 4
    rng.shuffle(corpus)

    tokenizer = Tokenizer(models.BPE(unk_token="<unk>"))
    tokenizer.pre_tokenizer = pre_tokenizers.Metaspace(replacement="▁")
    trainer = trainers.BpeTrainer(
        vocab_size=VOCAB_SIZE,
        special_tokens=SPECIALS,
        initial_alphabet=PRINTABLE,
        show_progress=False,
    )
    tokenizer.train_from_iterator(corpus, trainer=trainer, length=len(corpus))

    size = tokenizer.get_vocab_size()
    if size != VOCAB_SIZE:
        raise SystemExit(f"expected {VOCAB_SIZE} entries, trained {size}; "
                         "increase the corpus diversity")

    os.makedirs(outdir, exist_ok=True)
    tokenizer.model.save(outdir)
    print(f"wrote {outdir}/vocab.json and {outdir}/merges.txt ({size} entries)")


if __name__ == "__main__":
    main()
