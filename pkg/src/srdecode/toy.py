"""Small linearly separable corpora for smoke tests and trainer checks.

In the chunk corpus every word belongs to exactly one tag, so the current
word alone determines the label.  In the dependency corpus every word
attaches to the word before it (the first word to the root), which the
distance-1 attachment feature separates.
"""

from __future__ import annotations

import random

from srdecode.core import LabeledSequence, Sentence, TagSet
from srdecode.dep.trees import ArcVector, DepInstance

TOY_TAGS = TagSet(("O", "B-NP", "I-NP", "B-VP"))
_VOCAB = {
    "O": ["the", "and", "of"],
    "B-NP": ["cats", "dogs", "birds"],
    "I-NP": ["fur", "tails", "wings"],
    "B-VP": ["run", "sing", "jump"],
}
_POS = {"O": "DT", "B-NP": "NN", "I-NP": "NN", "B-VP": "VB"}


def toy_chunk_corpus(sentences: int = 40, seed: int = 0) -> list[LabeledSequence]:
    rng = random.Random(seed)
    out = []
    for _ in range(sentences):
        labels: list[str] = []
        for _ in range(rng.randint(3, 8)):
            prev = labels[-1] if labels else "O"
            choices = ["O", "B-NP", "B-VP"] + (["I-NP"] if prev in ("B-NP", "I-NP") else [])
            labels.append(rng.choice(choices))
        tokens = tuple(rng.choice(_VOCAB[lab]) for lab in labels)
        pos = tuple(_POS[lab] for lab in labels)
        out.append(LabeledSequence(Sentence(tokens, pos), TOY_TAGS.encode(labels), TOY_TAGS))
    return out


def toy_dep_corpus(sentences: int = 30, seed: int = 0) -> list[tuple[DepInstance, ArcVector]]:
    rng = random.Random(seed)
    words = ["a", "b", "c", "d", "e", "f", "g"]
    out = []
    for _ in range(sentences):
        n = rng.randint(2, 8)
        w = tuple(rng.choice(words) for _ in range(n))
        out.append((DepInstance(w, tuple(x.upper() for x in w)), ArcVector(tuple(range(n)))))
    return out
