"""Seeded synthetic chunking corpora drawn from an order-2 tag process.

Tags follow a second-order Markov chain over a BIO chunk alphabet (an ``I-X``
only ever follows ``B-X`` or ``I-X``).  Each tag emits a token from its own
small vocabulary plus a pool of words shared by all tags, so a tagger needs
context to resolve shared words.  Label noise replaces a training tag with a
uniformly drawn different tag; test labels are left clean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from srdecode.core import LabeledSequence, Sentence, TagSet

CHUNK_TAGS = TagSet(("O", "B-NP", "I-NP", "B-VP", "I-VP", "B-PP"))


@dataclass(frozen=True)
class SyntheticConfig:
    train_sentences: int = 200
    test_sentences: int = 300
    min_length: int = 6
    max_length: int = 16
    own_words: int = 6
    shared_words: int = 10
    shared_prob: float = 0.35
    concentration: float = 0.3
    noise: float = 0.1


def _allowed(tags: TagSet, prev: int, nxt: int) -> bool:
    label = tags.labels[nxt]
    if not label.startswith("I-"):
        return True
    if prev < 0:
        return False
    return tags.labels[prev][2:] == label[2:]


def _grammar(tags: TagSet, cfg: SyntheticConfig, rng: np.random.Generator):
    k = len(tags)
    # context index k stands for "before the sentence"
    trans = np.zeros((k + 1, k + 1, k))
    for a in range(k + 1):
        for b in range(k + 1):
            if b == k and a != k:
                continue
            prev = b if b < k else -1
            mask = np.array([_allowed(tags, prev, c) for c in range(k)], dtype=float)
            p = rng.dirichlet(np.full(k, cfg.concentration)) * mask
            trans[a, b] = p / p.sum()
    emit = []
    shared = [f"s{i}" for i in range(cfg.shared_words)]
    for y in range(k):
        own = [f"{tags.labels[y].lower().replace('-', '')}{i}" for i in range(cfg.own_words)]
        emit.append((own, shared))
    return trans, emit


def generate_corpus(
    seed: int, cfg: SyntheticConfig = SyntheticConfig(), tags: TagSet = CHUNK_TAGS
) -> tuple[list[LabeledSequence], list[LabeledSequence]]:
    """Return ``(train, test)``; only ``train`` carries label noise."""
    rng = np.random.default_rng(seed)
    # a separate stream keeps sentences identical whatever the noise level
    noise_rng = np.random.default_rng([seed, 1])
    k = len(tags)
    trans, emit = _grammar(tags, cfg, rng)

    def sample(count: int, noisy: bool) -> list[LabeledSequence]:
        out = []
        for _ in range(count):
            length = int(rng.integers(cfg.min_length, cfg.max_length + 1))
            a, b = k, k
            labels, tokens = [], []
            for _ in range(length):
                y = int(rng.choice(k, p=trans[a, b]))
                own, shared = emit[y]
                # shared words carry a weak per-tag preference
                if rng.random() < cfg.shared_prob:
                    pref = (np.arange(len(shared)) * (y + 1)) % len(shared)
                    w = np.exp(-0.3 * pref)
                    tokens.append(shared[int(rng.choice(len(shared), p=w / w.sum()))])
                else:
                    tokens.append(own[int(rng.integers(len(own)))])
                labels.append(y)
                a, b = b, y
            if noisy:
                for i in range(length):
                    if noise_rng.random() < cfg.noise:
                        labels[i] = int((labels[i] + noise_rng.integers(1, k)) % k)
            out.append(LabeledSequence(Sentence(tuple(tokens)), tuple(labels), tags))
        return out

    train = sample(cfg.train_sentences, noisy=cfg.noise > 0)
    test = sample(cfg.test_sentences, noisy=False)
    return train, test
