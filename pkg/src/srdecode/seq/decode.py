"""Multi-order SR decoding over linear chains.

A tag sequence is scored by stacking the order-1..order-n tables: at every
position each order contributes the (BOS-padded) n-gram ending there, scaled
by that order's weight.  :func:`sr_viterbi` maximizes this sum with a backward
dynamic program whose state is the tuple of the ``n - 1`` preceding tags.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from srdecode.core import (
    BOS,
    LabeledSequence,
    ScoreTable,
    Sentence,
    TagSet,
    ngram_at,
)
from srdecode.seq.ngrams import MAX_ORDER

NEG_INF = float("-inf")
DEFAULT_FLOOR = -1e9
BRUTE_FORCE_LIMIT = 10**6


class SearchSpaceExhausted(RuntimeError):
    """Pruning removed every complete tag path."""


@dataclass(frozen=True)
class MultiOrderBundle:
    """Score tables for orders 1..n of one sentence.

    ``order_weights[o - 1]`` scales order o; an order with weight 0 is left
    out of scoring entirely (including dictionary checks).
    """

    tags: TagSet
    tables: tuple[ScoreTable, ...]
    order_weights: tuple[float, ...] | None = None
    sentence: Sentence | None = None

    def __post_init__(self):
        tables = tuple(self.tables)
        object.__setattr__(self, "tables", tables)
        if not 1 <= len(tables) <= MAX_ORDER:
            raise ValueError(f"need 1..{MAX_ORDER} tables, got {len(tables)}")
        for o, table in enumerate(tables, start=1):
            if table.order != o:
                raise ValueError(f"table {o} has order {table.order}")
            if table.length != tables[0].length:
                raise ValueError("tables describe different sentence lengths")
        if tables[0].length == 0:
            raise ValueError("empty sentence")
        weights = self.order_weights
        if weights is None:
            weights = (1.0,) * len(tables)
        weights = tuple(float(w) for w in weights)
        if len(weights) != len(tables):
            raise ValueError("one weight per order is required")
        if any(w < 0 or not math.isfinite(w) for w in weights):
            raise ValueError("order weights must be finite and non-negative")
        object.__setattr__(self, "order_weights", weights)
        if self.sentence is not None and len(self.sentence) != tables[0].length:
            raise ValueError("sentence length does not match the tables")

    @property
    def max_order(self) -> int:
        return len(self.tables)

    @property
    def length(self) -> int:
        return self.tables[0].length

    def reweighted(self, weights: Sequence[float]) -> "MultiOrderBundle":
        return MultiOrderBundle(self.tags, self.tables, tuple(weights), self.sentence)


@dataclass(frozen=True)
class PruneConfig:
    top_k: int = 5
    dictionary: frozenset = field(default_factory=frozenset)
    dictionary_enabled: bool = False
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        object.__setattr__(self, "dictionary", frozenset(self.dictionary))

    @classmethod
    def unpruned(cls, tags: TagSet, floor: float = DEFAULT_FLOOR) -> "PruneConfig":
        return cls(top_k=len(tags), dictionary_enabled=False, floor=floor)


def _active_orders(bundle: MultiOrderBundle):
    return [
        (o, w, bundle.tables[o - 1])
        for o, w in enumerate(bundle.order_weights, start=1)
        if w != 0.0
    ]


def _ngram_score(table, t, key, prune: PruneConfig) -> float:
    if prune.dictionary_enabled and key not in prune.dictionary:
        return NEG_INF
    return table.entries[t].get(key, prune.floor)


def sr_score(
    bundle: MultiOrderBundle, tags: Sequence[int], prune: PruneConfig | None = None
) -> float:
    """Order-weighted sum of every order's score at every position."""
    if len(tags) != bundle.length:
        raise ValueError(f"{len(tags)} tags for a sentence of length {bundle.length}")
    k = len(bundle.tags)
    for y in tags:
        if not 0 <= y < k:
            raise ValueError(f"tag index {y} out of range")
    if prune is None:
        prune = PruneConfig.unpruned(bundle.tags)
    total = 0.0
    orders = _active_orders(bundle)
    for t in range(len(tags)):
        for o, w, table in orders:
            total += w * _ngram_score(table, t, ngram_at(tags, t, o), prune)
    return total


def prune_candidates(order1: ScoreTable, k: int) -> list[list[int]]:
    """Top-``k`` tags per position by order-1 score (ties go to lower index)."""
    if order1.order != 1:
        raise ValueError("pruning needs the order-1 table")
    if k < 1:
        raise ValueError("k must be >= 1")
    out = []
    for row in order1.entries:
        ranked = sorted(row.items(), key=lambda kv: (-kv[1], kv[0][0]))
        out.append([key[0] for key, _ in ranked[:k]])
    return out


def viterbi_tags(
    bundle: MultiOrderBundle, prune: PruneConfig | None = None
) -> tuple[tuple[int, ...], float]:
    """Best tag-index sequence and its score.

    The table is filled right to left so that following the stored choices
    forward from the start state picks, among equally scored paths, the
    lexicographically smallest one.
    """
    if prune is None:
        prune = PruneConfig.unpruned(bundle.tags)
    n, T = bundle.max_order, bundle.length
    k = min(prune.top_k, len(bundle.tags))
    cands = [sorted(c) for c in prune_candidates(bundle.tables[0], k)]
    orders = _active_orders(bundle)
    hist = n - 1

    def states(t: int) -> list[tuple[int, ...]]:
        # tags at positions t-hist+1..t, BOS before the sentence start
        cols = [cands[p] if p >= 0 else [BOS] for p in range(t - hist + 1, t + 1)]
        return list(itertools.product(*cols))

    value = {s: 0.0 for s in states(T - 1)}
    choices: list[dict] = [None] * T
    for t in range(T - 1, -1, -1):
        prev_value = {}
        choice = {}
        for s in states(t - 1):
            best, best_y = NEG_INF, None
            for y in cands[t]:
                full = s + (y,)
                local = 0.0
                for o, w, table in orders:
                    local += w * _ngram_score(table, t, full[n - o :], prune)
                v = local + value[full[1:]]
                if v > best:
                    best, best_y = v, y
            prev_value[s] = best
            choice[s] = best_y
        value = prev_value
        choices[t] = choice

    start = (BOS,) * hist
    best = value[start]
    if best == NEG_INF or choices[0][start] is None:
        raise SearchSpaceExhausted("search space exhausted")
    out = []
    s = start
    for t in range(T):
        y = choices[t][s]
        out.append(y)
        s = (s + (y,))[1:]
    return tuple(out), best


def _labeled(bundle: MultiOrderBundle, tags) -> LabeledSequence:
    sentence = bundle.sentence or Sentence(("_",) * bundle.length)
    return LabeledSequence(sentence, tags, bundle.tags)


def sr_viterbi(
    bundle: MultiOrderBundle, prune: PruneConfig | None = None
) -> LabeledSequence:
    tags, _ = viterbi_tags(bundle, prune)
    return _labeled(bundle, tags)


def sr_brute_force(
    bundle: MultiOrderBundle, prune: PruneConfig | None = None
) -> LabeledSequence:
    """Exhaustive argmax of :func:`sr_score`; the test oracle for the DP.

    Only the dictionary part of ``prune`` applies here; ``top_k`` is ignored.
    """
    k, T = len(bundle.tags), bundle.length
    if k**T > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{k}^{T} sequences exceed the brute-force limit")
    best, best_tags = NEG_INF, None
    for tags in itertools.product(range(k), repeat=T):
        v = sr_score(bundle, tags, prune)
        if v > best:
            best, best_tags = v, tags
    if best_tags is None:
        raise SearchSpaceExhausted("search space exhausted")
    return _labeled(bundle, best_tags)
