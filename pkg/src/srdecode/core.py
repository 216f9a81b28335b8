"""Shared domain types: sentences, tag alphabets, n-gram tags and score tables.

Tags are interned to dense integer indices when a :class:`TagSet` is built, and
every decoder works on those indices.  The begin-of-sequence symbol is
represented by the index :data:`BOS` (``-1``) and spelled ``<S>`` in files.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

BOS = -1
BOS_SYMBOL = "<S>"


class ScoreTableError(ValueError):
    """A score table violates one of its invariants."""

    def __init__(self, position: int, key, reason: str):
        self.position = position
        self.key = key
        self.reason = reason
        super().__init__(f"position {position}, key {key!r}: {reason}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]
    pos: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("sentence must be non-empty")
        if self.pos is not None:
            object.__setattr__(self, "pos", tuple(self.pos))
            if len(self.pos) != len(self.tokens):
                raise ValueError(
                    f"pos length {len(self.pos)} != token length {len(self.tokens)}"
                )

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class TagSet:
    """Ordered alphabet of unigram tags."""

    labels: tuple[str, ...]
    bos: str = BOS_SYMBOL
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError("tag labels must be distinct")
        if self.bos in labels:
            raise ValueError(f"BOS symbol {self.bos!r} may not be a tag label")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        if label == self.bos:
            return BOS
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown tag {label!r}") from None

    def label(self, index: int) -> str:
        if index == BOS:
            return self.bos
        if not 0 <= index < len(self.labels):
            raise IndexError(f"tag index {index} out of range")
        return self.labels[index]

    def encode(self, labels: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index(lab) for lab in labels)

    def decode(self, indices: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.label(i) for i in indices)

    @classmethod
    def from_corpus(cls, label_lists: Iterable[Iterable[str]]) -> "TagSet":
        """Tag set in first-occurrence order."""
        seen: dict[str, None] = {}
        for labels in label_lists:
            for lab in labels:
                seen.setdefault(lab, None)
        return cls(tuple(seen))


@dataclass(frozen=True)
class NGramTag:
    """An order-n tag: the n consecutive unigram tags ending at a position.

    ``BOS`` may only occupy leading components.
    """

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise ValueError("n-gram tag needs at least one part")
        check_padding(parts)

    @property
    def order(self) -> int:
        return len(self.parts)

    def render(self, tags: TagSet) -> str:
        return "|".join(tags.label(p) for p in self.parts)

    @classmethod
    def parse(cls, key: str, tags: TagSet) -> "NGramTag":
        return cls(tuple(tags.index(p) for p in key.split("|")))


def check_padding(parts: Sequence[int]) -> None:
    """Raise if a BOS component follows a real tag."""
    seen_tag = False
    for p in parts:
        if p == BOS:
            if seen_tag:
                raise ValueError(f"BOS after a tag in {tuple(parts)}")
        elif p < 0:
            raise ValueError(f"negative tag index {p}")
        else:
            seen_tag = True
    if not seen_tag:
        raise ValueError("n-gram tag has no real tag component")


def decompose_tag(z: NGramTag) -> list[int]:
    """The unigram tags an n-gram tag is made of, in order."""
    return list(z.parts)


def ngram_at(tags: Sequence[int], t: int, order: int) -> tuple[int, ...]:
    """BOS-padded n-gram of ``order`` ending at 0-based position ``t``."""
    start = t - order + 1
    if start >= 0:
        return tuple(tags[start : t + 1])
    return (BOS,) * (-start) + tuple(tags[: t + 1])


@dataclass(frozen=True)
class LabeledSequence:
    sentence: Sentence
    tags: tuple[int, ...]
    tagset: TagSet

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(int(t) for t in self.tags))
        if len(self.tags) != len(self.sentence):
            raise ValueError(
                f"{len(self.tags)} tags for a sentence of length {len(self.sentence)}"
            )
        n = len(self.tagset)
        for t in self.tags:
            if not 0 <= t < n:
                raise ValueError(f"tag index {t} not in tag set of size {n}")

    def __len__(self) -> int:
        return len(self.tags)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.tagset.decode(self.tags)

    def with_tags(self, tags: Sequence[int]) -> "LabeledSequence":
        return LabeledSequence(self.sentence, tuple(tags), self.tagset)


@dataclass(frozen=True)
class ScoreTable:
    """Log-scores of order-``order`` n-gram tags at each position.

    ``entries[t]`` maps the parts tuple of an n-gram ending at 0-based
    position ``t`` to its score.  Keys absent from a position are simply not
    scored there; decoders treat them as out of the search space or give them
    a floor score.
    """

    order: int
    entries: tuple[Mapping[tuple[int, ...], float], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(dict(e) for e in self.entries))

    @property
    def length(self) -> int:
        return len(self.entries)

    def get(self, t: int, key: tuple[int, ...], default: float | None = None):
        return self.entries[t].get(key, default)

    @classmethod
    def from_dense(cls, order: int, scores) -> "ScoreTable":
        """Build from a dense ``(T, K, ..., K)`` array with ``order`` tag axes.

        Leading components that fall before the sentence start are replaced by
        BOS, so several dense cells collapse onto one padded key; the cell
        whose padded components are all index 0 supplies the score.
        """
        scores = np.asarray(scores, dtype=float)
        if scores.ndim != order + 1:
            raise ValueError(f"expected {order + 1} axes, got {scores.ndim}")
        T, k = scores.shape[0], scores.shape[1]
        entries = []
        for t in range(T):
            row: dict[tuple[int, ...], float] = {}
            pad = max(0, order - 1 - t)
            for combo in itertools.product(range(k), repeat=order - pad):
                key = (BOS,) * pad + combo
                row[key] = float(scores[(t,) + (0,) * pad + combo])
            entries.append(row)
        return cls(order, tuple(entries))


def validate_score_table(table: ScoreTable, tags: TagSet, length: int) -> ScoreTable:
    """Return ``table`` unchanged if every invariant holds, else raise.

    The raised :class:`ScoreTableError` names the position, the key and the
    violated invariant (``wrong order``, ``unknown tag``, ``non-finite score``,
    ``bad padding`` or ``wrong length``).
    """
    if table.length != length:
        raise ScoreTableError(-1, None, f"wrong length: {table.length} != {length}")
    n = len(tags)
    for t, row in enumerate(table.entries):
        for key, score in row.items():
            if len(key) != table.order:
                raise ScoreTableError(t, key, "wrong order")
            for p in key:
                if p != BOS and not 0 <= p < n:
                    raise ScoreTableError(t, key, "unknown tag")
            want_pad = max(0, table.order - 1 - t)
            if any(p == BOS for p in key[want_pad:]) or any(
                p != BOS for p in key[:want_pad]
            ):
                raise ScoreTableError(t, key, "bad padding")
            if not isinstance(score, (int, float)) or not math.isfinite(score):
                raise ScoreTableError(t, key, "non-finite score")
    return table
