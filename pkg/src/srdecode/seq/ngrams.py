from __future__ import annotations

from typing import Sequence

from srdecode.core import LabeledSequence, NGramTag, TagSet, ngram_at

MAX_ORDER = 3


def _check_order(order: int) -> None:
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}, got {order}")


def build_ngram_tagset(
    tags: TagSet, order: int, corpus: Sequence[LabeledSequence]
) -> list[NGramTag]:
    """Order-``order`` tags observed in ``corpus``, in first-occurrence order."""
    _check_order(order)
    if not corpus:
        raise ValueError("corpus is empty")
    seen: dict[tuple[int, ...], None] = {}
    for seq in corpus:
        if seq.tagset != tags:
            raise ValueError("corpus sequence uses a different tag set")
        for t in range(len(seq)):
            seen.setdefault(ngram_at(seq.tags, t, order), None)
    return [NGramTag(parts) for parts in seen]


def harvest_dictionary(
    corpus: Sequence[LabeledSequence], max_order: int
) -> frozenset[tuple[int, ...]]:
    """Every BOS-padded tag o-gram, o in 1..max_order, seen in ``corpus``."""
    _check_order(max_order)
    if not corpus:
        raise ValueError("corpus is empty")
    found = set()
    for seq in corpus:
        for t in range(len(seq)):
            for o in range(1, max_order + 1):
                found.add(ngram_at(seq.tags, t, o))
    return frozenset(found)
