"""Files of externally computed scores.

Score tables (sequence labeling) are JSON Lines, one record per sentence::

    {"tokens": ["He", "runs"],
     "tags": ["B-NP", "B-VP"],
     "orders": {"1": {"B-NP": [0.1, -2.0], "B-VP": [-1.5, 0.3]},
                "2": {"<S>|B-NP": [0.0, null], "B-NP|B-VP": [null, 0.7]}}}

``tags`` is the tag alphabet in index order.  Each order maps an n-gram key
(parts joined by ``|``, sentence-start padding spelled ``<S>``) to one value
per token; ``null`` marks positions where that n-gram is not scored.  Orders
must be the contiguous range 1..n.

Arc-score files (parsing) hold blank-line separated records.  The first line
of a record is the word count n.  Then ``h<TAB>m<TAB>score`` lines give arc
scores and ``h<TAB>m<TAB>s<TAB>score`` lines give sibling scores, with ``-``
as ``s`` for the innermost (NULL-sibling) modifier.  Parts that are not
listed score 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from srdecode.core import (
    BOS,
    BOS_SYMBOL,
    ScoreTable,
    ScoreTableError,
    Sentence,
    TagSet,
    validate_score_table,
)
from srdecode.dep.trees import PartScores, sibling_triples
from srdecode.seq.decode import MultiOrderBundle
from srdecode.seq.ngrams import MAX_ORDER


class ScoreFileError(ValueError):
    def __init__(self, path, record: int, message: str):
        self.path = str(path)
        self.record = record
        super().__init__(f"{path}: record {record}: {message}")


@dataclass(frozen=True)
class ScoreRecord:
    """One sentence worth of score tables."""

    sentence: Sentence
    tags: TagSet
    tables: tuple[ScoreTable, ...]

    def bundle(self, order_weights: Sequence[float] | None = None) -> MultiOrderBundle:
        return MultiOrderBundle(self.tags, self.tables, order_weights, self.sentence)


def _key_parts(key: str, tags: TagSet) -> tuple[int, ...]:
    return tuple(BOS if p == BOS_SYMBOL else tags.index(p) for p in key.split("|"))


def _key_text(parts: tuple[int, ...], tags: TagSet) -> str:
    return "|".join(BOS_SYMBOL if p == BOS else tags.label(p) for p in parts)


def _parse_record(doc, path, i: int) -> ScoreRecord:
    if not isinstance(doc, dict):
        raise ScoreFileError(path, i, "record must be an object")
    for field in ("tokens", "tags", "orders"):
        if field not in doc:
            raise ScoreFileError(path, i, f"missing field {field!r}")
    tokens, labels, orders = doc["tokens"], doc["tags"], doc["orders"]
    if not isinstance(tokens, list) or not tokens or not all(isinstance(t, str) for t in tokens):
        raise ScoreFileError(path, i, "tokens must be a non-empty list of strings")
    if not isinstance(labels, list) or not labels or not all(isinstance(t, str) for t in labels):
        raise ScoreFileError(path, i, "tags must be a non-empty list of strings")
    if BOS_SYMBOL in labels:
        raise ScoreFileError(path, i, f"{BOS_SYMBOL} is reserved")
    try:
        tags = TagSet(tuple(labels))
    except ValueError as exc:
        raise ScoreFileError(path, i, str(exc)) from None
    if not isinstance(orders, dict):
        raise ScoreFileError(path, i, "orders must be an object")
    want = [str(o) for o in range(1, len(orders) + 1)]
    if sorted(orders) != want or not 1 <= len(orders) <= MAX_ORDER:
        raise ScoreFileError(path, i, f"orders must be 1..n with n <= {MAX_ORDER}")
    T = len(tokens)
    tables = []
    for o in range(1, len(orders) + 1):
        keys = orders[str(o)]
        if not isinstance(keys, dict):
            raise ScoreFileError(path, i, f"order {o} must map keys to arrays")
        entries: list[dict] = [{} for _ in range(T)]
        for key, values in keys.items():
            try:
                parts = _key_parts(key, tags)
            except KeyError:
                raise ScoreFileError(path, i, f"order {o} key {key!r}: unknown tag") from None
            if len(parts) != o:
                raise ScoreFileError(path, i, f"order {o} key {key!r}: wrong order")
            if not isinstance(values, list) or len(values) != T:
                raise ScoreFileError(
                    path, i, f"order {o} key {key!r}: expected an array of length {T}"
                )
            for t, v in enumerate(values):
                if v is None:
                    continue
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ScoreFileError(path, i, f"order {o} key {key!r}: non-numeric value")
                entries[t][parts] = float(v)
        table = ScoreTable(o, tuple(entries))
        try:
            validate_score_table(table, tags, T)
        except ScoreTableError as exc:
            raise ScoreFileError(path, i, f"order {o}: {exc}") from None
        tables.append(table)
    return ScoreRecord(Sentence(tuple(tokens)), tags, tuple(tables))


def read_score_tables(path) -> list[ScoreRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        i = 0
        for line in fh:
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScoreFileError(path, i, f"invalid JSON: {exc.msg}") from None
            records.append(_parse_record(doc, path, i))
            i += 1
    return records


def record_to_json(record: ScoreRecord) -> dict:
    tags = record.tags
    T = len(record.sentence)
    orders = {}
    for table in record.tables:
        keys: dict[str, list] = {}
        for t, row in enumerate(table.entries):
            for parts, v in row.items():
                keys.setdefault(_key_text(parts, tags), [None] * T)[t] = v
        orders[str(table.order)] = keys
    return {"tokens": list(record.sentence.tokens), "tags": list(tags.labels), "orders": orders}


def write_score_tables(path, records: Sequence[ScoreRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_json(record), sort_keys=True, allow_nan=False) + "\n")


# -- arc-score files ---------------------------------------------------------


def read_arc_scores(path, second_order: bool | None = None) -> list[PartScores]:
    """Read arc-score records.

    ``second_order`` forces (True) or forbids (False) a sibling array; by
    default a record gets one only if it lists sibling lines.
    """
    out = []
    record = 0
    block: list[tuple[int, str]] = []

    def flush():
        nonlocal record
        if block:
            out.append(_parse_arc_block(block, path, record, second_order))
            record += 1
        block.clear()

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                flush()
            else:
                block.append((lineno, line))
    flush()
    return out


def _parse_arc_block(block, path, record: int, second_order) -> PartScores:
    lineno, head = block[0]
    try:
        n = int(head)
    except ValueError:
        raise ScoreFileError(path, record, f"line {lineno}: expected the word count") from None
    if n < 1:
        raise ScoreFileError(path, record, f"line {lineno}: word count must be >= 1")
    N = n + 1
    arc = np.zeros((N, N))
    sib = None
    for lineno, line in block[1:]:
        cols = line.split("\t")
        try:
            if len(cols) == 3:
                h, m, v = int(cols[0]), int(cols[1]), float(cols[2])
                s = None
            elif len(cols) == 4:
                h, m, v = int(cols[0]), int(cols[1]), float(cols[3])
                s = h if cols[2] == "-" else int(cols[2])
            else:
                raise ValueError(f"expected 3 or 4 columns, got {len(cols)}")
        except ValueError as exc:
            raise ScoreFileError(path, record, f"line {lineno}: {exc}") from None
        if not math.isfinite(v):
            raise ScoreFileError(path, record, f"line {lineno}: non-finite score")
        if not (0 <= h <= n and 1 <= m <= n and h != m):
            raise ScoreFileError(path, record, f"line {lineno}: invalid arc {h} -> {m}")
        if s is None:
            arc[h, m] = v
            continue
        lo, hi = min(h, m), max(h, m)
        if s != h and not lo < s < hi:
            raise ScoreFileError(path, record, f"line {lineno}: invalid sibling {s}")
        if sib is None:
            sib = np.zeros((N, N, N))
        sib[h, m, s] = v
    if second_order is True and sib is None:
        sib = np.zeros((N, N, N))
    if second_order is False and sib is not None:
        raise ScoreFileError(path, record, "sibling scores in a first-order file")
    return PartScores(arc, sib)


def write_arc_scores(path, scores: Sequence[PartScores]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for k, ps in enumerate(scores):
            if k:
                fh.write("\n")
            n = ps.n
            fh.write(f"{n}\n")
            for h in range(n + 1):
                for m in range(1, n + 1):
                    if h != m:
                        fh.write(f"{h}\t{m}\t{float(ps.arc[h, m])!r}\n")
            if ps.sib is not None:
                for h, m, s in sibling_triples(n):
                    sc = "-" if s == h else str(s)
                    fh.write(f"{h}\t{m}\t{sc}\t{float(ps.sib[h, m, s])!r}\n")
