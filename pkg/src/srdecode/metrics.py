"""Span F1 over BIO chunk tags and unlabeled attachment score.

Span convention: a span starts at ``B-X``, or at an ``I-X`` that does not
continue an open ``X`` span (the usual CoNLL repair for orphan ``I-`` tags),
and runs over the following ``I-X`` tags.  ``O`` closes any open span.  A
predicted span counts as correct only if its label and both boundaries match a
gold span exactly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Span = tuple[str, int, int]  # label, first index, last index (inclusive)


def _split(tag: str) -> tuple[str, str | None]:
    if tag == "O":
        return "O", None
    if len(tag) > 2 and tag[1] == "-" and tag[0] in "BI":
        return tag[0], tag[2:]
    raise ValueError(f"not a BIO tag: {tag!r}")


def extract_spans(tags: Sequence[str]) -> list[Span]:
    spans: list[Span] = []
    label, start = None, None
    for i, tag in enumerate(tags):
        prefix, kind = _split(tag)
        if prefix == "I" and kind == label:
            continue
        if label is not None:
            spans.append((label, start, i - 1))
        label, start = (kind, i) if prefix != "O" else (None, None)
    if label is not None:
        spans.append((label, start, len(tags) - 1))
    return spans


def render_bio(spans: Iterable[Span], length: int) -> list[str]:
    """Inverse of :func:`extract_spans` for non-overlapping spans."""
    tags = ["O"] * length
    for label, first, last in spans:
        if not 0 <= first <= last < length:
            raise ValueError(f"span {(label, first, last)} out of range")
        if any(t != "O" for t in tags[first : last + 1]):
            raise ValueError("spans overlap")
        tags[first] = f"B-{label}"
        for i in range(first + 1, last + 1):
            tags[i] = f"I-{label}"
    return tags


def _percent(num: int, den: int) -> float:
    return 100.0 * num / den if den else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class LabelScore:
    gold: int
    predicted: int
    correct: int

    @property
    def precision(self) -> float:
        return _percent(self.correct, self.predicted)

    @property
    def recall(self) -> float:
        return _percent(self.correct, self.gold)

    @property
    def f1(self) -> float:
        return _f1(self.precision, self.recall)


@dataclass(frozen=True)
class SpanF1Report:
    gold: int
    predicted: int
    correct: int
    per_label: dict[str, LabelScore] = field(default_factory=dict)

    @property
    def precision(self) -> float:
        return _percent(self.correct, self.predicted)

    @property
    def recall(self) -> float:
        return _percent(self.correct, self.gold)

    @property
    def f1(self) -> float:
        return _f1(self.precision, self.recall)

    def rows(self) -> list[tuple[str, int, int, int, str, str, str]]:
        """TSV-ready rows, overall first, numbers at two decimals."""

        def row(name, s):
            return (name, s.gold, s.predicted, s.correct,
                    f"{s.precision:.2f}", f"{s.recall:.2f}", f"{s.f1:.2f}")

        return [row("overall", self)] + [row(k, v) for k, v in sorted(self.per_label.items())]


def _as_labels(seq) -> Sequence[str]:
    return seq.labels if hasattr(seq, "labels") else seq


def span_f1(gold: Sequence, predicted: Sequence) -> SpanF1Report:
    """Micro-averaged span precision, recall and F1 (percentages).

    Items may be :class:`~srdecode.core.LabeledSequence` objects or plain
    sequences of BIO tag strings.
    """
    if len(gold) != len(predicted):
        raise ValueError(f"{len(gold)} gold sentences vs {len(predicted)} predicted")
    n_gold, n_pred, n_corr = Counter(), Counter(), Counter()
    for i, (g, p) in enumerate(zip(gold, predicted)):
        g, p = _as_labels(g), _as_labels(p)
        if len(g) != len(p):
            raise ValueError(f"sentence {i}: {len(g)} gold tags vs {len(p)} predicted")
        gs, ps = set(extract_spans(g)), set(extract_spans(p))
        n_gold.update(s[0] for s in gs)
        n_pred.update(s[0] for s in ps)
        n_corr.update(s[0] for s in gs & ps)
    labels = set(n_gold) | set(n_pred)
    per_label = {k: LabelScore(n_gold[k], n_pred[k], n_corr[k]) for k in labels}
    return SpanF1Report(
        sum(n_gold.values()), sum(n_pred.values()), sum(n_corr.values()), per_label
    )


@dataclass(frozen=True)
class UASReport:
    correct: int
    total: int

    @property
    def uas(self) -> float:
        return _percent(self.correct, self.total)


def uas(gold: Sequence, predicted: Sequence) -> UASReport:
    """Share of words whose predicted head equals the gold head.

    Items are :class:`~srdecode.dep.trees.ArcVector` objects (anything with a
    ``heads`` sequence) or plain head lists.
    """
    if len(gold) != len(predicted):
        raise ValueError(f"{len(gold)} gold trees vs {len(predicted)} predicted")
    correct = total = 0
    for i, (g, p) in enumerate(zip(gold, predicted)):
        gh = getattr(g, "heads", g)
        ph = getattr(p, "heads", p)
        if len(gh) != len(ph):
            raise ValueError(f"sentence {i}: length {len(gh)} vs {len(ph)}")
        correct += sum(a == b for a, b in zip(gh, ph))
        total += len(gh)
    return UASReport(correct, total)
