"""Dependency trees, part scores and the brute-force tree oracle.

Words are numbered 1..n and node 0 is the artificial root.  Arc scores live in
an ``(n+1, n+1)`` array where ``arc[h, m]`` scores the arc h -> m; column 0 and
the diagonal are never read.  Sibling scores live in an ``(n+1, n+1, n+1)``
array where ``sib[h, m, s]`` scores modifier ``m`` of head ``h`` whose adjacent
inner sibling on the same side is ``s``; the innermost modifier uses
``s = h`` to stand for NULL.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

BRUTE_FORCE_MAX = 8


@dataclass(frozen=True)
class DepInstance:
    words: tuple[str, ...]
    pos: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "pos", tuple(self.pos))
        if not self.words:
            raise ValueError("sentence must be non-empty")
        if len(self.pos) != len(self.words):
            raise ValueError("pos length must equal word length")

    def __len__(self) -> int:
        return len(self.words)


def _has_cycle(heads: Sequence[int]) -> bool:
    n = len(heads)
    state = [0] * (n + 1)  # 0 unvisited, 1 on current path, 2 reaches root
    state[0] = 2
    for j in range(1, n + 1):
        path = []
        k = j
        while state[k] == 0:
            state[k] = 1
            path.append(k)
            k = heads[k - 1]
        if state[k] == 1:
            return True
        for p in path:
            state[p] = 2
    return False


def is_projective(heads: Sequence[int]) -> bool:
    arcs = [(min(h, m), max(h, m)) for m, h in enumerate(heads, start=1)]
    for a, b in arcs:
        for c, d in arcs:
            if a < c < b < d:
                return False
    return True


@dataclass(frozen=True)
class ArcVector:
    """A dependency tree as the 0/1 indicator over arcs (i, j), j in 1..n.

    Stored as the head list: ``heads[j - 1]`` is the head of word j.  Trees read
    from treebanks may be non-projective; decoders only ever emit projective
    ones.
    """

    heads: tuple[int, ...]

    def __post_init__(self):
        heads = tuple(int(h) for h in self.heads)
        object.__setattr__(self, "heads", heads)
        n = len(heads)
        if n == 0:
            raise ValueError("empty tree")
        for m, h in enumerate(heads, start=1):
            if not 0 <= h <= n or h == m:
                raise ValueError(f"invalid head {h} for word {m}")
        if _has_cycle(heads):
            raise ValueError("cycle")

    def __len__(self) -> int:
        return len(self.heads)

    @property
    def projective(self) -> bool:
        return is_projective(self.heads)

    def __getitem__(self, arc: tuple[int, int]) -> int:
        i, j = arc
        return int(self.heads[j - 1] == i)

    def arcs(self) -> set[tuple[int, int]]:
        return {(h, m) for m, h in enumerate(self.heads, start=1)}

    def indicator(self) -> np.ndarray:
        n = len(self.heads)
        y = np.zeros((n + 1, n + 1))
        y[list(self.heads), list(range(1, n + 1))] = 1.0
        return y

    def sibling_parts(self) -> list[tuple[int, int, int]]:
        """``(head, modifier, inner sibling)`` triples, NULL written as head."""
        n = len(self.heads)
        kids: list[list[int]] = [[] for _ in range(n + 1)]
        for m, h in enumerate(self.heads, start=1):
            kids[h].append(m)
        parts = []
        for h in range(n + 1):
            left = sorted((m for m in kids[h] if m < h), reverse=True)
            right = sorted(m for m in kids[h] if m > h)
            for side in (left, right):
                prev = h
                for m in side:
                    parts.append((h, m, prev))
                    prev = m
        return parts


@dataclass(frozen=True)
class PartScores:
    arc: np.ndarray
    sib: np.ndarray | None = None

    def __post_init__(self):
        arc = np.asarray(self.arc, dtype=float)
        if arc.ndim != 2 or arc.shape[0] != arc.shape[1] or arc.shape[0] < 2:
            raise ValueError("arc scores must be an (n+1, n+1) array with n >= 1")
        object.__setattr__(self, "arc", arc)
        if not np.all(np.isfinite(arc)):
            raise ValueError("arc scores must be finite")
        if self.sib is not None:
            sib = np.asarray(self.sib, dtype=float)
            if sib.shape != (arc.shape[0],) * 3:
                raise ValueError("sibling scores must be (n+1, n+1, n+1)")
            if not np.all(np.isfinite(sib)):
                raise ValueError("sibling scores must be finite")
            object.__setattr__(self, "sib", sib)

    @property
    def n(self) -> int:
        return self.arc.shape[0] - 1

    @property
    def second_order(self) -> bool:
        return self.sib is not None

    def scaled(self, factor: float) -> "PartScores":
        return PartScores(
            self.arc * factor, None if self.sib is None else self.sib * factor
        )

    def tree_score(self, tree: ArcVector) -> float:
        if len(tree) != self.n:
            raise ValueError("tree length does not match the scores")
        total = sum(self.arc[h, m] for m, h in enumerate(tree.heads, start=1))
        if self.sib is not None:
            total += sum(self.sib[h, m, s] for h, m, s in tree.sibling_parts())
        return float(total)


def sibling_triples(n: int) -> Iterator[tuple[int, int, int]]:
    """Every ``(h, m, s)`` sibling part that can occur in a projective tree."""
    for h in range(n + 1):
        for m in range(1, n + 1):
            if m == h:
                continue
            yield h, m, h
            lo, hi = (h + 1, m) if h < m else (m + 1, h)
            for s in range(lo, hi):
                yield h, m, s


def projective_trees(n: int) -> Iterator[ArcVector]:
    """Every projective tree over words 1..n rooted at 0, in head-list order.

    The root may take several children.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    heads = [0] * n

    def crosses(m: int, h: int) -> bool:
        a, b = min(h, m), max(h, m)
        for m2 in range(1, m):
            h2 = heads[m2 - 1]
            c, d = min(h2, m2), max(h2, m2)
            if a < c < b < d or c < a < d < b:
                return True
        return False

    def rec(m: int):
        if m > n:
            if not _has_cycle(heads):
                yield ArcVector(tuple(heads))
            return
        for h in range(n + 1):
            if h == m or crosses(m, h):
                continue
            heads[m - 1] = h
            yield from rec(m + 1)
        heads[m - 1] = 0

    yield from rec(1)


def tree_brute_force(scores: PartScores) -> ArcVector:
    """Best projective tree by enumeration; ties go to the smallest head list."""
    n = scores.n
    if n > BRUTE_FORCE_MAX:
        raise ValueError(f"n={n} exceeds the brute-force limit of {BRUTE_FORCE_MAX}")
    best, best_tree = float("-inf"), None
    for tree in projective_trees(n):
        v = scores.tree_score(tree)
        if v > best:
            best, best_tree = v, tree
    return best_tree
