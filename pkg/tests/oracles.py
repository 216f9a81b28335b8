"""Independent reference implementations used as test oracles.

Nothing here calls the package's scoring, enumeration or decoding code: the
sequence oracle scores dense arrays directly and the tree oracle walks every
head list, filtering trees with its own cycle and crossing checks.
"""

from __future__ import annotations

import itertools

import numpy as np

from srdecode.core import ScoreTable, TagSet
from srdecode.dep.trees import PartScores
from srdecode.seq.decode import MultiOrderBundle


# -- sequences ---------------------------------------------------------------


def random_arrays(rng: np.random.Generator, T: int, K: int, n: int, integer: bool = False):
    """Dense ``(T, K, ..., K)`` score arrays for orders 1..n."""
    out = []
    for o in range(1, n + 1):
        shape = (T,) + (K,) * o
        if integer:
            out.append(rng.integers(-2, 3, size=shape).astype(float))
        else:
            out.append(rng.normal(size=shape))
    return out


def bundle_from_arrays(arrays, K: int, weights=None) -> MultiOrderBundle:
    tags = TagSet(tuple(f"T{i}" for i in range(K)))
    tables = tuple(ScoreTable.from_dense(o, a) for o, a in enumerate(arrays, start=1))
    return MultiOrderBundle(tags, tables, weights)


def dense_score(arrays, seq, weights=None) -> float:
    """Score of ``seq``; components before the sentence start read index 0."""
    total = 0.0
    for o, arr in enumerate(arrays, start=1):
        w = 1.0 if weights is None else weights[o - 1]
        if w == 0.0:
            continue
        for t in range(len(seq)):
            idx = []
            for p in range(t - o + 1, t + 1):
                idx.append(seq[p] if p >= 0 else 0)
            total += w * float(arr[(t, *idx)])
    return total


def dense_brute_force(arrays, K: int, T: int, weights=None) -> tuple[int, ...]:
    best, best_seq = -np.inf, None
    for seq in itertools.product(range(K), repeat=T):
        v = dense_score(arrays, seq, weights)
        if v > best:
            best, best_seq = v, seq
    return best_seq


# -- trees -------------------------------------------------------------------


def _acyclic(heads) -> bool:
    for start in range(1, len(heads) + 1):
        seen = set()
        k = start
        while k != 0:
            if k in seen:
                return False
            seen.add(k)
            k = heads[k - 1]
    return True


def _projective(heads) -> bool:
    arcs = [(min(h, m), max(h, m)) for m, h in enumerate(heads, start=1)]
    for (a, b), (c, d) in itertools.combinations(arcs, 2):
        if a < c < b < d or c < a < d < b:
            return False
    return True


def all_projective_head_lists(n: int) -> list[tuple[int, ...]]:
    """Every projective tree over words 1..n, in lexicographic head-list order."""
    out = []
    for heads in itertools.product(range(n + 1), repeat=n):
        if any(h == m for m, h in enumerate(heads, start=1)):
            continue
        if _acyclic(heads) and _projective(heads):
            out.append(heads)
    return out


def sibling_parts(heads) -> list[tuple[int, int, int]]:
    n = len(heads)
    parts = []
    for h in range(n + 1):
        right = [m for m in range(h + 1, n + 1) if heads[m - 1] == h]
        left = [m for m in range(h - 1, 0, -1) if heads[m - 1] == h]
        for side in (right, left):
            inner = h
            for m in side:
                parts.append((h, m, inner))
                inner = m
    return parts


def tree_value(arc, sib, heads) -> float:
    v = sum(float(arc[h, m]) for m, h in enumerate(heads, start=1))
    if sib is not None:
        v += sum(float(sib[p]) for p in sibling_parts(heads))
    return v


def tree_oracle(arc, sib=None) -> tuple[tuple[int, ...], float]:
    n = arc.shape[0] - 1
    best, best_heads = -np.inf, None
    for heads in all_projective_head_lists(n):
        v = tree_value(arc, sib, heads)
        if v > best:
            best, best_heads = v, heads
    return best_heads, best


def joint_oracle(f: PartScores, g: PartScores, lam: float) -> tuple[tuple[int, ...], float]:
    best, best_heads = -np.inf, None
    for heads in all_projective_head_lists(f.n):
        v = lam * tree_value(f.arc, None, heads) + (1 - lam) * tree_value(g.arc, g.sib, heads)
        if v > best:
            best, best_heads = v, heads
    return best_heads, best


def random_parts(rng: np.random.Generator, n: int, second_order: bool, integer: bool = False):
    N = n + 1

    def draw(shape):
        if integer:
            return rng.integers(-2, 3, size=shape).astype(float)
        return rng.normal(size=shape)

    return PartScores(draw((N, N)), draw((N, N, N)) if second_order else None)
