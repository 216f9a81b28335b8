"""Projective dependency decoders: first-order (Eisner) and sibling second-order.

Both charts carry a pair per item: the real-valued score and an integer tie
key.  The tie key of arc h -> m is ``-h * (n+1) ** (n - m)``, so summed over a
tree it is minus the head list read as a base-(n+1) number.  Comparing pairs
lexicographically therefore returns, among equally scored trees, the one whose
head list is lexicographically smallest.
"""

from __future__ import annotations

import numpy as np

from srdecode.dep.trees import ArcVector, PartScores, is_projective

NEG = float("-inf")


def _tie_keys(n: int) -> list[list[int]]:
    base = n + 1
    return [[-h * base ** (n - m) if m >= 1 else 0 for m in range(n + 1)] for h in range(n + 1)]


def _finish(heads: list[int]) -> ArcVector:
    tree = ArcVector(tuple(heads[1:]))
    if not tree.projective:
        raise RuntimeError(f"decoder produced a non-projective tree {tree.heads}")
    return tree


def eisner_decode(arc: np.ndarray) -> ArcVector:
    """Highest-scoring projective tree under arc-factored scores."""
    arc = np.asarray(arc, dtype=float)
    n = arc.shape[0] - 1
    if n < 1:
        raise ValueError("sentence must have at least one word")
    a = arc.tolist()
    tk = _tie_keys(n)
    N = n + 1
    # [s][t][d]: d=0 head at t (left arcs), d=1 head at s (right arcs)
    Cv = [[[NEG, NEG] for _ in range(N)] for _ in range(N)]
    Ck = [[[0, 0] for _ in range(N)] for _ in range(N)]
    Iv = [[[NEG, NEG] for _ in range(N)] for _ in range(N)]
    Ik = [[[0, 0] for _ in range(N)] for _ in range(N)]
    Cb = [[[0, 0] for _ in range(N)] for _ in range(N)]
    Ib = [[0] * N for _ in range(N)]
    for s in range(N):
        Cv[s][s] = [0.0, 0.0]

    for k in range(1, N):
        for s in range(N - k):
            t = s + k
            best, bk, br = NEG, 0, s
            for r in range(s, t):
                v = Cv[s][r][1] + Cv[r + 1][t][0]
                kk = Ck[s][r][1] + Ck[r + 1][t][0]
                if v > best or (v == best and kk > bk):
                    best, bk, br = v, kk, r
            Ib[s][t] = br
            if s > 0:
                Iv[s][t][0] = best + a[t][s]
                Ik[s][t][0] = bk + tk[t][s]
            Iv[s][t][1] = best + a[s][t]
            Ik[s][t][1] = bk + tk[s][t]

            best, bk, br = NEG, 0, s
            for r in range(s, t):
                v = Cv[s][r][0] + Iv[r][t][0]
                kk = Ck[s][r][0] + Ik[r][t][0]
                if v > best or (v == best and kk > bk):
                    best, bk, br = v, kk, r
            Cv[s][t][0], Ck[s][t][0], Cb[s][t][0] = best, bk, br

            best, bk, br = NEG, 0, t
            for r in range(s + 1, t + 1):
                v = Iv[s][r][1] + Cv[r][t][1]
                kk = Ik[s][r][1] + Ck[r][t][1]
                if v > best or (v == best and kk > bk):
                    best, bk, br = v, kk, r
            Cv[s][t][1], Ck[s][t][1], Cb[s][t][1] = best, bk, br

    heads = [-1] * N

    def complete(s, t, d):
        if s == t:
            return
        r = Cb[s][t][d]
        if d == 1:
            incomplete(s, r, 1)
            complete(r, t, 1)
        else:
            complete(s, r, 0)
            incomplete(r, t, 0)

    def incomplete(s, t, d):
        if d == 1:
            heads[t] = s
        else:
            heads[s] = t
        r = Ib[s][t]
        complete(s, r, 1)
        complete(r + 1, t, 0)

    complete(0, n, 1)
    return _finish(heads)


def sibling_decode(scores: PartScores) -> ArcVector:
    """Highest-scoring projective tree under arc + adjacent-sibling scores.

    Chart items, with h the head:
      ``C[h][e]``  complete span from h to e, no further modifiers of h past e;
      ``I[h][m]``  span h..m holding arc h -> m, h's inner modifiers on that
                   side and m's subtree on the side facing h;
      ``S[a][b]``  a < b adjacent siblings: a's subtree facing b plus b's
                   subtree facing a.
    """
    if scores.sib is None:
        raise ValueError("sibling decoding needs sibling scores")
    n = scores.n
    if n < 1:
        raise ValueError("sentence must have at least one word")
    a = scores.arc.tolist()
    sib = scores.sib.tolist()
    tk = _tie_keys(n)
    N = n + 1
    Cv = [[NEG] * N for _ in range(N)]
    Ck = [[0] * N for _ in range(N)]
    Cb = [[0] * N for _ in range(N)]
    Iv = [[NEG] * N for _ in range(N)]
    Ik = [[0] * N for _ in range(N)]
    Ib = [[0] * N for _ in range(N)]  # inner sibling, or the head for NULL
    Sv = [[NEG] * N for _ in range(N)]
    Sk = [[0] * N for _ in range(N)]
    Sb = [[0] * N for _ in range(N)]
    for s in range(N):
        Cv[s][s] = 0.0

    for k in range(1, N):
        for s in range(N - k):
            t = s + k
            # sibling item
            best, bk, br = NEG, 0, s
            for r in range(s, t):
                v = Cv[s][r] + Cv[t][r + 1]
                kk = Ck[s][r] + Ck[t][r + 1]
                if v > best or (v == best and kk > bk):
                    best, bk, br = v, kk, r
            Sv[s][t], Sk[s][t], Sb[s][t] = best, bk, br

            # right arc s -> t
            sib_row = sib[s][t]
            best = Cv[t][s + 1] + sib_row[s]
            bk, br = Ck[t][s + 1], s
            for r in range(s + 1, t):
                v = Iv[s][r] + Sv[r][t] + sib_row[r]
                kk = Ik[s][r] + Sk[r][t]
                if v > best or (v == best and kk > bk):
                    best, bk, br = v, kk, r
            Iv[s][t], Ik[s][t], Ib[s][t] = best + a[s][t], bk + tk[s][t], br

            # left arc t -> s (the root is never a modifier)
            if s > 0:
                sib_row = sib[t][s]
                best = Cv[s][t - 1] + sib_row[t]
                bk, br = Ck[s][t - 1], t
                for r in range(s + 1, t):
                    v = Iv[t][r] + Sv[s][r] + sib_row[r]
                    kk = Ik[t][r] + Sk[s][r]
                    if v > best or (v == best and kk > bk):
                        best, bk, br = v, kk, r
                Iv[t][s], Ik[t][s], Ib[t][s] = best + a[t][s], bk + tk[t][s], br

            # complete items
            best, bk, br = NEG, 0, t
            for r in range(s + 1, t + 1):
                v = Iv[s][r] + Cv[r][t]
                kk = Ik[s][r] + Ck[r][t]
                if v > best or (v == best and kk > bk):
                    best, bk, br = v, kk, r
            Cv[s][t], Ck[s][t], Cb[s][t] = best, bk, br

            best, bk, br = NEG, 0, s
            for r in range(s, t):
                v = Iv[t][r] + Cv[r][s]
                kk = Ik[t][r] + Ck[r][s]
                if v > best or (v == best and kk > bk):
                    best, bk, br = v, kk, r
            Cv[t][s], Ck[t][s], Cb[t][s] = best, bk, br

    heads = [-1] * N

    def complete(h, e):
        if h == e:
            return
        m = Cb[h][e]
        incomplete(h, m)
        complete(m, e)

    def incomplete(h, m):
        heads[m] = h
        r = Ib[h][m]
        if h < m:
            if r == h:
                complete(m, h + 1)
            else:
                incomplete(h, r)
                sibling(r, m)
        else:
            if r == h:
                complete(m, h - 1)
            else:
                incomplete(h, r)
                sibling(m, r)

    def sibling(lo, hi):
        r = Sb[lo][hi]
        complete(lo, r)
        complete(hi, r + 1)

    complete(0, n)
    return _finish(heads)


def check_tree(tree: ArcVector, n: int) -> None:
    """Structural check applied to decoder output in tests and the CLI."""
    if len(tree) != n:
        raise ValueError(f"tree has {len(tree)} words, expected {n}")
    if not is_projective(tree.heads):
        raise ValueError("tree is not projective")
