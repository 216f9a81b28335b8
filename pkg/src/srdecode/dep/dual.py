"""SR decoding for parsing by dual decomposition.

The simple (first-order) model ``f`` and the complex (sibling) model ``g`` must
agree on every arc.  Relaxing that constraint with multipliers ``u`` splits the
problem into two independent decodes; a subgradient method on ``u`` drives
them toward agreement, and agreement certifies that the shared tree maximizes
``lam * f(y) + (1 - lam) * g(y)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from srdecode.dep.decode import eisner_decode, sibling_decode
from srdecode.dep.trees import ArcVector, PartScores

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 500


@dataclass
class DualState:
    u: np.ndarray
    k: int = 0
    max_iter: int = DEFAULT_MAX_ITER
    step: float = 0.0
    agreed: bool = False
    dual_values: list[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.dual_values)


def dual_value(
    f: PartScores, g: PartScores, u: np.ndarray, y: ArcVector, z: ArcVector
) -> float:
    """L(u) given the two subproblem maximizers ``y`` and ``z``.

    ``f`` and ``g`` are taken as already scaled by the combination weight.
    """
    uy = float(np.sum(u * y.indicator()))
    uz = float(np.sum(u * z.indicator()))
    return f.tree_score(y) + uy + g.tree_score(z) - uz


def default_eta0(f: PartScores, g: PartScores) -> float:
    """Largest absolute arc score over both models (falls back to 1)."""
    n = f.n
    mask = np.ones((n + 1, n + 1), dtype=bool)
    mask[:, 0] = False
    np.fill_diagonal(mask, False)
    eta = max(np.abs(f.arc[mask]).max(), np.abs(g.arc[mask]).max())
    if eta == 0.0 and g.sib is not None:
        eta = float(np.abs(g.sib).max())
    return float(eta) if eta > 0.0 else 1.0


def sr_dual_decode(
    f: PartScores,
    g: PartScores,
    lam: float = 0.5,
    max_iter: int = DEFAULT_MAX_ITER,
    eta0: float | None = None,
) -> tuple[ArcVector, DualState]:
    """Jointly decode a first-order model ``f`` and a sibling model ``g``.

    Runs iterations k = 0..max_iter.  Step sizes follow
    ``eta0 / (1 + number of iterations whose dual value went up)``.  On
    agreement the common tree is returned with ``agreed=True``; otherwise the
    complex-model tree from the iteration with the lowest dual value.
    At ``lam`` = 1 or 0 one model carries no weight and the other is decoded
    directly.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if max_iter < 0:
        raise ValueError("max_iter must be >= 0")
    if f.sib is not None:
        raise ValueError("the simple model must be first-order")
    if g.sib is None:
        raise ValueError("the complex model needs sibling scores")
    if f.n != g.n:
        raise ValueError("models score different sentence lengths")
    n = f.n
    u = np.zeros((n + 1, n + 1))
    state = DualState(u=u, max_iter=max_iter)

    if lam == 1.0 or lam == 0.0:
        tree = eisner_decode(f.arc) if lam == 1.0 else sibling_decode(g)
        value = f.tree_score(tree) if lam == 1.0 else g.tree_score(tree)
        state.agreed = True
        state.dual_values.append(value)
        return tree, state

    fs, gs = f.scaled(lam), g.scaled(1.0 - lam)
    if eta0 is None:
        eta0 = default_eta0(fs, gs)
    if eta0 <= 0:
        raise ValueError("eta0 must be positive")

    best_value, best_z = float("inf"), None
    increases = 0
    for k in range(max_iter + 1):
        state.k = k
        y = eisner_decode(fs.arc + u)
        z = sibling_decode(PartScores(gs.arc - u, gs.sib))
        value = dual_value(fs, gs, u, y, z)
        if state.dual_values and value > state.dual_values[-1]:
            increases += 1
        state.dual_values.append(value)
        if value < best_value:
            best_value, best_z = value, z
        if y == z:
            state.agreed = True
            state.u = u
            return z, state
        state.step = eta0 / (1.0 + increases)
        u = u - state.step * (y.indicator() - z.indicator())
    state.u = u
    log.debug("no agreement after %d iterations", max_iter + 1)
    return best_z, state


def joint_score(f: PartScores, g: PartScores, lam: float, tree: ArcVector) -> float:
    """Primal objective ``lam * f(tree) + (1 - lam) * g(tree)``."""
    return lam * f.tree_score(tree) + (1.0 - lam) * g.tree_score(tree)
