"""Structural-complexity regularization: mini-sample splitting and the
closed-form stability and generalization bounds it controls.

Splitting a training sentence into ``alpha`` contiguous mini-samples shrinks
the dependency scope of each sample from n to about n / alpha.  The bounds
below are pure evaluators of that effect; none of their constants are
estimated from data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from srdecode.core import LabeledSequence, Sentence


@dataclass(frozen=True)
class SplitConfig:
    reg_strength: int = 1

    def __post_init__(self):
        if isinstance(self.reg_strength, bool) or int(self.reg_strength) != self.reg_strength:
            raise ValueError("regularization strength must be an integer")
        if self.reg_strength < 1:
            raise ValueError("regularization strength must be >= 1")


def segment_lengths(n: int, alpha: int) -> list[int]:
    """Sizes ceil(n/alpha) then floor(n/alpha), longer segments first."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if alpha > n:
        raise ValueError(f"cannot split a sample of length {n} into {alpha} parts")
    q, r = divmod(n, alpha)
    return [q + 1] * r + [q] * (alpha - r)


def split_sample(sample: LabeledSequence, cfg: SplitConfig) -> list[LabeledSequence]:
    alpha = cfg.reg_strength
    if alpha == 1:
        return [sample]
    s = sample.sentence
    out = []
    start = 0
    for size in segment_lengths(len(sample), alpha):
        stop = start + size
        piece = Sentence(s.tokens[start:stop], s.pos[start:stop] if s.pos else None)
        out.append(LabeledSequence(piece, sample.tags[start:stop], sample.tagset))
        start = stop
    return out


def split_corpus(corpus, cfg: SplitConfig, strict: bool = False) -> list[LabeledSequence]:
    """Split every sentence; sentences never merge across boundaries.

    A sentence shorter than alpha is split into single tokens unless
    ``strict``, in which case it raises like :func:`split_sample`.
    """
    out = []
    for seq in corpus:
        if len(seq) < cfg.reg_strength and not strict:
            out.extend(split_sample(seq, SplitConfig(len(seq))))
        else:
            out.extend(split_sample(seq, cfg))
    return out


@dataclass(frozen=True)
class BoundParams:
    d: float
    tau: float
    rho: float
    v: float
    n: float
    m: float
    lambda_w: float
    reg_strength: float
    gamma: float
    delta: float
    empirical_risk: float = 0.0

    def __post_init__(self):
        for name in ("d", "tau", "rho", "v", "n", "m", "lambda_w", "reg_strength", "gamma"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 1.0 <= self.reg_strength <= self.n:
            raise ValueError(f"alpha must lie in [1, n], got {self.reg_strength}")
        if not math.isfinite(self.empirical_risk) or self.empirical_risk < 0:
            raise ValueError("empirical risk must be finite and non-negative")

    def _core(self) -> float:
        """d tau^2 rho^2 v^2 n^2 / (m lambda alpha): the loss stability scale."""
        p = self
        return p.d * p.tau**2 * p.rho**2 * p.v**2 * p.n**2 / (p.m * p.lambda_w * p.reg_strength)


@dataclass(frozen=True)
class OverfitBound:
    bound: float
    overfit_term: float
    magnitude: float  # the leading-order size with constants dropped


def overfit_bound(p: BoundParams) -> OverfitBound:
    core = p._core()
    conf = math.sqrt(math.log(1.0 / p.delta) / (2.0 * p.m))
    overfit = 2.0 * core + ((4.0 * p.m - 2.0) * core + p.gamma) * conf
    magnitude = (
        p.d * p.n**2 * math.sqrt(math.log(1.0 / p.delta))
        / (p.lambda_w * p.reg_strength * math.sqrt(p.m))
    )
    return OverfitBound(p.empirical_risk + overfit, overfit, magnitude)


@dataclass(frozen=True)
class StabilityBounds:
    func_stab: float
    loss_stab: float
    sample_loss_stab: float
    full_func_stab: float
    full_loss_stab: float
    full_sample_loss_stab: float


def stability_bounds(p: BoundParams) -> StabilityBounds:
    """Mini-sample stability bounds and their full-sample counterparts.

    Removing one full sample removes alpha mini-samples, so each full-sample
    bound is alpha times the mini-sample one.
    """
    a = p.reg_strength
    func = p.d * p.tau * p.rho**2 * p.v**2 * p.n**2 / (p.m * p.lambda_w * a**2)
    loss = p.tau * func
    sample_loss = p.n * loss
    return StabilityBounds(func, loss, sample_loss, a * func, a * loss, a * sample_loss)


def alpha_sweep(p: BoundParams, alphas) -> list[tuple[float, OverfitBound]]:
    out = []
    for a in alphas:
        q = BoundParams(**{**p.__dict__, "reg_strength": float(a)})
        out.append((float(a), overfit_bound(q)))
    return out
