"""Feature templates and averaged perceptron training for the parsers.

Arc h -> m fires: head word/POS, modifier word/POS and their conjunctions,
each also conjoined with direction and a distance bucket (1, 2, 3, 4, 5+),
plus the bag of POS tags strictly between head and modifier.  Sibling part
(h, m, s) fires the POS triple (head, inner sibling or NULL, modifier) with
direction.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from srdecode.dep.decode import eisner_decode, sibling_decode
from srdecode.dep.trees import ArcVector, DepInstance, PartScores, sibling_triples
from srdecode.linear import AveragedPerceptron, LinearModel

log = logging.getLogger(__name__)

ROOT = "<ROOT>"
MODEL_FORMAT = "srdecode-dep-model"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    pass


def _word(x: DepInstance, i: int) -> str:
    return ROOT if i == 0 else x.words[i - 1]


def _pos(x: DepInstance, i: int) -> str:
    return ROOT if i == 0 else x.pos[i - 1]


def arc_features(x: DepInstance, h: int, m: int) -> list[str]:
    hw, hp, mw, mp = _word(x, h), _pos(x, h), _word(x, m), _pos(x, m)
    direction = "R" if h < m else "L"
    dist = abs(h - m)
    attach = f"{direction}{dist if dist < 5 else '5+'}"
    base = [
        f"hw={hw}",
        f"hp={hp}",
        f"mw={mw}",
        f"mp={mp}",
        f"hwp={hw}/{hp}",
        f"mwp={mw}/{mp}",
        f"hmw={hw}/{mw}",
        f"hmp={hp}/{mp}",
        f"hmwp={hw}/{hp}/{mw}/{mp}",
    ]
    feats = base + [f"{b}&{attach}" for b in base] + [f"attach={attach}"]
    lo, hi = min(h, m), max(h, m)
    between = sorted({_pos(x, b) for b in range(lo + 1, hi)})
    feats.extend(f"bp={hp}/{b}/{mp}" for b in between)
    return feats


def sibling_features(x: DepInstance, h: int, m: int, s: int) -> list[str]:
    direction = "R" if h < m else "L"
    sp = "NULL" if s == h else _pos(x, s)
    return [f"sib={_pos(x, h)}/{sp}/{_pos(x, m)}/{direction}"]


class _Parts:
    """Feature rows of every candidate part of one sentence, flattened."""

    def __init__(self, x: DepInstance, order: int, index, grow: bool):
        n = len(x)
        N = n + 1
        self.n = n
        self.order = order

        def rows(feats):
            out = []
            for f in feats:
                i = index.get(f)
                if i is None and grow:
                    i = index[f] = len(index)
                if i is not None:
                    out.append(i)
            return out

        arc_rows, arc_seg = [], []
        self.arc_rows = {}
        for h in range(N):
            for m in range(1, N):
                if h == m:
                    continue
                r = rows(arc_features(x, h, m))
                self.arc_rows[h, m] = np.array(r, dtype=np.intp)
                arc_rows.extend(r)
                arc_seg.extend([h * N + m] * len(r))
        self.arc_flat = np.array(arc_rows, dtype=np.intp)
        self.arc_seg = np.array(arc_seg, dtype=np.intp)

        self.sib_rows = {}
        if order == 2:
            sib_rows, sib_seg = [], []
            for h, m, s in sibling_triples(n):
                r = rows(sibling_features(x, h, m, s))
                self.sib_rows[h, m, s] = np.array(r, dtype=np.intp)
                sib_rows.extend(r)
                sib_seg.extend([(h * N + m) * N + s] * len(r))
            self.sib_flat = np.array(sib_rows, dtype=np.intp)
            self.sib_seg = np.array(sib_seg, dtype=np.intp)

    def scores(self, w: np.ndarray) -> PartScores:
        N = self.n + 1
        arc = np.bincount(self.arc_seg, weights=w[self.arc_flat], minlength=N * N)
        arc = arc.reshape(N, N)
        if self.order == 1:
            return PartScores(arc)
        sib = np.bincount(self.sib_seg, weights=w[self.sib_flat], minlength=N**3)
        return PartScores(arc, sib.reshape(N, N, N))

    def decode(self, w: np.ndarray) -> ArcVector:
        scores = self.scores(w)
        return eisner_decode(scores.arc) if self.order == 1 else sibling_decode(scores)

    def part_rows(self, tree: ArcVector) -> list[np.ndarray]:
        out = [self.arc_rows[h, m] for m, h in enumerate(tree.heads, start=1)]
        if self.order == 2:
            out.extend(self.sib_rows[p] for p in tree.sibling_parts())
        return out


@dataclass
class DepModel:
    order: int
    weights: LinearModel
    epoch_mistakes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("dependency model order must be 1 or 2")

    def part_scores(self, x: DepInstance) -> PartScores:
        parts = _Parts(x, self.order, self.weights.index, grow=False)
        return parts.scores(self.weights.weights[:, 0])

    def parse(self, x: DepInstance) -> ArcVector:
        parts = _Parts(x, self.order, self.weights.index, grow=False)
        return parts.decode(self.weights.weights[:, 0])


def train_dep_perceptron(
    corpus: Sequence[tuple[DepInstance, ArcVector]],
    order: int,
    epochs: int,
    seed: int,
) -> DepModel:
    """Averaged perceptron with exact projective DP as the inference step.

    Sentences whose gold tree is non-projective are skipped with a warning.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    usable = []
    for i, (x, tree) in enumerate(corpus):
        if not tree.projective:
            log.warning("skipping non-projective sentence %d", i)
            continue
        usable.append((x, tree))
    if not usable:
        raise ValueError("no projective training sentences")

    index: dict[str, int] = {}
    parts = [_Parts(x, order, index, grow=True) for x, _ in usable]
    golds = [tree for _, tree in usable]
    learner = AveragedPerceptron((len(index), 1))
    w = learner.current[:, 0]
    rng = random.Random(seed)
    visit = list(range(len(usable)))
    mistakes = []
    for epoch in range(epochs):
        rng.shuffle(visit)
        wrong = 0
        for i in visit:
            pred = parts[i].decode(w)
            if pred != golds[i]:
                wrong += 1
                for r in parts[i].part_rows(golds[i]):
                    learner.add(r, 0, 1.0)
                for r in parts[i].part_rows(pred):
                    learner.add(r, 0, -1.0)
            learner.tick()
        mistakes.append(wrong)
        log.info("order %d epoch %d: %d/%d mistakes", order, epoch + 1, wrong, len(usable))
    return DepModel(order, LinearModel(index, learner.averaged()), tuple(mistakes))


def save_dep_model(model: DepModel, path) -> None:
    weights = {f: row[0] for f, row in model.weights.nonzero_rows().items()}
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "order": model.order,
        "weights": weights,
        "epoch_mistakes": list(model.epoch_mistakes),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def load_dep_model(path) -> DepModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("format") != MODEL_FORMAT:
            raise ModelFormatError(f"{path}: not a dependency model file")
        if doc.get("version") != MODEL_VERSION:
            raise ModelFormatError(f"{path}: unsupported version {doc.get('version')}")
        features = sorted(doc["weights"])
        index = {f: i for i, f in enumerate(features)}
        weights = np.array([[float(doc["weights"][f])] for f in features]).reshape(-1, 1)
        return DepModel(
            int(doc["order"]), LinearModel(index, weights), tuple(doc.get("epoch_mistakes", ()))
        )
    except ModelFormatError:
        raise
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ModelFormatError(f"{path}: cannot load dependency model: {exc}") from exc
