"""Sparse-feature linear models and the averaged perceptron bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


@dataclass
class LinearModel:
    """Weights for string features, one column per output class.

    Chain models use one column per n-gram tag; tree models use a single
    column.  Features missing from ``index`` contribute nothing.
    """

    index: Mapping[str, int]
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 2 or self.weights.shape[0] != len(self.index):
            raise ValueError("weights must be (num_features, num_classes)")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")

    @classmethod
    def zeros(cls, features: Iterable[str], num_classes: int = 1) -> "LinearModel":
        index = {}
        for f in features:
            index.setdefault(f, len(index))
        return cls(index, np.zeros((len(index), num_classes)))

    @property
    def num_classes(self) -> int:
        return self.weights.shape[1]

    def rows(self, features: Iterable[str]) -> np.ndarray:
        return np.fromiter(
            (self.index[f] for f in features if f in self.index), dtype=np.intp
        )

    def score(self, features: Iterable[str]) -> np.ndarray:
        """Per-class score of a bag of features."""
        return self.weights[self.rows(features)].sum(axis=0)

    def nonzero_rows(self) -> dict[str, list[float]]:
        return {
            f: self.weights[i].tolist()
            for f, i in sorted(self.index.items())
            if np.any(self.weights[i] != 0.0)
        }


class AveragedPerceptron:
    """Lazy weight averaging.

    ``current`` holds the running weights used for decoding during training;
    :meth:`averaged` returns the mean of the weights over every example seen.
    """

    def __init__(self, shape: tuple[int, int]):
        self.current = np.zeros(shape)
        self._acc = np.zeros(shape)
        self._step = 1

    def add(self, rows: np.ndarray, col: int | np.ndarray, delta: float) -> None:
        np.add.at(self.current, (rows, col), delta)
        np.add.at(self._acc, (rows, col), self._step * delta)

    def tick(self) -> None:
        self._step += 1

    def averaged(self) -> np.ndarray:
        return self.current - self._acc / self._step
