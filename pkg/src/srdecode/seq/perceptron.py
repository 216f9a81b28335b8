"""Averaged structured perceptron over order-n tag sequences."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from srdecode.core import (
    BOS,
    LabeledSequence,
    NGramTag,
    ScoreTable,
    Sentence,
    TagSet,
    ngram_at,
)
from srdecode.linear import AveragedPerceptron, LinearModel
from srdecode.seq.decode import MultiOrderBundle, PruneConfig, viterbi_tags
from srdecode.seq.features import DEFAULT_FEATURE_SPEC, check_spec, sentence_features
from srdecode.seq.ngrams import build_ngram_tagset

log = logging.getLogger(__name__)

MODEL_FORMAT = "srdecode-chain-model"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    pass


@dataclass
class ChainModel:
    """An order-n tagger: one weight per (observation feature, n-gram tag)."""

    order: int
    tagset: TagSet
    ngrams: tuple[tuple[int, ...], ...]
    weights: LinearModel
    feature_spec: tuple[str, ...] = DEFAULT_FEATURE_SPEC
    epoch_mistakes: tuple[int, ...] = ()
    _columns_by_pad: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.ngrams = tuple(tuple(z) for z in self.ngrams)
        self.feature_spec = check_spec(self.feature_spec)
        if self.weights.num_classes != len(self.ngrams):
            raise ValueError("one weight column per n-gram tag is required")
        for z in self.ngrams:
            if len(z) != self.order:
                raise ValueError(f"n-gram {z} does not have order {self.order}")
        by_pad: dict[int, list[int]] = {}
        for col, z in enumerate(self.ngrams):
            by_pad.setdefault(z.count(BOS), []).append(col)
        self._columns_by_pad = by_pad

    def columns_at(self, t: int) -> list[int]:
        """Columns whose n-gram has the BOS padding position ``t`` requires."""
        return self._columns_by_pad.get(max(0, self.order - 1 - t), [])

    def dictionary(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.ngrams)

    def scores(self, sentence: Sentence) -> np.ndarray:
        """Dense ``(T, num_ngrams)`` matrix of w . phi(x, t, z)."""
        feats = sentence_features(sentence, self.feature_spec)
        return _score_matrix(self.weights.weights, [self.weights.rows(f) for f in feats])


def _score_matrix(weights: np.ndarray, rows: Sequence[np.ndarray]) -> np.ndarray:
    out = np.zeros((len(rows), weights.shape[1]))
    for t, r in enumerate(rows):
        if len(r):
            out[t] = weights[r].sum(axis=0)
    return out


def _table(model: ChainModel, matrix: np.ndarray, candidates=None) -> ScoreTable:
    entries = []
    col_of = None if candidates is None else _column_index(model)
    for t in range(matrix.shape[0]):
        row = matrix[t]
        if candidates is None:
            entries.append({model.ngrams[c]: float(row[c]) for c in model.columns_at(t)})
        else:
            entries.append(
                {z: float(row[col_of[z]]) for z in candidates[t] if z in col_of}
            )
    return ScoreTable(model.order, tuple(entries))


def _column_index(model: ChainModel) -> dict[tuple[int, ...], int]:
    return {z: c for c, z in enumerate(model.ngrams)}


def score_with_model(
    model: ChainModel, sentence: Sentence, candidates=None
) -> ScoreTable:
    """Score table of ``model`` on ``sentence``.

    ``candidates[t]`` optionally restricts the n-grams scored at position t;
    by default every model n-gram whose padding fits position t is scored.
    N-grams the model has never seen are left out of the table.
    """
    return _table(model, model.scores(sentence), candidates)


def _unit_tables(tagset: TagSet, length: int, order: int) -> list[ScoreTable]:
    # zero-score lower-order tables: they only supply order-1 candidates
    zero1 = ScoreTable(1, tuple({(y,): 0.0 for y in range(len(tagset))} for _ in range(length)))
    return [zero1] + [ScoreTable(o, tuple({} for _ in range(length))) for o in range(2, order)]


def single_order_bundle(
    table: ScoreTable, tagset: TagSet, sentence: Sentence | None = None
) -> MultiOrderBundle:
    """Bundle that decodes with ``table`` alone."""
    if table.order == 1:
        return MultiOrderBundle(tagset, (table,), (1.0,), sentence)
    lower = _unit_tables(tagset, table.length, table.order)
    weights = (0.0,) * len(lower) + (1.0,)
    return MultiOrderBundle(tagset, tuple(lower) + (table,), weights, sentence)


def decode_with_model(model: ChainModel, sentence: Sentence) -> tuple[int, ...]:
    """Exact decode of one model over its own n-gram dictionary."""
    table = score_with_model(model, sentence)
    bundle = single_order_bundle(table, model.tagset, sentence)
    prune = PruneConfig(
        top_k=len(model.tagset), dictionary=model.dictionary(), dictionary_enabled=True
    )
    tags, _ = viterbi_tags(bundle, prune)
    return tags


def train_chain_perceptron(
    corpus: Sequence[LabeledSequence],
    order: int,
    epochs: int,
    seed: int,
    feature_spec: Sequence[str] = DEFAULT_FEATURE_SPEC,
) -> ChainModel:
    """Averaged perceptron with exact Viterbi over the order-``order`` tags.

    The n-gram vocabulary (and the decoding dictionary) is harvested from
    ``corpus``.  Examples are visited in an order shuffled by ``seed`` each
    epoch, so training is a pure function of its arguments.
    """
    if not corpus:
        raise ValueError("corpus is empty")
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    spec = check_spec(feature_spec)
    tagset = corpus[0].tagset
    ngrams = tuple(z.parts for z in build_ngram_tagset(tagset, order, corpus))
    col_of = {z: c for c, z in enumerate(ngrams)}

    feats = [sentence_features(seq.sentence, spec) for seq in corpus]
    index: dict[str, int] = {}
    for sent in feats:
        for pos in sent:
            for f in pos:
                index.setdefault(f, len(index))
    rows = [[np.array([index[f] for f in pos], dtype=np.intp) for pos in sent] for sent in feats]
    gold_cols = [
        [col_of[ngram_at(seq.tags, t, order)] for t in range(len(seq))] for seq in corpus
    ]

    learner = AveragedPerceptron((len(index), len(ngrams)))
    model = ChainModel(order, tagset, ngrams, LinearModel(index, learner.current), spec)
    prune = PruneConfig(top_k=len(tagset), dictionary=frozenset(ngrams), dictionary_enabled=True)
    rng = random.Random(seed)
    visit = list(range(len(corpus)))
    mistakes = []
    for epoch in range(epochs):
        rng.shuffle(visit)
        wrong = 0
        for i in visit:
            seq = corpus[i]
            table = _table(model, _score_matrix(learner.current, rows[i]))
            bundle = single_order_bundle(table, tagset)
            pred, _ = viterbi_tags(bundle, prune)
            if pred != seq.tags:
                wrong += 1
                for t in range(len(seq)):
                    g = gold_cols[i][t]
                    p = col_of[ngram_at(pred, t, order)]
                    if g != p:
                        learner.add(rows[i][t], g, 1.0)
                        learner.add(rows[i][t], p, -1.0)
            learner.tick()
        mistakes.append(wrong)
        log.info("order %d epoch %d: %d/%d mistakes", order, epoch + 1, wrong, len(corpus))

    final = LinearModel(index, learner.averaged())
    return ChainModel(order, tagset, ngrams, final, spec, tuple(mistakes))


def models_bundle(
    models: Sequence[ChainModel],
    sentence: Sentence,
    order_weights: Sequence[float] | None = None,
) -> MultiOrderBundle:
    """Stack the tables of order-1..order-n models for one sentence."""
    models = sorted(models, key=lambda m: m.order)
    if [m.order for m in models] != list(range(1, len(models) + 1)):
        raise ValueError("need exactly one model per order 1..n")
    tagset = models[0].tagset
    if any(m.tagset != tagset for m in models):
        raise ValueError("models use different tag sets")
    tables = tuple(score_with_model(m, sentence) for m in models)
    return MultiOrderBundle(tagset, tables, order_weights, sentence)


def models_dictionary(models: Sequence[ChainModel]) -> frozenset[tuple[int, ...]]:
    out: set[tuple[int, ...]] = set()
    for m in models:
        out |= m.dictionary()
    return frozenset(out)


def save_chain_model(model: ChainModel, path) -> None:
    tags = model.tagset
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "order": model.order,
        "tags": list(tags.labels),
        "feature_spec": list(model.feature_spec),
        "ngrams": [NGramTag(z).render(tags) for z in model.ngrams],
        "weights": model.weights.nonzero_rows(),
        "epoch_mistakes": list(model.epoch_mistakes),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def load_chain_model(path) -> ChainModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("format") != MODEL_FORMAT:
            raise ModelFormatError(f"{path}: not a chain model file")
        if doc.get("version") != MODEL_VERSION:
            raise ModelFormatError(f"{path}: unsupported version {doc.get('version')}")
        tags = TagSet(tuple(doc["tags"]))
        ngrams = tuple(NGramTag.parse(k, tags).parts for k in doc["ngrams"])
        features = sorted(doc["weights"])
        index = {f: i for i, f in enumerate(features)}
        weights = np.array([doc["weights"][f] for f in features], dtype=float)
        weights = weights.reshape(len(features), len(ngrams))
        return ChainModel(
            int(doc["order"]),
            tags,
            ngrams,
            LinearModel(index, weights),
            tuple(doc["feature_spec"]),
            tuple(doc.get("epoch_mistakes", ())),
        )
    except ModelFormatError:
        raise
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ModelFormatError(f"{path}: cannot load chain model: {exc}") from exc
