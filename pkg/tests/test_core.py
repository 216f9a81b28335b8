import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from srdecode.core import (
    BOS,
    BOS_SYMBOL,
    LabeledSequence,
    NGramTag,
    ScoreTable,
    ScoreTableError,
    Sentence,
    TagSet,
    decompose_tag,
    ngram_at,
    validate_score_table,
)

AB = TagSet(("A", "B"))


def test_sentence_invariants():
    assert len(Sentence(("a", "b"), ("X", "Y"))) == 2
    with pytest.raises(ValueError):
        Sentence(())
    with pytest.raises(ValueError):
        Sentence(("a", "b"), ("X",))


def test_tagset_rejects_duplicates_and_bos():
    with pytest.raises(ValueError):
        TagSet(("A", "A"))
    with pytest.raises(ValueError):
        TagSet(("A", BOS_SYMBOL))


@given(st.lists(st.text(min_size=1, max_size=4), min_size=1, max_size=12, unique=True))
def test_tagset_label_index_round_trip(labels):
    labels = [lab for lab in labels if lab != BOS_SYMBOL] or ["x"]
    tags = TagSet(tuple(labels))
    for lab in labels:
        assert tags.label(tags.index(lab)) == lab


def test_tagset_from_corpus_first_seen_order():
    assert TagSet.from_corpus([["B", "A"], ["C", "A"]]).labels == ("B", "A", "C")


@pytest.mark.parametrize(
    "parts", [(0,), (0, 1), (BOS, 0, 1)], ids=["order1", "order2", "order3-padded"]
)
def test_decompose_tag_examples(parts):
    z = NGramTag(parts)
    assert decompose_tag(z) == list(parts)
    assert z.order == len(parts)


@given(st.integers(0, 2).flatmap(
    lambda pad: st.lists(st.integers(0, 5), min_size=1, max_size=3).map(
        lambda body: (BOS,) * pad + tuple(body)
    )
))
def test_decompose_construct_identity(parts):
    assert decompose_tag(NGramTag(parts)) == list(parts)


@pytest.mark.parametrize("parts", [(0, BOS), (BOS,), (BOS, BOS), (-3, 1)])
def test_ngram_tag_rejects_bad_padding(parts):
    with pytest.raises(ValueError):
        NGramTag(parts)


def test_ngram_render_parse():
    z = NGramTag((0, 1))
    assert z.render(AB) == "A|B"
    assert NGramTag.parse("A|B", AB) == z


def test_ngram_at_pads_with_bos():
    tags = (0, 1, 1)
    assert ngram_at(tags, 0, 3) == (BOS, BOS, 0)
    assert ngram_at(tags, 1, 2) == (0, 1)
    assert ngram_at(tags, 2, 3) == (0, 1, 1)


def test_labeled_sequence_checks():
    s = Sentence(("a", "b"))
    seq = LabeledSequence(s, (0, 1), AB)
    assert seq.labels == ("A", "B")
    with pytest.raises(ValueError):
        LabeledSequence(s, (0,), AB)
    with pytest.raises(ValueError):
        LabeledSequence(s, (0, 2), AB)


def test_validate_well_formed_order1():
    table = ScoreTable(1, tuple({(0,): 0.1, (1,): -0.2} for _ in range(3)))
    assert validate_score_table(table, AB, 3) is table


def test_validate_bad_padding():
    table = ScoreTable(2, ({(0, 1): 0.0}, {(0, 1): 0.0}))
    with pytest.raises(ScoreTableError, match="bad padding") as info:
        validate_score_table(table, AB, 2)
    assert info.value.position == 0
    assert info.value.key == (0, 1)


def test_validate_non_finite():
    table = ScoreTable(1, ({(0,): math.nan},))
    with pytest.raises(ScoreTableError, match="non-finite score"):
        validate_score_table(table, AB, 1)


@pytest.mark.parametrize(
    "table,length,reason",
    [
        (ScoreTable(1, ({(0,): 0.0},)), 2, "wrong length"),
        (ScoreTable(1, ({(0, 1): 0.0},)), 1, "wrong order"),
        (ScoreTable(1, ({(7,): 0.0},)), 1, "unknown tag"),
        (ScoreTable(2, ({(BOS, 0): 0.0}, {(BOS, 1): 0.0})), 2, "bad padding"),
    ],
)
def test_validate_other_reasons(table, length, reason):
    with pytest.raises(ScoreTableError, match=reason):
        validate_score_table(table, AB, length)


def test_from_dense_collapses_padding():
    arr = np.arange(2 * 2 * 2, dtype=float).reshape(2, 2, 2)
    table = ScoreTable.from_dense(2, arr)
    assert table.entries[0] == {(BOS, 0): 0.0, (BOS, 1): 1.0}
    assert table.entries[1] == {(0, 0): 4.0, (0, 1): 5.0, (1, 0): 6.0, (1, 1): 7.0}
    validate_score_table(table, AB, 2)
