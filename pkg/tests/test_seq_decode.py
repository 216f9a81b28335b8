import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import bundle_from_arrays, dense_brute_force, dense_score, random_arrays
from srdecode.core import BOS, LabeledSequence, ScoreTable, Sentence, TagSet
from srdecode.seq.decode import (
    MultiOrderBundle,
    PruneConfig,
    SearchSpaceExhausted,
    prune_candidates,
    sr_brute_force,
    sr_score,
    sr_viterbi,
    viterbi_tags,
)
from srdecode.seq.ngrams import build_ngram_tagset, harvest_dictionary

AB = TagSet(("A", "B"))
ABC = TagSet(("A", "B", "C"))
A, B = 0, 1


def two_step_bundle() -> MultiOrderBundle:
    o1 = ScoreTable(1, ({(A,): 0.0, (B,): -1.0}, {(A,): -1.0, (B,): 0.0}))
    o2 = ScoreTable(
        2,
        (
            {(BOS, A): 0.0, (BOS, B): 0.0},
            {(A, A): -2.0, (A, B): 0.0, (B, A): -2.0, (B, B): -1.0},
        ),
    )
    return MultiOrderBundle(AB, (o1, o2))


def seqs(tags, *rows):
    return [LabeledSequence(Sentence(tuple("x" * len(r))), tags.encode(r), tags) for r in rows]


# -- worked examples ---------------------------------------------------------


def test_sr_score_single_term():
    b = MultiOrderBundle(AB, (ScoreTable(1, ({(A,): 0.3, (B,): 0.0},)),))
    assert sr_score(b, [A]) == pytest.approx(0.3)


def test_sr_score_two_step_example():
    b = two_step_bundle()
    assert sr_score(b, [A, B]) == 0.0
    assert sr_score(b, [B, B]) == -2.0


def test_sr_score_rejects_bad_tags():
    with pytest.raises(ValueError):
        sr_score(two_step_bundle(), [A, 2])
    with pytest.raises(ValueError):
        sr_score(two_step_bundle(), [A])


def test_viterbi_two_step_example():
    tags, score = viterbi_tags(two_step_bundle())
    assert tags == (A, B)
    assert score == 0.0
    assert sr_viterbi(two_step_bundle()).tags == (A, B)
    assert sr_brute_force(two_step_bundle()).tags == (A, B)


def test_viterbi_tie_goes_to_lower_index():
    b = MultiOrderBundle(AB, (ScoreTable(1, ({(A,): -0.5, (B,): -0.5},)),))
    assert sr_viterbi(b).tags == (A,)


def test_brute_force_all_zero_gives_lowest_index():
    arrays = [np.zeros((4,) + (3,) * o) for o in (1, 2, 3)]
    b = bundle_from_arrays(arrays, 3)
    assert sr_brute_force(b).tags == (0, 0, 0, 0)
    assert sr_viterbi(b).tags == (0, 0, 0, 0)


def test_brute_force_size_limit():
    arrays = random_arrays(np.random.default_rng(0), 13, 4, 1)
    with pytest.raises(ValueError):
        sr_brute_force(bundle_from_arrays(arrays, 4))


def test_brute_force_single_position_is_order1_argmax():
    b = MultiOrderBundle(ABC, (ScoreTable(1, ({(0,): 0.1, (1,): 0.7, (2,): 0.2},)),))
    assert sr_brute_force(b).tags == (1,)


def test_order_weights_scale_and_skip():
    b = two_step_bundle().reweighted((2.0, 0.0))
    assert sr_score(b, [B, B]) == -2.0  # order 2 ignored, order 1 doubled
    assert sr_viterbi(b).tags == (A, B)


def test_bundle_validation():
    o1 = ScoreTable(1, ({(A,): 0.0},))
    with pytest.raises(ValueError):
        MultiOrderBundle(AB, (o1,), (1.0, 1.0))
    with pytest.raises(ValueError):
        MultiOrderBundle(AB, (o1,), (-1.0,))
    with pytest.raises(ValueError):
        MultiOrderBundle(AB, (ScoreTable(2, ({(BOS, A): 0.0},)),))


# -- pruning -----------------------------------------------------------------


def order1(*rows):
    return ScoreTable(1, tuple({(i,): v for i, v in enumerate(r)} for r in rows))


def test_prune_candidates_examples():
    assert prune_candidates(order1((0.9, 0.05, 0.05)), 1) == [[0]]
    assert prune_candidates(order1((0.5, 0.5, 0.0)), 2) == [[0, 1]]
    assert prune_candidates(order1((0.1, 0.3, 0.2)), 3) == [[1, 2, 0]]


@given(
    st.lists(st.floats(-3, 3), min_size=4, max_size=4),
    st.integers(1, 3),
)
def test_prune_candidates_monotone_in_k(scores, k):
    table = order1(scores)
    small = set(prune_candidates(table, k)[0])
    large = set(prune_candidates(table, k + 1)[0])
    assert small <= large
    assert len(small) == k


def test_dictionary_prunes_unseen_ngrams():
    b = two_step_bundle()
    prune = PruneConfig(top_k=2, dictionary={(A,), (B,), (BOS, A), (BOS, B), (B, B)},
                        dictionary_enabled=True)
    assert viterbi_tags(b, prune) == ((B, B), -2.0)
    assert sr_brute_force(b, prune).tags == (B, B)
    assert sr_score(b, [A, B], prune) == -math.inf


def test_search_space_exhausted():
    prune = PruneConfig(top_k=2, dictionary={(A,), (B,)}, dictionary_enabled=True)
    with pytest.raises(SearchSpaceExhausted, match="search space exhausted"):
        viterbi_tags(two_step_bundle(), prune)


def test_zero_weight_order_skips_dictionary():
    prune = PruneConfig(top_k=2, dictionary={(A,), (B,)}, dictionary_enabled=True)
    b = two_step_bundle().reweighted((1.0, 0.0))
    assert sr_viterbi(b, prune).tags == (A, B)


def test_missing_entries_get_floor():
    o1 = ScoreTable(1, ({(A,): 0.0},))  # B never scored
    b = MultiOrderBundle(AB, (o1,))
    assert sr_score(b, [B]) == -1e9
    assert sr_score(b, [B], PruneConfig(top_k=2, floor=-5.0)) == -5.0


def test_top_k_is_clamped_to_tag_count():
    tags, _ = viterbi_tags(two_step_bundle(), PruneConfig(top_k=10))
    assert tags == (A, B)


# -- n-gram tag sets and dictionaries -----------------------------------------


def test_build_ngram_tagset_examples():
    both = seqs(AB, "AB", "BA")
    assert [z.parts for z in build_ngram_tagset(AB, 1, both)] == [(A,), (B,)]
    got = [z.parts for z in build_ngram_tagset(AB, 2, seqs(AB, "AB"))]
    assert got == [(BOS, A), (A, B)]
    got = [z.parts for z in build_ngram_tagset(AB, 2, seqs(AB, "AA", "BA"))]
    assert got == [(BOS, A), (A, A), (BOS, B), (B, A)]
    with pytest.raises(ValueError):
        build_ngram_tagset(AB, 2, [])
    with pytest.raises(ValueError):
        build_ngram_tagset(AB, 4, both)


def test_harvest_dictionary_examples():
    assert harvest_dictionary(seqs(AB, "AB"), 2) == {(A,), (B,), (BOS, A), (A, B)}
    assert harvest_dictionary(seqs(AB, "A"), 1) == {(A,)}
    with pytest.raises(ValueError):
        harvest_dictionary([], 2)


# -- oracle equivalence and properties -----------------------------------------


def random_instance(seed: int):
    rng = np.random.default_rng(seed)
    T = int(rng.integers(1, 9))
    K = int(rng.integers(1, 5))
    n = int(rng.integers(1, 4))
    while K**T > 20000:
        T -= 1
    integer = seed % 3 == 0  # integer scores exercise tie-breaking
    return rng, T, K, n, random_arrays(rng, T, K, n, integer)


@pytest.mark.parametrize("seed", range(120))
def test_viterbi_matches_independent_oracle(seed):
    _, T, K, n, arrays = random_instance(seed)
    b = bundle_from_arrays(arrays, K)
    expected = dense_brute_force(arrays, K, T)
    assert sr_viterbi(b).tags == expected
    assert sr_brute_force(b).tags == expected
    assert viterbi_tags(b)[1] == pytest.approx(dense_score(arrays, expected), abs=1e-9)


@pytest.mark.parametrize("seed", range(40))
def test_weighted_viterbi_matches_oracle(seed):
    rng, T, K, n, arrays = random_instance(1000 + seed)
    weights = tuple(float(w) for w in rng.choice([0.0, 0.5, 1.0, 2.0], size=n))
    if not any(weights):
        weights = (1.0,) + weights[1:]
    b = bundle_from_arrays(arrays, K, weights)
    assert sr_viterbi(b).tags == dense_brute_force(arrays, K, T, weights)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_viterbi_beats_random_sequences(seed):
    rng, T, K, n, arrays = random_instance(seed)
    b = bundle_from_arrays(arrays, K)
    best = sr_score(b, sr_viterbi(b).tags)
    for _ in range(1000 if seed % 10 == 0 else 50):
        other = tuple(int(y) for y in rng.integers(0, K, size=T))
        assert best >= sr_score(b, other) - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_full_top_k_equals_unpruned(seed):
    _, T, K, n, arrays = random_instance(seed)
    b = bundle_from_arrays(arrays, K)
    assert viterbi_tags(b, PruneConfig(top_k=K)) == viterbi_tags(b)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_order1_reduces_to_per_position_argmax(seed):
    _, T, K, _, arrays = random_instance(seed)
    b = bundle_from_arrays(arrays[:1], K)
    expected = tuple(int(np.argmax(arrays[0][t])) for t in range(T))
    assert sr_viterbi(b).tags == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_top1_follows_order1_argmax(seed):
    _, T, K, n, arrays = random_instance(seed)
    b = bundle_from_arrays(arrays, K)
    expected = tuple(int(np.argmax(arrays[0][t])) for t in range(T))
    assert viterbi_tags(b, PruneConfig(top_k=1))[0] == expected


def test_decoding_is_deterministic():
    _, T, K, n, arrays = random_instance(7)
    b = bundle_from_arrays(arrays, K)
    assert viterbi_tags(b) == viterbi_tags(bundle_from_arrays(arrays, K))


def test_exhaustive_small_grid_with_ties():
    # every 0/1 score pattern for T=2, K=2, order 2
    for bits in itertools.product((0.0, 1.0), repeat=2 * 2 + 2 * 4):
        a1 = np.array(bits[:4]).reshape(2, 2)
        a2 = np.array(bits[4:]).reshape(2, 2, 2)
        b = bundle_from_arrays([a1, a2], 2)
        assert sr_viterbi(b).tags == dense_brute_force([a1, a2], 2, 2)
