import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_projective_head_lists, random_parts, sibling_parts, tree_oracle
from srdecode.dep.decode import check_tree, eisner_decode, sibling_decode
from srdecode.dep.perceptron import (
    ModelFormatError,
    arc_features,
    load_dep_model,
    save_dep_model,
    sibling_features,
    train_dep_perceptron,
)
from srdecode.dep.trees import (
    ArcVector,
    DepInstance,
    PartScores,
    is_projective,
    projective_trees,
    sibling_triples,
    tree_brute_force,
)
from srdecode.metrics import uas
from srdecode.toy import toy_dep_corpus


# -- trees -------------------------------------------------------------------


def test_arc_vector_validation():
    y = ArcVector((2, 0))
    assert y[(2, 1)] == 1 and y[(0, 2)] == 1 and y[(0, 1)] == 0
    assert y.arcs() == {(2, 1), (0, 2)}
    ind = y.indicator()
    assert ind.shape == (3, 3) and ind.sum() == 2 and ind[2, 1] == 1
    with pytest.raises(ValueError, match="cycle"):
        ArcVector((2, 1))
    with pytest.raises(ValueError):
        ArcVector((1,))
    with pytest.raises(ValueError):
        ArcVector((3, 0))


def test_projectivity_flag():
    assert ArcVector((0, 1, 2)).projective
    crossing = ArcVector((3, 4, 0, 3))  # arcs 3->1 and 4->2 cross
    assert not crossing.projective
    assert not is_projective(crossing.heads)


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 12), (4, 55), (5, 273)])
def test_projective_tree_counts_match_independent_enumeration(n, count):
    ours = [t.heads for t in projective_trees(n)]
    assert ours == all_projective_head_lists(n)
    assert len(ours) == count


def test_sibling_parts_convention():
    # root -> 2, 2 -> 1, 2 -> 3, 2 -> 4
    y = ArcVector((2, 0, 2, 2))
    assert sorted(y.sibling_parts()) == sorted(sibling_parts(y.heads))
    assert (2, 1, 2) in y.sibling_parts()  # innermost left: NULL
    assert (2, 4, 3) in y.sibling_parts()  # 3 is 4's inner sibling
    assert set(y.sibling_parts()) <= set(sibling_triples(4))


def test_part_scores_validation():
    with pytest.raises(ValueError):
        PartScores(np.zeros((1, 1)))
    with pytest.raises(ValueError):
        PartScores(np.full((2, 2), np.inf))
    with pytest.raises(ValueError):
        PartScores(np.zeros((3, 3)), np.zeros((2, 2, 2)))


def test_tree_brute_force_limits():
    assert tree_brute_force(PartScores(np.zeros((2, 2)))).heads == (0,)
    with pytest.raises(ValueError):
        tree_brute_force(PartScores(np.zeros((10, 10))))


# -- decoders ----------------------------------------------------------------


def test_eisner_single_word():
    assert eisner_decode(np.array([[0.0, -7.0], [0.0, 0.0]])).heads == (0,)


def test_eisner_worked_example():
    arc = np.zeros((3, 3))
    arc[0, 1], arc[0, 2], arc[1, 2], arc[2, 1] = 1, 1, 2, 0
    tree = eisner_decode(arc)
    assert tree.arcs() == {(0, 1), (1, 2)}
    assert PartScores(arc).tree_score(tree) == 3


def test_sibling_worked_example():
    # arcs all zero; the sibling part (0, 2, inner 1) is worth 5, which only
    # the tree with both words attached to the root contains
    arc = np.zeros((3, 3))
    sib = np.zeros((3, 3, 3))
    sib[0, 2, 1] = 5.0
    tree = sibling_decode(PartScores(arc, sib))
    assert tree.heads == (0, 0)
    assert tree_brute_force(PartScores(arc, sib)).heads == (0, 0)


def test_decoders_reject_empty():
    with pytest.raises(ValueError):
        eisner_decode(np.zeros((1, 1)))


@pytest.mark.parametrize("seed", range(100))
def test_eisner_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    ps = random_parts(rng, n, False, integer=seed % 2 == 1)
    got = eisner_decode(ps.arc)
    check_tree(got, n)
    assert got.heads == tree_oracle(ps.arc)[0]
    assert got == tree_brute_force(ps)


@pytest.mark.parametrize("seed", range(100))
def test_sibling_matches_oracle(seed):
    rng = np.random.default_rng(10_000 + seed)
    n = int(rng.integers(1, 6))
    ps = random_parts(rng, n, True, integer=seed % 2 == 1)
    got = sibling_decode(ps)
    check_tree(got, n)
    assert got.heads == tree_oracle(ps.arc, ps.sib)[0]
    assert got == tree_brute_force(ps)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_zero_sibling_scores_reduce_to_eisner(seed, n):
    rng = np.random.default_rng(seed)
    arc = rng.integers(-2, 3, size=(n + 1, n + 1)).astype(float)
    sib = np.zeros((n + 1,) * 3)
    assert sibling_decode(PartScores(arc, sib)) == eisner_decode(arc)


def test_sibling_scores_outside_tree_do_not_matter():
    rng = np.random.default_rng(3)
    ps = random_parts(rng, 5, True)
    tree = sibling_decode(ps)
    sib = ps.sib.copy()
    used = set(tree.sibling_parts())
    for idx in np.ndindex(sib.shape):
        if idx not in used:
            sib[idx] = min(sib[idx], -100.0)
    assert sibling_decode(PartScores(ps.arc, sib)) == tree


def test_long_sentence_output_is_projective():
    rng = np.random.default_rng(0)
    ps = random_parts(rng, 25, True)
    check_tree(eisner_decode(ps.arc), 25)
    check_tree(sibling_decode(ps), 25)


# -- perceptron ----------------------------------------------------------------


def test_arc_and_sibling_features():
    x = DepInstance(("a", "b", "c"), ("A", "B", "C"))
    feats = arc_features(x, 0, 3)
    assert "hp=<ROOT>" in feats and "mw=c" in feats
    assert "attach=R3" in feats
    assert "bp=<ROOT>/A/C" in feats and "bp=<ROOT>/B/C" in feats
    assert "attach=L2" in arc_features(x, 3, 1)
    far = DepInstance(tuple("abcdefg"), tuple("ABCDEFG"))
    assert "attach=R5+" in arc_features(far, 1, 7)
    assert sibling_features(x, 0, 2, 0) == ["sib=<ROOT>/NULL/B/R"]
    assert sibling_features(x, 3, 1, 2) == ["sib=C/B/A/L"]


@pytest.mark.parametrize("order", [1, 2])
def test_toy_dep_corpus_is_learned(order):
    corpus = toy_dep_corpus()
    model = train_dep_perceptron(corpus, order, 5, seed=0)
    pred = [model.parse(x) for x, _ in corpus]
    assert uas([t for _, t in corpus], pred).uas == 100.0


def test_zero_epochs_is_pure_tie_break():
    corpus = toy_dep_corpus(5)
    model = train_dep_perceptron(corpus, 2, 0, seed=0)
    assert not model.weights.weights.any()
    x, _ = corpus[0]
    assert model.parse(x).heads == (0,) * len(x)  # smallest head list


def test_dep_training_is_deterministic(tmp_path):
    corpus = toy_dep_corpus(12, seed=4)
    a = train_dep_perceptron(corpus, 2, 2, seed=9)
    b = train_dep_perceptron(corpus, 2, 2, seed=9)
    assert np.array_equal(a.weights.weights, b.weights.weights)
    save_dep_model(a, tmp_path / "a.json")
    save_dep_model(b, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_non_projective_gold_is_skipped(caplog):
    corpus = toy_dep_corpus(4)
    crossing = (DepInstance(tuple("abcd"), tuple("ABCD")), ArcVector((3, 4, 0, 3)))
    model = train_dep_perceptron(corpus + [crossing], 1, 1, seed=0)
    assert "non-projective" in caplog.text
    assert model.order == 1
    with pytest.raises(ValueError):
        train_dep_perceptron([crossing], 1, 1, seed=0)


def test_dep_model_round_trip(tmp_path):
    corpus = toy_dep_corpus(10, seed=1)
    model = train_dep_perceptron(corpus, 2, 2, seed=0)
    path = tmp_path / "dep.json"
    save_dep_model(model, path)
    loaded = load_dep_model(path)
    for x, _ in corpus:
        a, b = model.part_scores(x), loaded.part_scores(x)
        assert np.array_equal(a.arc, b.arc) and np.array_equal(a.sib, b.sib)
    path.write_text('{"format": "srdecode-dep-model", "version": 99}')
    with pytest.raises(ModelFormatError, match="version"):
        load_dep_model(path)
