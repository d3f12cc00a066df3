from fractions import Fraction as F
import random

from hypothesis import given, settings, strategies as st

from lmdp.exactmath import rank
from lmdp.gallery import coin_split, or_gate, random_dist, random_mdp
from lmdp.model import Lmc, Mdp, induce, word_prob, word_vector
from lmdp.trace import (brute_oracle_tv_gt0, lmc_distinguishing_word, lmc_trace_basis,
                        lmc_trace_equiv, md_edits, md_vector_basis, tv_gt0)


def test_edit_count():
    mdp = or_gate()
    sig = md_edits(mdp)
    assert len(sig) == 1 + sum(len(mdp.actions(s)) for s in mdp.states)


def _check_basis_invariants(mdp):
    basis = md_vector_basis(mdp)
    vecs = basis.vectors
    assert rank(vecs) == len(vecs) <= len(mdp.states)
    for alpha, w, v in basis:
        assert len(w) <= len(mdp.states) - 1
        assert word_vector(induce(mdp, alpha), w) == v
        for s, m in alpha.items():
            assert m in mdp.actions(s)
    return basis


def test_basis_invariants_on_figures():
    for mdp in (or_gate(), coin_split(), coin_split(True)):
        _check_basis_invariants(mdp)


def test_tv_gt0_dirac_labels_differ():
    mdp = Mdp({"x": "a", "y": "b"}, {"x": {"m": {"x": 1}}, "y": {"m": {"y": 1}}})
    v = tv_gt0(mdp, {"x": 1}, {"y": 1})
    assert v.yes and v.word == ("a",)


def test_tv_gt0_identical():
    mdp = coin_split()
    v = tv_gt0(mdp, {"s": 1}, {"s": 1})
    assert v.answer == "no"


def test_tv_gt0_coin_split():
    mdp = coin_split()
    v = tv_gt0(mdp, {"s": 1}, {"t": 1})
    assert v.yes
    lmc = induce(mdp, v.strategy)
    assert word_prob(lmc, {"s": 1}, v.word) != word_prob(lmc, {"t": 1}, v.word)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_tv_gt0_matches_brute_oracle(seed):
    rng = random.Random(seed)
    mdp = random_mdp(rng, max_actions=2, n_labels=2)
    mu, nu = random_dist(rng, mdp.states), random_dist(rng, mdp.states)
    v = tv_gt0(mdp, mu, nu)
    ok, _, _ = brute_oracle_tv_gt0(mdp, mu, nu)
    assert v.yes == ok
    _check_basis_invariants(mdp)


def test_lmc_trace_equiv_and_word():
    lmc = Lmc({"x": "a", "y": "a", "z": "b"},
              {"x": {"x": 1}, "y": {"y": F(1, 2), "z": F(1, 2)}, "z": {"z": 1}})
    assert lmc_trace_equiv(lmc, {"x": 1}, {"x": 1})
    w = lmc_distinguishing_word(lmc, {"x": 1}, {"y": 1})
    assert w is not None
    assert word_prob(lmc, {"x": 1}, w) != word_prob(lmc, {"y": 1}, w)
    basis = lmc_trace_basis(lmc)
    assert rank([b for _, b in basis]) == len(basis)
