from fractions import Fraction as F
import random
import sys, os

from hypothesis import given, settings, strategies as st

from lmdp.bisim import (build_partial_strategy, canon, collect_denominators, lmc_bisim,
                        minimizing_strategy, optimistic_refine, pb_gt0, prime_assignment,
                        same_block)
from lmdp.gallery import alternating_loop, coin_split, or_gate, random_mdp
from lmdp.model import Mdp, induce, md_strategies

sys.path.insert(0, os.path.dirname(__file__))
from oracles import brute_bisim_relation, random_strategy  # noqa: E402

TABLE = [
    [["q1", "q2", "q3", "s", "s_a", "s_b", "t", "t_a", "t_b", "u", "v"]],
    [["v"], ["q1", "q2", "q3", "s", "s_a", "s_b", "t", "t_a", "t_b", "u"]],
    [["v"], ["q2"], ["q3"], ["q1", "s", "s_a", "s_b", "t", "t_a", "t_b", "u"]],
    [["v"], ["q2"], ["q3"], ["s_a"], ["s_b"], ["t_a"], ["t_b"], ["q1", "s", "t", "u"]],
    [["v"], ["q2"], ["q3"], ["s_a"], ["s_b"], ["t_a"], ["t_b"], ["s"], ["t"], ["q1", "u"]],
]


def test_refinement_table():
    tr = optimistic_refine(or_gate())
    assert tr.partitions == [canon(p) for p in TABLE]


def test_denominators_and_weights():
    mdp = or_gate()
    tr = optimistic_refine(mdp)
    N = collect_denominators(mdp, tr)
    assert N == {1, 2}
    primes = prime_assignment(mdp, N)
    assert len(set(primes.values())) == len(primes)
    assert all(b % p for p in primes.values() for b in N)
    primes["q2"] = 3
    part = build_partial_strategy(mdp, tr, primes)
    assert part == {"q2": {"m1": F(1, 3), "m2": F(2, 3)}}


def test_pb_gt0_or_gate_needs_randomization():
    mdp = or_gate()
    for md in md_strategies(mdp):
        assert same_block(lmc_bisim(induce(mdp, md)), "s", "t")
    v = pb_gt0(mdp, "s", "t")
    assert v.yes
    assert len(v.strategy["q2"]) == 2
    assert not same_block(lmc_bisim(induce(mdp, v.strategy)), "s", "t")


def test_pb_gt0_no_choices():
    mdp = Mdp({"x": "a", "y": "a"}, {"x": {"m": {"y": 1}}, "y": {"m": {"x": 1}}})
    assert pb_gt0(mdp, "x", "y").answer == "no"


def test_lmc_bisim_matches_relation_refinement():
    rng = random.Random(7)
    for _ in range(60):
        mdp = random_mdp(rng, n_labels=2, max_support=2, max_weight=2)
        lmc = induce(mdp, random_strategy(mdp, rng))
        part = lmc_bisim(lmc)
        R = brute_bisim_relation(lmc)
        for a in lmc.states:
            for b in lmc.states:
                assert same_block(part, a, b) == ((a, b) in R)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_minimizing_strategy_bisimilarity_is_fixpoint(seed):
    rng = random.Random(seed)
    mdp = random_mdp(rng, max_actions=2, n_labels=2, max_support=2)
    tr = optimistic_refine(mdp)
    beta = minimizing_strategy(mdp, tr)
    part = lmc_bisim(induce(mdp, beta))
    assert part == tr.fixpoint
    # the fixpoint is contained in the bisimilarity of any other strategy
    for _ in range(3):
        other = lmc_bisim(induce(mdp, random_strategy(mdp, rng, positive=False)))
        for b in tr.fixpoint:
            assert all(same_block(other, b[0], x) for x in b)


def test_refinement_partitions_refine():
    for mdp in (or_gate(), alternating_loop(), coin_split()):
        tr = optimistic_refine(mdp)
        for prev, nxt in zip(tr.partitions, tr.partitions[1:]):
            for b in nxt:
                assert any(set(b) <= set(c) for c in prev)
