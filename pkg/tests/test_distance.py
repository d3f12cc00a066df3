from fractions import Fraction as F
import os
import random
import sys

import pytest

from lmdp.bisim import lmc_bisimilar
from lmdp.distance import (lmc_pb_eq1, lmc_tv_lt1, md_underapprox, pair_graph, pb_eq0,
                           pb_eq1, pb_lt1, tv_lt1_witness)
from lmdp.gallery import alternating_loop, coin_split, or_gate
from lmdp.model import GuardExceeded, Lmc, Mdp, induce, md_strategies, uniform_strategy
from lmdp.trace import lmc_trace_equiv

sys.path.insert(0, os.path.dirname(__file__))
from oracles import (naive_pb_eq0, naive_pb_eq1, naive_pb_lt1, random_pb_case,  # noqa: E402
                     random_strategy)


def _chain():
    # x -> y -> y (a, a, b) ; z -> z (a) ; w -> y (a)
    return Lmc({"w": "a", "x": "a", "y": "b", "z": "a"},
               {"w": {"y": 1}, "x": {"y": 1}, "y": {"y": 1}, "z": {"z": 1}})


def test_pair_graph_edges_point_to_predecessors():
    V, E = pair_graph(_chain())
    assert ("y", "y") in V and ("x", "y") not in V
    assert set(E[("y", "y")]) == {("w", "w"), ("w", "x"), ("x", "w"), ("x", "x"), ("y", "y")}


def test_lmc_pb_eq1_basic():
    lmc = _chain()
    assert not lmc_pb_eq1(lmc, "w", "x")
    assert lmc_pb_eq1(lmc, "x", "z")
    assert lmc_pb_eq1(lmc, "x", "y")  # labels differ


def test_tv_lt1_witness_common_cycle():
    lmc = _chain()
    assert lmc_tv_lt1(lmc, {"x": 1}, {"w": 1})
    assert not lmc_tv_lt1(lmc, {"x": 1}, {"z": 1})
    w = tv_lt1_witness(lmc, {"x": F(1, 2), "z": F(1, 2)}, {"z": 1})
    assert w is not None


def test_alternating_loop_figure():
    mdp = alternating_loop()
    for md in md_strategies(mdp):
        lmc = induce(mdp, md)
        assert lmc_tv_lt1(lmc, {"s": 1}, {"t": 1})
        assert not lmc_pb_eq1(lmc, "s", "t")
    assert lmc_pb_eq1(induce(mdp, uniform_strategy(mdp)), "s", "t")
    v = pb_eq1(mdp, "s", "t")
    assert v.yes
    assert lmc_pb_eq1(induce(mdp, v.strategy), "s", "t")
    assert any(len(d) > 1 for d in v.strategy.values())
    assert pb_eq1(mdp, "s", "t", max_support=1).answer == "no"
    assert md_underapprox(mdp, "PB=1", "s", "t").answer == "unknown"


def test_coin_split_figures():
    mdp = coin_split()
    v = pb_eq0(mdp, "s", "t")
    assert v.yes and lmc_bisimilar(induce(mdp, v.strategy), "s", "t")
    assert set(v.strategy["s"].values()) == {F(1, 2)}
    lb = coin_split(loop_back=True)
    v = pb_lt1(lb, "s", "t")
    assert v.yes and not lmc_pb_eq1(induce(lb, v.strategy), "s", "t")
    assert md_underapprox(lb, "PB<1", "s", "t").answer == "unknown"


def test_or_gate_pb_eq0():
    mdp = or_gate()
    v = pb_eq0(mdp, "s", "t")
    assert v.yes and lmc_bisimilar(induce(mdp, v.strategy), "s", "t")


CASES = [c for c in (random_pb_case(seed) for seed in range(160)) if c is not None]


@pytest.mark.parametrize("case", CASES[:120], ids=lambda c: "")
def test_against_naive_oracles(case):
    mdp, s, t = case
    v0 = pb_eq0(mdp, s, t)
    assert v0.yes == naive_pb_eq0(mdp, s, t)[0]
    if v0.yes:
        assert lmc_bisimilar(induce(mdp, v0.strategy), s, t)
    v1 = pb_eq1(mdp, s, t)
    assert v1.yes == naive_pb_eq1(mdp, s, t)
    if v1.yes:
        assert lmc_pb_eq1(induce(mdp, v1.strategy), s, t)
    vl = pb_lt1(mdp, s, t)
    assert vl.yes == naive_pb_lt1(mdp, s, t)
    if vl.yes:
        assert not lmc_pb_eq1(induce(mdp, vl.strategy), s, t)
    # a zero-distance witness means distance is below one
    if v0.yes:
        assert vl.yes


def test_no_answers_survive_sampling():
    rng = random.Random(3)
    for mdp, s, t in CASES[:40]:
        eq0 = pb_eq0(mdp, s, t).yes
        lt1 = pb_lt1(mdp, s, t).yes
        for _ in range(100 if not eq0 else 5):
            lmc = induce(mdp, random_strategy(mdp, rng))
            if not eq0:
                assert not lmc_bisimilar(lmc, s, t)
            if not lt1:
                assert lmc_pb_eq1(lmc, s, t)


def test_md_underapprox_sound():
    for mdp, s, t in CASES[:60]:
        for tag, exact in (("PB=0", pb_eq0), ("PB=1", pb_eq1), ("PB<1", pb_lt1)):
            if md_underapprox(mdp, tag, s, t).yes:
                assert exact(mdp, s, t).yes


def test_guard_exceeded():
    n = 7
    label = {f"x{i}": "a" for i in range(n)}
    trans = {f"x{i}": {f"m{j}": {f"x{(i + j) % n}": 1} for j in range(1, 3)} for i in range(n)}
    mdp = Mdp(label, trans)
    with pytest.raises(GuardExceeded):
        md_underapprox(mdp, "PB=1", "x0", "x1", guard=4)


def test_cross_metric_on_sampled_chains():
    rng = random.Random(11)
    for mdp, s, t in CASES:
        lmc = induce(mdp, random_strategy(mdp, rng, positive=False))
        mu, nu = {s: 1}, {t: 1}
        if lmc_trace_equiv(lmc, mu, nu):
            assert lmc_tv_lt1(lmc, mu, nu)
        if not lmc_pb_eq1(lmc, s, t):
            assert lmc_tv_lt1(lmc, mu, nu)
