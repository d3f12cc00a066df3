from fractions import Fraction as F
import itertools

import pytest

from lmdp.bisim import lmc_bisimilar
from lmdp.distance import lmc_pb_eq1, pb_eq0, pb_eq1, pb_lt1
from lmdp.model import ModelError, induce, word_prob
from lmdp.reductions import (NmfInstance, SetSplittingInstance, SubsetSumInstance, build,
                             nmf_mdp, set_splitting_brute, set_splitting_mdp,
                             set_splitting_strategy, strategy_from_factorization,
                             subset_sum_brute, subset_sum_mdp, subset_sum_strategy)
from lmdp.trace import lmc_trace_equiv


def test_subset_sum_gadget_shape():
    inst = SubsetSumInstance((1, 2, 3), 3)
    mdp = subset_sum_mdp(inst)
    assert mdp.phi("t", "m") == {"t1": F(1, 2), "t2": F(1, 2)}
    assert mdp.phi("s", "m") == {"s1": F(1, 6), "s2": F(1, 3), "s3": F(1, 2)}
    assert mdp.actions("s2") == ("m2", "m2'")


def test_subset_sum_strategy_is_witness():
    inst = SubsetSumInstance((1, 2, 3), 3)
    mdp = subset_sum_mdp(inst)
    assert lmc_bisimilar(induce(mdp, subset_sum_strategy(inst, {3})), "s", "t")
    assert lmc_bisimilar(induce(mdp, subset_sum_strategy(inst, {1, 2})), "s", "t")
    assert not lmc_bisimilar(induce(mdp, subset_sum_strategy(inst, {1})), "s", "t")


@pytest.mark.parametrize("values,target", [((2, 4), 3), ((1, 5), 2), ((3,), 1)])
def test_subset_sum_no_instances(values, target):
    inst = SubsetSumInstance(values, target)
    mdp = subset_sum_mdp(inst)
    assert not subset_sum_brute(inst)
    assert pb_eq0(mdp, "s", "t").answer == "no"
    assert pb_lt1(mdp, "s", "t").answer == "no"


def test_subset_sum_validation():
    with pytest.raises(ModelError):
        SubsetSumInstance((1, 2), 4)
    with pytest.raises(ModelError):
        SubsetSumInstance((0, 2), 1)


def test_set_splitting_small():
    yes = SetSplittingInstance(("e1", "e2", "e3"), (("e1", "e2"), ("e2", "e3")))
    no = SetSplittingInstance(("e1", "e2"), (("e1",), ("e1", "e2")))
    split = set_splitting_brute(yes)
    assert split is not None and set_splitting_brute(no) is None
    mdp = set_splitting_mdp(yes)
    assert lmc_pb_eq1(induce(mdp, set_splitting_strategy(yes, split)), "s", "t")
    assert pb_eq1(mdp, "s", "t").yes
    assert pb_eq1(set_splitting_mdp(no), "s", "t").answer == "no"


def test_set_splitting_reserved_names():
    with pytest.raises(ModelError):
        SetSplittingInstance(("u", "e"), (("u", "e"),))
    with pytest.raises(ModelError):
        SetSplittingInstance(("C1", "e"), (("C1", "e"),))


@pytest.mark.parametrize("J,A,W,r", [
    (((1, 0), (0, 1)), ((1, 0), (0, 1)), ((1, 0), (0, 1)), 2),
    (((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2))), ((1,), (1,)), ((F(1, 2), F(1, 2)),), 1),
])
def test_nmf_factorization_gives_trace_equivalence(J, A, W, r):
    inst = NmfInstance(J, r)
    mdp = nmf_mdp(inst)
    lmc = induce(mdp, strategy_from_factorization(inst, A, W))
    assert lmc_trace_equiv(lmc, {"s": 1}, {"t": 1})
    n = len(J)
    for i, j in itertools.product(range(1, n + 1), range(1, len(J[0]) + 1)):
        w = ("c", f"a{i}", "c", f"b{j}")
        for start in ("s", "t"):
            assert word_prob(lmc, {start: 1}, w) == F(J[i - 1][j - 1]) / n


def test_nmf_validation_and_build():
    with pytest.raises(ModelError):
        NmfInstance(((1, 1),), 1)
    mdp, q = build("nmf", NmfInstance(((1,),), 1))
    assert q[0] == "tv" and q[1] == {"s": 1}
