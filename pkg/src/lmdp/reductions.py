"""MDP gadgets for Subset Sum, Set Splitting and nonnegative factorization,
plus brute-force deciders for the combinatorial side."""
from dataclasses import dataclass
from fractions import Fraction
import itertools

from .model import ONE, Mdp, ModelError


@dataclass(frozen=True)
class SubsetSumInstance:
    values: tuple
    target: int

    def __post_init__(self):
        if not self.values or any(int(v) != v or v <= 0 for v in self.values):
            raise ModelError("subset sum values must be positive integers")
        if self.target < 0 or self.target > sum(self.values):
            raise ModelError("target must lie in [0, sum of values]")


@dataclass(frozen=True)
class SetSplittingInstance:
    elements: tuple
    sets: tuple  # tuple of tuples of elements

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ModelError("duplicate elements")
        reserved = set(_SPLIT_RESERVED)
        for j in range(1, len(self.sets) + 1):
            reserved |= {f"C{j}", f"C{j}'"}
        bad = set(self.elements) & reserved
        if bad:
            raise ModelError(f"reserved element names: {sorted(bad)}")
        if not self.sets:
            raise ModelError("empty collection")
        for c in self.sets:
            if not c or not set(c) <= set(self.elements):
                raise ModelError(f"bad set {c}")


@dataclass(frozen=True)
class NmfInstance:
    J: tuple  # rows of rationals, each row stochastic
    rank: int

    def __post_init__(self):
        if not self.J or self.rank < 1:
            raise ModelError("empty matrix or rank")
        m = len(self.J[0])
        for row in self.J:
            if len(row) != m or any(Fraction(x) < 0 for x in row) or sum(map(Fraction, row)) != 1:
                raise ModelError("J must be a row-stochastic matrix")


_SPLIT_RESERVED = {"s", "t", "u", "v"}


def _fill(mdp, partial):
    """Complete a strategy with the first action at states it leaves open."""
    for s in mdp.states:
        partial.setdefault(s, {mdp.actions(s)[0]: ONE})
    return partial


def _det(t):
    return {"m": {t: ONE}}


# ---------------------------------------------------------------- subset sum

def subset_sum_mdp(inst):
    """s picks s_i with weight s_i/T; each s_i chooses to emit a or b next.
    t emits b next with probability 1 - N/T. d_pb(s,t) = 0 is achievable iff
    some subset sums to N."""
    T = sum(inst.values)
    label = {x: "a" for x in ["s", "t", "s_a", "t1", "t2", "t_a"]}
    label.update({"s_b": "b", "t_b": "b"})
    trans = {"s": {"m": {}}}
    for i, v in enumerate(inst.values, 1):
        si = f"s{i}"
        label[si] = "a"
        trans["s"]["m"][si] = Fraction(v, T)
        trans[si] = {f"m{i}": {"s_a": ONE}, f"m{i}'": {"s_b": ONE}}
    N = Fraction(inst.target, T)
    trans["t"] = {"m": {"t1": N, "t2": ONE - N}}
    trans["t1"] = _det("t_a")
    trans["t2"] = _det("t_b")
    for x in ["s_a", "s_b"]:
        trans[x] = _det("s")
    for x in ["t_a", "t_b"]:
        trans[x] = _det("t")
    return Mdp(label, trans)


def subset_sum_brute(inst):
    vals = inst.values
    for k in range(len(vals) + 1):
        for c in itertools.combinations(range(len(vals)), k):
            if sum(vals[i] for i in c) == inst.target:
                return True
    return False


def subset_sum_strategy(inst, chosen):
    """Strategy for the gadget sending chosen indices (1-based) to s_a."""
    out = {}
    for i in range(1, len(inst.values) + 1):
        out[f"s{i}"] = {f"m{i}" if i in chosen else f"m{i}'": ONE}
    return _fill(subset_sum_mdp(inst), out)


# ---------------------------------------------------------------- set splitting

def set_splitting_mdp(inst):
    """s and t pick a set uniformly (separate copies), each set copy picks one
    of its elements, each element picks u or v (v labelled b)."""
    m = len(inst.sets)
    label = {"s": "a", "t": "a", "u": "a", "v": "b"}
    trans = {"s": {"m": {}}, "t": {"m": {}}}
    for j, c in enumerate(inst.sets, 1):
        for name, root in ((f"C{j}", "s"), (f"C{j}'", "t")):
            label[name] = "a"
            trans[root]["m"][name] = Fraction(1, m)
            trans[name] = {e: {e: ONE} for e in c}
    for e in inst.elements:
        label[e] = "a"
        trans[e] = {"u": {"u": ONE}, "v": {"v": ONE}}
    trans["u"] = _det("u")
    trans["v"] = _det("v")
    return Mdp(label, trans)


def set_splitting_brute(inst):
    """Return a splitting (S1, S2) or None."""
    els = list(inst.elements)
    for bits in itertools.product((0, 1), repeat=len(els)):
        side = dict(zip(els, bits))
        if all(len({side[e] for e in c}) == 2 for c in inst.sets):
            return ({e for e in els if side[e] == 0}, {e for e in els if side[e] == 1})
    return None


def set_splitting_strategy(inst, split):
    """MD strategy from a splitting: left copies pick an element of S1,
    right copies one of S2, S1 goes to u and S2 to v."""
    S1, S2 = split
    out = {}
    for j, c in enumerate(inst.sets, 1):
        out[f"C{j}"] = {min(e for e in c if e in S1): ONE}
        out[f"C{j}'"] = {min(e for e in c if e in S2): ONE}
    for e in inst.elements:
        out[e] = {"u" if e in S1 else "v": ONE}
    return _fill(set_splitting_mdp(inst), out)


# ---------------------------------------------------------------- NMF

def _labels_nmf(n, m):
    return [f"a{i}" for i in range(1, n + 1)], [f"b{j}" for j in range(1, m + 1)]


def nmf_mdp(inst):
    """Left chain replays J; the right side factors it through rank many
    intermediate states whose choices are the factor matrices."""
    J = [[Fraction(x) for x in row] for row in inst.J]
    n, m, r = len(J), len(J[0]), inst.rank
    la, lb = _labels_nmf(n, m)
    label = {"s": "c", "t": "c"}
    trans = {"s": {"m": {}}, "t": {"m": {}}}
    for i in range(1, n + 1):
        trans["s"]["m"][f"s{i}"] = Fraction(1, n)
        trans["t"]["m"][f"t{i}"] = Fraction(1, n)
        label[f"s{i}"] = la[i - 1]
        label[f"t{i}"] = la[i - 1]
        label[f"s{i}'"] = "c"
        trans[f"s{i}"] = _det(f"s{i}'")
        trans[f"s{i}'"] = {"m": {f"p{j}": J[i - 1][j - 1] for j in range(1, m + 1)}}
        trans[f"t{i}"] = {f"m{i}_{k}": {f"t{k}'": ONE} for k in range(1, r + 1)}
    for k in range(1, r + 1):
        label[f"t{k}'"] = "c"
        trans[f"t{k}'"] = {f"n{k}_{j}": {f"q{j}": ONE} for j in range(1, m + 1)}
    for j in range(1, m + 1):
        label[f"p{j}"] = lb[j - 1]
        label[f"q{j}"] = lb[j - 1]
        trans[f"p{j}"] = _det("s")
        trans[f"q{j}"] = _det("t")
    return Mdp(label, trans)


def strategy_from_factorization(inst, A, W):
    """alpha(t_i)(m_{i,k}) = A[i,k], alpha(t'_k)(n_{k,j}) = W[k,j]."""
    n, m, r = len(inst.J), len(inst.J[0]), inst.rank
    out = {}
    for i in range(1, n + 1):
        out[f"t{i}"] = {f"m{i}_{k}": Fraction(A[i - 1][k - 1]) for k in range(1, r + 1)
                        if A[i - 1][k - 1]}
    for k in range(1, r + 1):
        out[f"t{k}'"] = {f"n{k}_{j}": Fraction(W[k - 1][j - 1]) for j in range(1, m + 1)
                         if W[k - 1][j - 1]}
    return _fill(nmf_mdp(inst), out)


def build(tag, inst):
    """(mdp, query) for a reduction tag. query is ('pb', s, t) or ('tv', mu, nu)."""
    if tag == "subset-sum":
        return subset_sum_mdp(inst), ("pb", "s", "t")
    if tag == "set-splitting":
        return set_splitting_mdp(inst), ("pb", "s", "t")
    if tag == "nmf":
        return nmf_mdp(inst), ("tv", {"s": ONE}, {"t": ONE})
    raise ModelError(f"unknown reduction {tag!r}")
