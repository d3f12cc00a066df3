"""Small hand-built MDPs used by the tests, the CLI and the README."""
import random
from fractions import Fraction as F

from .model import Mdp

H = F(1, 2)


def _det(t):
    return {"m": {t: 1}}


def _uni(*ts):
    return {"m": {t: F(1, len(ts)) for t in ts}}


def or_gate():
    """bisimilar under every MD strategy, separable only by randomizing at q2."""
    label = {x: "a" for x in ["s", "t", "s_a", "s_b", "t_a", "t_b", "q1", "q2", "q3", "u"]}
    label["v"] = "b"
    trans = {
        "s": _uni("s_a", "s_b"),
        "t": _uni("t_a", "t_b"),
        "s_a": _det("q2"),
        "s_b": _uni("q1", "q3"),
        "t_a": _uni("q1", "q2"),
        "t_b": _uni("q2", "q3"),
        "q1": _det("u"),
        "q2": {"m1": {"u": 1}, "m2": {"v": 1}},
        "q3": _det("v"),
        "u": _det("u"),
        "v": _det("v"),
    }
    return Mdp(label, trans)


def alternating_loop():
    """d_pb(s,t) = 1 needs a randomized choice at s'."""
    label = {x: "a" for x in ["s", "s'", "s_a", "t", "t1", "t2", "t_a"]}
    label["s_b"] = "b"
    label["t_b"] = "b"
    trans = {
        "s": _det("s'"),
        "s'": {"ma": {"s_a": 1}, "mb": {"s_b": 1}},
        "s_a": _det("s'"),
        "s_b": _det("s'"),
        "t": _uni("t1", "t2"),
        "t1": _det("t_a"),
        "t2": _det("t_b"),
        "t_a": _det("t1"),
        "t_b": _det("t2"),
    }
    return Mdp(label, trans)


def coin_split(loop_back=False):
    """s must mix m1/m2 evenly to match t's fair coin.

    With loop_back the leaves return to s and t, otherwise they self-loop.
    """
    label = {"s": "a", "t": "a", "s_a": "a", "t_a": "a", "s_b": "b", "t_b": "b"}
    back_s = "s" if loop_back else None
    back_t = "t" if loop_back else None
    trans = {
        "s": {"m1": {"s_a": 1}, "m2": {"s_b": 1}},
        "t": _uni("t_a", "t_b"),
        "s_a": _det(back_s or "s_a"),
        "s_b": _det(back_s or "s_b"),
        "t_a": _det(back_t or "t_a"),
        "t_b": _det(back_t or "t_b"),
    }
    return Mdp(label, trans)


def random_mdp(rng, n_states=None, max_actions=2, n_labels=2, max_support=3, max_weight=3):
    """A random MDP with small rational weights."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    n = n_states or rng.randint(1, 5)
    states = [f"x{i}" for i in range(n)]
    labels = [chr(ord("a") + i) for i in range(n_labels)]
    label = {s: rng.choice(labels) for s in states}
    trans = {}
    for s in states:
        acts = {}
        for k in range(rng.randint(1, max_actions)):
            supp = rng.sample(states, rng.randint(1, min(max_support, n)))
            ws = [rng.randint(1, max_weight) for _ in supp]
            tot = sum(ws)
            acts[f"m{k}"] = {t: F(w, tot) for t, w in zip(supp, ws)}
        trans[s] = acts
    return Mdp(label, trans)


def random_dist(rng, states, max_support=2, max_weight=3):
    supp = rng.sample(list(states), rng.randint(1, min(max_support, len(states))))
    ws = [rng.randint(1, max_weight) for _ in supp]
    tot = sum(ws)
    return {t: F(w, tot) for t, w in zip(supp, ws)}
