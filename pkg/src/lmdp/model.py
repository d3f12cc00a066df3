"""Labelled MDPs, labelled Markov chains, strategies and word probabilities."""
from dataclasses import dataclass, field
from fractions import Fraction
import itertools

from .exactmath import fmt_rat

ONE = Fraction(1)
ZERO = Fraction(0)


class ModelError(ValueError):
    pass


class GuardExceeded(RuntimeError):
    def __init__(self, what, size, guard):
        super().__init__(f"{what}: {size} exceeds guard {guard}")
        self.what = what
        self.size = size
        self.guard = guard


def _clean(dist):
    out = {}
    for t, p in dist.items():
        p = Fraction(p)
        if p:
            out[t] = p
    return dict(sorted(out.items()))


class Mdp:
    """A labelled MDP. States are sorted lexicographically and that order is
    used everywhere as the canonical order. Zero weights are dropped.

    label: dict state -> label
    trans: dict state -> dict action -> dict state -> weight
    """

    def __init__(self, label, trans):
        self.states = tuple(sorted(label))
        self.label = {s: label[s] for s in self.states}
        self.trans = {}
        for s in self.states:
            acts = trans.get(s, {})
            self.trans[s] = {m: _clean(acts[m]) for m in sorted(acts)}
        for s in trans:
            if s not in self.label:
                self.trans[s] = {m: _clean(d) for m, d in sorted(trans[s].items())}
        self.index = {s: i for i, s in enumerate(self.states)}
        self.labels = tuple(sorted(set(self.label.values())))

    def __repr__(self):
        return f"Mdp({len(self.states)} states, {sum(len(a) for a in self.trans.values())} actions)"

    def __eq__(self, other):
        return (isinstance(other, Mdp) and self.label == other.label
                and self.trans == other.trans)

    def __hash__(self):
        return hash(self.states)

    def actions(self, s):
        return tuple(self.trans[s])

    def phi(self, s, m):
        return self.trans[s][m]

    def successors(self, s, acts=None):
        acts = self.trans[s] if acts is None else acts
        out = set()
        for m in acts:
            out.update(self.trans[s][m])
        return out

    def problems(self):
        """List of invariant violations (empty when valid)."""
        errs = []
        if not self.states:
            errs.append("no states")
        for s in self.trans:
            if s not in self.label:
                errs.append(f"transitions for undeclared state {s}")
        for s in self.states:
            if not self.trans.get(s):
                errs.append(f"state {s} has no action")
                continue
            for m, d in self.trans[s].items():
                for t, p in d.items():
                    if t not in self.label:
                        errs.append(f"{s}/{m}: unknown target {t}")
                    if p < 0:
                        errs.append(f"{s}/{m}: negative weight to {t}")
                tot = sum(d.values(), ZERO)
                if tot != 1:
                    errs.append(f"{s}/{m}: weights sum to {fmt_rat(tot)}")
        return errs

    def check(self):
        errs = self.problems()
        if errs:
            raise ModelError("; ".join(errs))
        return self

    def restrict(self, allowed):
        """Sub-MDP keeping only allowed[s] actions at the states listed."""
        trans = {}
        for s in self.states:
            keep = allowed.get(s)
            acts = self.trans[s]
            trans[s] = {m: acts[m] for m in acts if keep is None or m in keep}
        return Mdp(self.label, trans)


class Lmc:
    """A labelled Markov chain. tau: dict state -> dict state -> weight."""

    def __init__(self, label, tau):
        self.states = tuple(sorted(label))
        self.label = {s: label[s] for s in self.states}
        self.tau = {s: _clean(tau.get(s, {})) for s in self.states}
        self.index = {s: i for i, s in enumerate(self.states)}
        self.labels = tuple(sorted(set(self.label.values())))

    def __repr__(self):
        return f"Lmc({len(self.states)} states)"

    def __eq__(self, other):
        return isinstance(other, Lmc) and self.label == other.label and self.tau == other.tau

    def __hash__(self):
        return hash(self.states)

    def problems(self):
        errs = []
        for s in self.states:
            d = self.tau[s]
            for t, p in d.items():
                if t not in self.label:
                    errs.append(f"{s}: unknown target {t}")
                if p < 0:
                    errs.append(f"{s}: negative weight")
            if sum(d.values(), ZERO) != 1:
                errs.append(f"{s}: weights sum to {fmt_rat(sum(d.values(), ZERO))}")
        return errs

    def check(self):
        errs = self.problems()
        if errs:
            raise ModelError("; ".join(errs))
        return self

    def as_mdp(self, action="tau"):
        return Mdp(self.label, {s: {action: self.tau[s]} for s in self.states})


# strategies: dict state -> dict action -> weight (memoryless),
# MD strategies are dict state -> action.

def dirac(m):
    return {m: ONE}


def md_as_memoryless(md):
    return {s: dirac(m) for s, m in md.items()}


def first_action_md(mdp):
    return {s: mdp.actions(s)[0] for s in mdp.states}


def uniform_strategy(mdp, allowed=None):
    out = {}
    for s in mdp.states:
        acts = mdp.actions(s) if allowed is None or s not in allowed else sorted(allowed[s])
        w = Fraction(1, len(acts))
        out[s] = {m: w for m in acts}
    return out


def strategy_problems(mdp, alpha, partial=False):
    errs = []
    for s in mdp.states:
        if s not in alpha:
            if not partial:
                errs.append(f"strategy undefined at {s}")
            continue
        d = alpha[s]
        for m, p in d.items():
            if m not in mdp.trans[s]:
                errs.append(f"{s}: unknown action {m}")
            if p < 0:
                errs.append(f"{s}: negative weight on {m}")
        if sum((Fraction(p) for p in d.values()), ZERO) != 1:
            errs.append(f"{s}: weights do not sum to 1")
    for s in alpha:
        if s not in mdp.label:
            errs.append(f"strategy mentions unknown state {s}")
    return errs


def is_md(alpha):
    return all(sum(1 for p in d.values() if p) == 1 for d in alpha.values())


def normalize_strategy(alpha):
    return {s: _clean(d) for s, d in sorted(alpha.items())}


def induce(mdp, alpha):
    """The LMC D(alpha): tau(s)(t) = sum_m alpha(s)(m) phi(s,m)(t)."""
    tau = {}
    for s in mdp.states:
        d = alpha[s]
        if isinstance(d, str):
            d = {d: ONE}
        row = {}
        for m, p in d.items():
            p = Fraction(p)
            if not p:
                continue
            for t, q in mdp.trans[s][m].items():
                row[t] = row.get(t, ZERO) + p * q
        tau[s] = row
    return Lmc(mdp.label, tau)


def md_strategies(mdp, guard=4096, states=None):
    """Iterate MD strategies in canonical (lexicographic product) order."""
    states = mdp.states if states is None else states
    count = 1
    for s in states:
        count *= len(mdp.actions(s))
    if count > guard:
        raise GuardExceeded("MD strategies", count, guard)
    for combo in itertools.product(*(mdp.actions(s) for s in states)):
        yield dict(zip(states, combo))


def md_count(mdp):
    n = 1
    for s in mdp.states:
        n *= len(mdp.actions(s))
    return n


# distributions and words

def dist_vector(chain, mu):
    return [Fraction(mu.get(s, 0)) for s in chain.states]


def dist_problems(chain, mu, sub=False):
    errs = []
    for s, p in mu.items():
        if s not in chain.label:
            errs.append(f"unknown state {s}")
        if Fraction(p) < 0:
            errs.append(f"negative mass at {s}")
    tot = sum((Fraction(p) for p in mu.values()), ZERO)
    if sub:
        if tot > 1:
            errs.append("mass exceeds 1")
    elif tot != 1:
        errs.append(f"mass {fmt_rat(tot)} is not 1")
    return errs


def label_matrix(lmc, a):
    """M(a)(s,t) = tau(s)(t) if label(s) == a else 0, as a dense list of rows."""
    n = len(lmc.states)
    M = []
    for s in lmc.states:
        row = [ZERO] * n
        if lmc.label[s] == a:
            for t, p in lmc.tau[s].items():
                row[lmc.index[t]] = p
        M.append(row)
    return M


def step(lmc, vec, a):
    """Row vector times M(a), on dicts."""
    out = {}
    for s, p in vec.items():
        if p and lmc.label[s] == a:
            for t, q in lmc.tau[s].items():
                out[t] = out.get(t, ZERO) + p * q
    return out


def word_prob(lmc, pi, w):
    vec = {s: Fraction(p) for s, p in pi.items() if p}
    for a in w:
        vec = step(lmc, vec, a)
        if not vec:
            return ZERO
    return sum(vec.values(), ZERO)


def word_vector(lmc, w):
    """Column vector M(w) 1 as a list in state order."""
    v = [ONE] * len(lmc.states)
    for a in reversed(w):
        v = apply_label(lmc, a, v)
    return v


def apply_label(lmc, a, v):
    idx = lmc.index
    out = []
    for s in lmc.states:
        if lmc.label[s] != a:
            out.append(ZERO)
        else:
            out.append(sum((p * v[idx[t]] for t, p in lmc.tau[s].items()), ZERO))
    return out


def delta(s):
    return {s: ONE}


@dataclass
class Verdict:
    problem: str
    answer: str  # 'yes' | 'no' | 'unknown'
    strategy: dict = None
    word: tuple = None
    evidence: dict = field(default_factory=dict)

    @property
    def yes(self):
        return self.answer == "yes"

    def to_json(self):
        wit = {}
        if self.strategy is not None:
            wit["strategy"] = {s: {m: fmt_rat(p) for m, p in d.items()}
                               for s, d in sorted(self.strategy.items())}
        if self.word is not None:
            wit["word"] = list(self.word)
        return {"problem": self.problem, "answer": self.answer,
                "witness": wit or None, "evidence": self.evidence}
