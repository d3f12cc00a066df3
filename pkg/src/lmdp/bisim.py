"""Probabilistic bisimilarity of LMCs and the optimistic refinement of MDPs.

Partitions are tuples of sorted tuples of states, blocks ordered by their
least element.
"""
from fractions import Fraction

from .exactmath import primes_from
from .model import ONE, ZERO, Verdict, induce


def canon(blocks):
    return tuple(sorted(tuple(sorted(b)) for b in blocks if b))


def block_of(partition):
    return {s: i for i, b in enumerate(partition) for s in b}


def same_block(partition, s, t):
    bo = block_of(partition)
    return bo[s] == bo[t]


def _group(states, key):
    groups = {}
    for s in states:
        groups.setdefault(key(s), []).append(s)
    return canon(groups.values())


def lmc_bisim(lmc):
    """Coarsest probabilistic bisimulation, by signature refinement."""
    part = _group(lmc.states, lambda s: lmc.label[s])
    while True:
        bo = block_of(part)

        def sig(s):
            mass = {}
            for t, p in lmc.tau[s].items():
                mass[bo[t]] = mass.get(bo[t], ZERO) + p
            return (bo[s], tuple(sorted(mass.items())))

        new = _group(lmc.states, sig)
        if new == part:
            return part
        part = new


def lmc_bisimilar(lmc, s, t):
    return same_block(lmc_bisim(lmc), s, t)


def block_vector(mdp, s, m, partition, bo=None):
    bo = bo or block_of(partition)
    vec = [ZERO] * len(partition)
    for t, p in mdp.phi(s, m).items():
        vec[bo[t]] += p
    return tuple(vec)


def phi_set(mdp, s, partition, bo=None):
    """The set of block distributions phi(s,m)(X) over the actions m."""
    bo = bo or block_of(partition)
    return {block_vector(mdp, s, m, partition, bo) for m in mdp.actions(s)}


def equiv_classes(mdp, partition):
    """S / ==_X: same label, and (for distinct states) one shared block
    distribution that is the only one either state can produce."""
    bo = block_of(partition)

    def key(s):
        vs = phi_set(mdp, s, partition, bo)
        if len(vs) == 1:
            return (mdp.label[s], 0, next(iter(vs)))
        return (mdp.label[s], 1, s)

    return _group(mdp.states, key)


class RefinementTrace:
    """Distinct partitions X_0 = {S}, X_1, ... up to the fixpoint."""

    def __init__(self, partitions):
        self.partitions = partitions

    def __len__(self):
        return len(self.partitions)

    def __getitem__(self, i):
        return self.partitions[i]

    def at(self, i):
        """X_i, constant once past the fixpoint."""
        return self.partitions[min(i, len(self.partitions) - 1)]

    @property
    def fixpoint(self):
        return self.partitions[-1]


def optimistic_refine(mdp):
    parts = [canon([mdp.states])]
    while True:
        nxt = equiv_classes(mdp, parts[-1])
        if nxt == parts[-1]:
            return RefinementTrace(parts)
        parts.append(nxt)


def all_blocks(trace):
    seen = []
    for part in trace.partitions:
        for b in part:
            if b not in seen:
                seen.append(b)
    return seen


def collect_denominators(mdp, trace):
    """Reduced denominators of phi(u,m)(E) and positive numerators of
    phi(u,m1)(E) - phi(u,m2)(E), for E ranging over every block of the trace."""
    N = set()
    for E in all_blocks(trace):
        E = set(E)
        for u in mdp.states:
            vals = [sum((p for t, p in mdp.phi(u, m).items() if t in E), ZERO)
                    for m in mdp.actions(u)]
            for v in vals:
                N.add(Fraction(v).denominator)
            for v1 in vals:
                for v2 in vals:
                    d = v1 - v2
                    if d > 0:
                        N.add(d.numerator)
    return N


def prime_assignment(mdp, N):
    """Distinct primes, none dividing a member of N, in state order."""
    used = set()
    out = {}
    for s in mdp.states:
        for p in primes_from(2):
            if p not in used and all(b % p for b in N):
                out[s] = p
                used.add(p)
                break
    return out


def build_partial_strategy(mdp, trace, primes):
    """Randomize at the states that stop being determined at some step."""
    alpha = {}
    n = len(mdp.states)
    for i in range(max(n - 1, 0)):
        Xi, Xj = trace.at(i), trace.at(i + 1)
        bi, bj = block_of(Xi), block_of(Xj)
        for u in mdp.states:
            if u in alpha:
                continue
            if len(phi_set(mdp, u, Xi, bi)) != 1 or len(phi_set(mdp, u, Xj, bj)) == 1:
                continue
            pick = _least_split(mdp, u, Xj, bj)
            m1, m2 = pick
            p = Fraction(1, primes[u])
            alpha[u] = {m1: p, m2: ONE - p}
    return alpha


def _least_split(mdp, u, partition, bo):
    vecs = {m: block_vector(mdp, u, m, partition, bo) for m in mdp.actions(u)}
    for m1 in mdp.actions(u):
        for m2 in mdp.actions(u):
            for k in range(len(partition)):
                if vecs[m1][k] > vecs[m2][k]:
                    return m1, m2
    raise AssertionError(f"no splitting actions at {u}")


def minimizing_strategy(mdp, trace=None, primes=None):
    """Strategy beta whose bisimilarity equals the refinement fixpoint."""
    trace = trace or optimistic_refine(mdp)
    if primes is None:
        primes = prime_assignment(mdp, collect_denominators(mdp, trace))
    part = build_partial_strategy(mdp, trace, primes)
    beta = {}
    for s in mdp.states:
        beta[s] = part.get(s) or {mdp.actions(s)[0]: ONE}
    return beta


def pb_gt0(mdp, s, t):
    """Is there a strategy making s and t non-bisimilar?"""
    trace = optimistic_refine(mdp)
    if same_block(trace.fixpoint, s, t):
        return Verdict("PB>0", "no", evidence={"fixpoint_blocks": len(trace.fixpoint)})
    beta = minimizing_strategy(mdp, trace)
    if same_block(lmc_bisim(induce(mdp, beta)), s, t):
        raise AssertionError("minimizing strategy failed verification")
    return Verdict("PB>0", "yes", beta,
                   evidence={"fixpoint_blocks": len(trace.fixpoint),
                             "trace_length": len(trace)})
