"""Qualitative distance problems: pair graphs, LMC checks and the MDP
procedures for the probabilistic bisimilarity distance and the total
variation distance."""
from collections import deque
from fractions import Fraction
import itertools

from .bisim import block_of, lmc_bisim, minimizing_strategy, optimistic_refine, same_block
from .exactmath import LinearProgram, solve_lp, strictly_feasible
from .model import (ONE, ZERO, GuardExceeded, Verdict, induce, md_count,
                    md_strategies, uniform_strategy)
from .trace import lmc_distinguishing_word, lmc_trace_basis


# ---------------------------------------------------------------- LMC level

def _preds(lmc):
    pre = {s: [] for s in lmc.states}
    for s in lmc.states:
        for t in lmc.tau[s]:
            pre[t].append(s)
    return pre


def pair_graph(lmc):
    """Vertices (u,v) with equal labels; (u,v) -> (s',t') when
    tau(s')(u) > 0 and tau(t')(v) > 0."""
    lab = lmc.label
    V = [(u, v) for u in lmc.states for v in lmc.states if lab[u] == lab[v]]
    pre = _preds(lmc)
    E = {}
    for u, v in V:
        E[(u, v)] = [(a, b) for a in pre[u] for b in pre[v] if lab[a] == lab[b]]
    return V, E


def pb_lt1_pairs(lmc, partition=None):
    """Pairs (s,t) reachable in the pair graph from a bisimilar pair."""
    part = partition or lmc_bisim(lmc)
    bo = block_of(part)
    lab = lmc.label
    pre = _preds(lmc)
    seen = set()
    dq = deque()
    for u in lmc.states:
        for v in lmc.states:
            if bo[u] == bo[v]:
                seen.add((u, v))
                dq.append((u, v))
    while dq:
        u, v = dq.popleft()
        for a in pre[u]:
            for b in pre[v]:
                if lab[a] == lab[b] and (a, b) not in seen:
                    seen.add((a, b))
                    dq.append((a, b))
    return seen


def lmc_pb_eq1(lmc, s, t, partition=None):
    if lmc.label[s] != lmc.label[t]:
        return True
    return (s, t) not in pb_lt1_pairs(lmc, partition)


def reachable_pairs(lmc, mu, nu):
    """{(r1,r2) : r1 in supp(mu M(w)), r2 in supp(nu M(w)) for some word w}."""
    start = [(a, b) for a in mu if mu[a] for b in nu if nu[b]]
    seen = set(start)
    dq = deque(start)
    while dq:
        a, b = dq.popleft()
        if lmc.label[a] != lmc.label[b]:
            continue
        for a2 in lmc.tau[a]:
            for b2 in lmc.tau[b]:
                if (a2, b2) not in seen:
                    seen.add((a2, b2))
                    dq.append((a2, b2))
    return seen


def tv_lt1_witness(lmc, mu, nu):
    """Return (r1, lambda-point) if d_tv(mu,nu) < 1, else None.

    For some r1 we need a vector v = c_r1 + sum_t l_t c_t - sum_{t in R_r1} l'_t c_t
    orthogonal to every M(w) 1.
    """
    R = reachable_pairs(lmc, mu, nu)
    basis = [b for _, b in lmc_trace_basis(lmc)]
    idx = lmc.index
    for r1 in lmc.states:
        R1 = sorted(r2 for (a, r2) in R if a == r1)
        if not R1:
            continue
        if r1 in R1:
            return r1, {}
        lam = [("l", t) for t in lmc.states]
        lamp = [("lp", t) for t in R1]
        cons = []
        for b in basis:
            row = {}
            for t in lmc.states:
                if b[idx[t]]:
                    row[("l", t)] = b[idx[t]]
            for t in R1:
                if b[idx[t]]:
                    row[("lp", t)] = row.get(("lp", t), 0) - b[idx[t]]
            cons.append((row, "=", -b[idx[r1]]))
        res = solve_lp(LinearProgram(lam + lamp, cons))
        if res.status != "infeasible":
            return r1, res.point
    return None


def lmc_tv_lt1(lmc, mu, nu):
    return tv_lt1_witness(lmc, mu, nu) is not None


# ---------------------------------------------------------------- helpers

def _subsets(items, max_size=None):
    items = list(items)
    top = len(items) if max_size is None else min(max_size, len(items))
    for k in range(1, top + 1):
        for c in itertools.combinations(items, k):
            yield frozenset(c)


def _succ(mdp, s, acts):
    out = set()
    for m in acts:
        out.update(mdp.phi(s, m))
    return out


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


def _gfp_pairs(mdp, ok):
    """Greatest set C of unordered same-label pairs with ok(x, y, C) for all."""
    lab = mdp.label
    C = {(x, y) for x in mdp.states for y in mdp.states if x < y and lab[x] == lab[y]}
    changed = True
    while changed:
        changed = False
        for p in sorted(C):
            if not ok(p[0], p[1], C):
                C.discard(p)
                changed = True
    return C


def _related(C, a, b):
    return a == b or _pair(a, b) in C


def _matched(X, Y, C):
    return (all(any(_related(C, a, b) for b in Y) for a in X)
            and all(any(_related(C, a, b) for a in X) for b in Y))


def candidate_pairs(mdp):
    """Over-approximation of pairs bisimilar under some strategy: some choice
    of supports lets every successor find a related partner on the other side."""
    def ok(x, y, C):
        sx, sy = set(mdp.actions(x)), set(mdp.actions(y))
        while True:
            Y = _succ(mdp, y, sy)
            nx = {m for m in sx if all(any(_related(C, a, b) for b in Y) for a in mdp.phi(x, m))}
            X = _succ(mdp, x, nx)
            ny = {m for m in sy if all(any(_related(C, a, b) for a in X) for b in mdp.phi(y, m))}
            if nx == sx and ny == sy:
                return bool(sx) and bool(sy)
            sx, sy = nx, ny
    return _gfp_pairs(mdp, ok)


def support_pairs(mdp, support):
    """Pairs that can be bisimilar under a strategy with exactly this support."""
    succ = {s: _succ(mdp, s, support[s]) for s in mdp.states}

    def ok(x, y, C):
        return _matched(succ[x], succ[y], C)
    return _gfp_pairs(mdp, ok)


class _UF:
    def __init__(self, parent=None):
        self.parent = dict(parent or {})

    def find(self, x):
        p = self.parent
        root = x
        while p.get(root, root) != root:
            root = p[root]
        while p.get(x, x) != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def copy(self):
        return _UF(self.parent)

    def blocks(self, states):
        groups = {}
        for s in states:
            groups.setdefault(self.find(s), []).append(s)
        return groups


def _set_partitions(atoms):
    """All set partitions of a list (restricted growth order)."""
    if not atoms:
        yield []
        return
    first, rest = atoms[0], atoms[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


class _Counter:
    def __init__(self, guard, what):
        self.n = 0
        self.guard = guard
        self.what = what

    def tick(self):
        self.n += 1
        if self.guard is not None and self.n > self.guard:
            raise GuardExceeded(self.what, self.n, self.guard)


# ------------------------------------------------- strategy-bisimulation search

def block_lp(mdp, blocks, support, strict):
    """Solve for a strategy making every block a bisimulation block.

    blocks: list of state lists covering the states. support: dict for the
    members of non-singleton blocks. Returns dict state -> distribution or None.
    """
    bo = {}
    for i, b in enumerate(blocks):
        for s in b:
            bo[s] = i
    members = [s for b in blocks if len(b) > 1 for s in b]
    var_states = [s for s in members if len(support[s]) > 1]
    variables = [(s, m) for s in var_states for m in sorted(support[s])]

    def flow(s):
        """Block masses of s as dict block -> dict (var or None) -> coeff."""
        out = {}
        acts = sorted(support[s])
        for m in acts:
            key = (s, m) if len(acts) > 1 else None
            for t, p in mdp.phi(s, m).items():
                d = out.setdefault(bo[t], {})
                d[key] = d.get(key, ZERO) + p
        return out

    eqs = []
    for b in blocks:
        if len(b) < 2:
            continue
        f0 = flow(b[0])
        for other in b[1:]:
            f1 = flow(other)
            for E in set(f0) | set(f1):
                row = {}
                const = ZERO
                for k, c in f0.get(E, {}).items():
                    if k is None:
                        const += c
                    else:
                        row[k] = row.get(k, ZERO) + c
                for k, c in f1.get(E, {}).items():
                    if k is None:
                        const -= c
                    else:
                        row[k] = row.get(k, ZERO) - c
                row = {k: c for k, c in row.items() if c}
                if not row:
                    if const:
                        return None
                    continue
                eqs.append((row, "=", -const))
    alpha = {s: {next(iter(support[s])): ONE} for s in members if len(support[s]) == 1}
    if not variables:
        return alpha
    cons = list(eqs)
    for s in var_states:
        cons.append(({(s, m): 1 for m in support[s]}, "=", 1))
    if strict:
        ok, point = strictly_feasible(variables, cons, [{v: 1} for v in variables])
        if not ok:
            return None
    else:
        res = solve_lp(LinearProgram(variables, cons))
        if res.status == "infeasible":
            return None
        point = res.point
    for s in var_states:
        alpha[s] = {m: point[(s, m)] for m in sorted(support[s]) if point[(s, m)]}
    return alpha


def search_bisimilar(mdp, u, v, support=None, strict=False, guard=None, counter=None):
    """Find a strategy under which u and v are bisimilar, or None.

    Only partitions generated from (u,v) are explored: each related pair forces
    its successors into groups that pair an element of one side with one of the
    other. With support=None supports are chosen lazily per state; otherwise
    they are fixed (and with strict=True, every listed action gets weight > 0).
    """
    if u == v:
        return {}
    if mdp.label[u] != mdp.label[v]:
        return None
    C = candidate_pairs(mdp) if support is None else support_pairs(mdp, support)
    if _pair(u, v) not in C:
        return None
    counter = counter or _Counter(guard, "partitions")
    states = mdp.states
    seen_lp = {}

    def options(x):
        if support is not None:
            return [frozenset(support[x])]
        return list(_subsets(mdp.actions(x)))

    def leaf(uf, chosen):
        groups = uf.blocks(states)
        blocks = sorted((sorted(g) for g in groups.values()), key=lambda b: b[0])
        key = (tuple(map(tuple, blocks)), tuple(sorted((s, tuple(sorted(a))) for s, a in chosen.items())))
        if key in seen_lp:
            return seen_lp[key]
        counter.tick()
        sup = dict(chosen)
        res = block_lp(mdp, blocks, sup, strict)
        seen_lp[key] = res
        return res

    def rec(uf, chosen, queue, done):
        while queue:
            x, y = queue[0]
            if _pair(x, y) in done or x == y:
                queue = queue[1:]
                continue
            break
        if not queue:
            return leaf(uf, chosen)
        x, y = queue[0]
        rest = queue[1:]
        for ox in ([chosen[x]] if x in chosen else options(x)):
            for oy in ([chosen[y]] if y in chosen else options(y)):
                ch = dict(chosen)
                ch[x], ch[y] = ox, oy
                X, Y = _succ(mdp, x, ox), _succ(mdp, y, oy)
                if not _matched(X, Y, C):
                    continue
                U = sorted(X | Y)
                atoms = {}
                for w in U:
                    atoms.setdefault(uf.find(w), []).append(w)
                atom_list = [atoms[k] for k in sorted(atoms)]
                for part in _set_partitions(atom_list):
                    groups = [sorted(w for atom in g for w in atom) for g in part]
                    if not all(any(w in X for w in g) and any(w in Y for w in g) for g in groups):
                        continue
                    nuf = uf.copy()
                    for g in groups:
                        for w in g[1:]:
                            nuf.union(g[0], w)
                    if not _blocks_in(nuf, states, C):
                        continue
                    new = []
                    for g in groups:
                        for a in g:
                            if a not in X:
                                continue
                            for b in g:
                                if b in Y and a != b:
                                    new.append(_pair(a, b))
                    nd = set(done)
                    nd.add(_pair(x, y))
                    res = rec(nuf, ch, rest + sorted(set(new)), nd)
                    if res is not None:
                        return res
        return None

    uf = _UF()
    uf.union(u, v)
    res = rec(uf, {}, [_pair(u, v)], frozenset())
    return res


def _blocks_in(uf, states, C):
    for block in uf.blocks(states).values():
        if len(block) > 1:
            for i, a in enumerate(block):
                for b in block[i + 1:]:
                    if _pair(a, b) not in C:
                        return False
    return True


def _complete(mdp, partial, support=None):
    """Fill in a strategy: uniform over the support where given, else the
    first action."""
    out = {}
    for s in mdp.states:
        if s in partial and partial[s]:
            out[s] = dict(partial[s])
        elif support is not None and s in support:
            acts = sorted(support[s])
            out[s] = {m: Fraction(1, len(acts)) for m in acts}
        else:
            out[s] = {mdp.actions(s)[0]: ONE}
    return out


# ---------------------------------------------------------------- MDP level

def pb_eq0(mdp, s, t, guard=4096):
    """Is there a strategy under which s and t are bisimilar?"""
    if s == t:
        alpha = _complete(mdp, {})
        return Verdict("PB=0", "yes", alpha, evidence={"reason": "identical states"})
    if mdp.label[s] != mdp.label[t]:
        return Verdict("PB=0", "no", evidence={"reason": "labels differ"})
    trace = optimistic_refine(mdp)
    if same_block(trace.fixpoint, s, t):
        alpha = _complete(mdp, {})
        _verify_bisimilar(mdp, alpha, s, t)
        return Verdict("PB=0", "yes", alpha, evidence={"reason": "bisimilar under every strategy"})
    counter = _Counter(guard, "partitions")
    part = search_bisimilar(mdp, s, t, counter=counter)
    if part is None:
        return Verdict("PB=0", "no", evidence={"lp_calls": counter.n})
    alpha = _complete(mdp, part)
    _verify_bisimilar(mdp, alpha, s, t)
    return Verdict("PB=0", "yes", alpha, evidence={"lp_calls": counter.n})


def _verify_bisimilar(mdp, alpha, s, t):
    if not same_block(lmc_bisim(induce(mdp, alpha)), s, t):
        raise AssertionError("strategy witness failed bisimilarity check")


def _forward_pairs(mdp, s, t, chosen):
    """Label-matched pairs reachable from (s,t) with the decided supports;
    returns (pairs, first undecided state or None)."""
    lab = mdp.label
    seen = {(s, t)}
    dq = deque([(s, t)])
    order = []
    while dq:
        x, y = dq.popleft()
        pending = [z for z in (x, y) if z not in chosen]
        if pending:
            order.extend(pending)
            continue
        for a in _succ(mdp, x, chosen[x]):
            for b in _succ(mdp, y, chosen[y]):
                if lab[a] == lab[b] and (a, b) not in seen:
                    seen.add((a, b))
                    dq.append((a, b))
    return seen, (order[0] if order else None)


def _support_search(mdp, s, t, max_size, visit, prune=None):
    """Depth-first over supports of states met in the forward pair closure."""

    def rec(chosen):
        pairs, nxt = _forward_pairs(mdp, s, t, chosen)
        if prune and prune(pairs):
            return None
        if nxt is None:
            return visit(chosen, pairs)
        for opt in _subsets(mdp.actions(nxt), max_size):
            ch = dict(chosen)
            ch[nxt] = opt
            r = rec(ch)
            if r is not None:
                return r
        return None

    return rec({})


def _has_diagonal(pairs):
    return any(a == b for a, b in pairs)


def pb_eq1(mdp, s, t, guard=4096, max_support=2):
    """Is there a strategy with d_pb(s,t) = 1?

    Supports of size at most two suffice, since the minimizing strategy of the
    restricted MDP randomizes over at most two actions.
    """
    tag = "PB=1"
    if mdp.label[s] != mdp.label[t]:
        return Verdict(tag, "yes", _complete(mdp, {}), evidence={"reason": "labels differ"})
    if s == t:
        return Verdict(tag, "no", evidence={"reason": "identical states"})
    counter = _Counter(guard, "action-subset products")

    def visit(chosen, pairs):
        counter.tick()
        allowed = {x: chosen.get(x, frozenset([mdp.actions(x)[0]])) for x in mdp.states}
        sub = mdp.restrict(allowed)
        beta = minimizing_strategy(sub)
        if lmc_pb_eq1(induce(sub, beta), s, t):
            return beta
        return None

    beta = _support_search(mdp, s, t, max_support, visit, _has_diagonal)
    if beta is None:
        return Verdict(tag, "no", evidence={"supports_checked": counter.n})
    if not lmc_pb_eq1(induce(mdp, beta), s, t):
        raise AssertionError("pb_eq1 witness failed verification")
    return Verdict(tag, "yes", beta, evidence={"supports_checked": counter.n})


def pb_lt1(mdp, s, t, guard=4096):
    """Is there a strategy with d_pb(s,t) < 1?"""
    tag = "PB<1"
    if mdp.label[s] != mdp.label[t]:
        return Verdict(tag, "no", evidence={"reason": "labels differ"})
    if s == t:
        return Verdict(tag, "yes", _complete(mdp, {}), evidence={"reason": "identical states"})
    uni = uniform_strategy(mdp)
    if not lmc_pb_eq1(induce(mdp, uni), s, t):
        return Verdict(tag, "yes", uni, evidence={"reason": "full-support strategy"})
    counter = _Counter(guard, "action-subset products")
    lp_counter = _Counter(None, "partitions")
    memo = {}

    def visit(chosen, pairs):
        counter.tick()
        sup = {x: chosen.get(x, frozenset([mdp.actions(x)[0]])) for x in mdp.states}
        for u, v in sorted(pairs):
            if u == v:
                continue
            key = (u, v, tuple(sorted((x, tuple(sorted(a))) for x, a in sup.items())))
            if key not in memo:
                memo[key] = search_bisimilar(mdp, u, v, support=sup, strict=True,
                                             counter=lp_counter)
            part = memo[key]
            if part is not None:
                alpha = _complete(mdp, part, sup)
                return alpha
        return None

    alpha = _support_search(mdp, s, t, None, visit)
    if alpha is None:
        return Verdict(tag, "no", evidence={"supports_checked": counter.n})
    if lmc_pb_eq1(induce(mdp, alpha), s, t):
        raise AssertionError("pb_lt1 witness failed verification")
    return Verdict(tag, "yes", alpha, evidence={"supports_checked": counter.n,
                                                "lp_calls": lp_counter.n})


# ---------------------------------------------------------- MD screening

def _md_check(tag, lmc, a, b):
    if tag == "TV=0":
        return lmc_distinguishing_word(lmc, a, b) is None
    if tag == "TV>0":
        return lmc_distinguishing_word(lmc, a, b) is not None
    if tag == "TV<1":
        return lmc_tv_lt1(lmc, a, b)
    if tag == "TV=1":
        return not lmc_tv_lt1(lmc, a, b)
    if tag == "PB=0":
        return same_block(lmc_bisim(lmc), a, b)
    if tag == "PB>0":
        return not same_block(lmc_bisim(lmc), a, b)
    if tag == "PB=1":
        return lmc_pb_eq1(lmc, a, b)
    if tag == "PB<1":
        return not lmc_pb_eq1(lmc, a, b)
    raise ValueError(f"unknown problem {tag!r}")


def md_underapprox(mdp, tag, a, b, guard=4096):
    """Search MD strategies only: 'yes' with a verified witness or 'unknown'.

    For TV problems a and b are distributions, for PB problems states.
    """
    tag = tag.rstrip("*")
    n = md_count(mdp)
    for md in md_strategies(mdp, guard):
        lmc = induce(mdp, md)
        if _md_check(tag, lmc, a, b):
            return Verdict(tag + "*", "yes", {s: {m: ONE} for s, m in md.items()},
                           evidence={"md_strategies": n})
    return Verdict(tag + "*", "unknown", evidence={"md_strategies": n})
