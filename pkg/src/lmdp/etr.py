"""Existential-theory-of-the-reals encodings of the TV problems, written as
SMT-LIB 2 (QF_NRA) with exact rational constants.

Formulas hold polynomial constraints p ~ 0. They can be evaluated exactly
under a rational assignment, serialized, and read back.
"""
from fractions import Fraction
import itertools
import re

from .exactmath import Span, combination, fmt_rat, vec_mat
from .model import ONE, ZERO, GuardExceeded, ModelError, induce, uniform_strategy
from .distance import reachable_pairs


class Poly:
    """Sparse polynomial: dict from sorted tuple of variable names to coefficient."""
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    @staticmethod
    def const(c):
        return Poly({(): Fraction(c)})

    @staticmethod
    def var(name):
        return Poly({(name,): ONE})

    def __add__(self, other):
        other = _lift(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, ZERO) + c
        return Poly(t)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        t = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(sorted(k1 + k2))
                t[k] = t.get(k, ZERO) + c1 * c2
        return Poly(t)

    __rmul__ = __mul__

    def is_zero(self):
        return not self.terms

    def variables(self):
        return {v for k in self.terms for v in k}

    def degree(self):
        return max((len(k) for k in self.terms), default=0)

    def evaluate(self, env):
        tot = ZERO
        for k, c in self.terms.items():
            p = c
            for v in k:
                p *= env[v]
            tot += p
        return tot

    def __repr__(self):
        return f"Poly({self.to_smt()})"

    def to_smt(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda k: (len(k), k)):
            c = self.terms[k]
            if not k:
                parts.append(smt_rat(c))
            elif c == 1:
                parts.append(k[0] if len(k) == 1 else "(* " + " ".join(k) + ")")
            else:
                parts.append("(* " + smt_rat(c) + " " + " ".join(k) + ")")
        return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"


def _lift(x):
    return x if isinstance(x, Poly) else Poly.const(x)


def psum(items):
    out = Poly()
    for p in items:
        out = out + p
    return out


def smt_rat(q):
    q = Fraction(q)
    if q < 0:
        return f"(- {smt_rat(-q)})"
    if q.denominator == 1:
        return str(q.numerator)
    return f"(/ {q.numerator} {q.denominator})"


RELS = ("=", "!=", ">=", ">", "<=", "<")


def _holds(val, rel):
    return {"=": val == 0, "!=": val != 0, ">=": val >= 0, ">": val > 0,
            "<=": val <= 0, "<": val < 0}[rel]


class EtrFormula:
    def __init__(self, problem, guesses, variables, assertions, notes=()):
        self.problem = problem
        self.guesses = guesses
        self.variables = list(variables)
        self.assertions = assertions  # list of (group, Poly, rel)
        self.notes = list(notes)
        declared = set(self.variables)
        for _, p, rel in assertions:
            assert rel in RELS
            missing = p.variables() - declared
            assert not missing, missing

    def groups(self):
        out = {}
        for g, _, _ in self.assertions:
            out[g] = out.get(g, 0) + 1
        return out

    def failures(self, env):
        """Assertions violated by a complete rational assignment."""
        bad = []
        for i, (g, p, rel) in enumerate(self.assertions):
            if not _holds(p.evaluate(env), rel):
                bad.append((i, g))
        return bad

    def satisfied_by(self, env):
        return not self.failures(env)

    def to_smtlib(self):
        lines = [f"; problem={self.problem} guesses={self.guesses}"]
        lines += [f"; {n}" for n in self.notes]
        lines.append("(set-logic QF_NRA)")
        for v in self.variables:
            lines.append(f"(declare-fun {v} () Real)")
        for _, p, rel in self.assertions:
            body = p.to_smt()
            if rel == "!=":
                lines.append(f"(assert (not (= {body} 0)))")
            else:
                lines.append(f"(assert ({rel} {body} 0))")
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------ SMT-LIB reading

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _tokens(text):
    for line in text.splitlines():
        line = line.split(";", 1)[0]
        yield from _TOKEN.findall(line)


def read_sexprs(text):
    stack = [[]]
    for tok in _tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ValueError("unbalanced parenthesis")
            e = stack.pop()
            stack[-1].append(e)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced parenthesis")
    return stack[0]


def read_smtlib(text):
    """Return (declared variable names, assertion s-expressions, header)."""
    decls, asserts = [], []
    for e in read_sexprs(text):
        if not isinstance(e, list) or not e:
            continue
        if e[0] == "declare-fun":
            if e[2] != [] or e[3] != "Real":
                raise ValueError(f"unsupported declaration {e}")
            decls.append(e[1])
        elif e[0] == "assert":
            asserts.append(e[1])
    header = text.splitlines()[0] if text else ""
    return decls, asserts, header


def eval_sexpr(e, env):
    if isinstance(e, str):
        if re.fullmatch(r"\d+", e):
            return Fraction(int(e))
        return env[e]
    op, args = e[0], e[1:]
    if op == "not":
        return not eval_sexpr(args[0], env)
    if op == "and":
        return all(eval_sexpr(a, env) for a in args)
    vals = [eval_sexpr(a, env) for a in args]
    if op == "+":
        return sum(vals, ZERO)
    if op == "*":
        out = ONE
        for v in vals:
            out *= v
        return out
    if op == "-":
        return -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:], ZERO)
    if op == "/":
        return vals[0] / vals[1]
    cmp = {"=": lambda a, b: a == b, "<=": lambda a, b: a <= b, ">=": lambda a, b: a >= b,
           "<": lambda a, b: a < b, ">": lambda a, b: a > b}
    if op in cmp:
        return cmp[op](vals[0], vals[1])
    raise ValueError(f"unknown operator {op}")


# ------------------------------------------------------------ encoders

class _Vars:
    def __init__(self, mdp):
        self.mdp = mdp
        self.names = []
        self.x = {}
        for i, s in enumerate(mdp.states):
            for k, m in enumerate(mdp.actions(s)):
                self.x[(s, m)] = self.new(f"x_{i}_{k}")

    def new(self, name):
        self.names.append(name)
        return name

    def matrix(self, prefix, rows, cols):
        return [[self.new(f"{prefix}_{i}_{j}") for j in range(cols)] for i in range(rows)]

    def notes(self):
        mdp = self.mdp
        out = []
        for i, s in enumerate(mdp.states):
            acts = ", ".join(f"{k}={m}" for k, m in enumerate(mdp.actions(s)))
            out.append(f"state {i} = {s} label {mdp.label[s]} actions {acts}")
        return out


def symbolic_label_matrix(mdp, xv, a):
    """M_alpha(a) with entries linear in the strategy variables."""
    n = len(mdp.states)
    M = [[Poly() for _ in range(n)] for _ in range(n)]
    for i, s in enumerate(mdp.states):
        if mdp.label[s] != a:
            continue
        for m in mdp.actions(s):
            xm = Poly.var(xv.x[(s, m)])
            for t, p in mdp.phi(s, m).items():
                j = mdp.index[t]
                M[i][j] = M[i][j] + xm * p
    return M


def _strategy_rows(mdp, xv, support=None):
    out = []
    for s in mdp.states:
        out.append(("simplex", psum(Poly.var(xv.x[(s, m)]) for m in mdp.actions(s)) - 1, "="))
    for s in mdp.states:
        for m in mdp.actions(s):
            v = Poly.var(xv.x[(s, m)])
            if support is None:
                out.append(("nonneg", v, ">="))
            elif m in support.get(s, ()):
                out.append(("support", v, ">"))
            else:
                out.append(("support", v, "="))
    return out


def _trace_equiv_rows(mdp, xv, F, B, first_row):
    """F first row, F 1 = 0 and F M(a) = B(a) F."""
    n = len(mdp.states)
    out = []
    for j in range(n):
        out.append(("first_row", Poly.var(F[0][j]) - first_row[j], "="))
    for i in range(n):
        out.append(("row_sums", psum(Poly.var(F[i][j]) for j in range(n)), "="))
    for a in mdp.labels:
        M = symbolic_label_matrix(mdp, xv, a)
        Ba = B[a]
        for i in range(n):
            for j in range(n):
                lhs = psum(Poly.var(F[i][k]) * M[k][j] for k in range(n) if not M[k][j].is_zero())
                rhs = psum(Poly.var(Ba[i][k]) * Poly.var(F[k][j]) for k in range(n))
                out.append(("invariance", lhs - rhs, "="))
    return out


def _mu_minus_nu(mdp, mu, nu):
    return [Fraction(mu.get(s, 0)) - Fraction(nu.get(s, 0)) for s in mdp.states]


def _fmt_dist(d):
    return "{" + ",".join(f"{s}:{fmt_rat(p)}" for s, p in sorted(d.items()) if p) + "}"


def encode_tv_eq0(mdp, mu, nu):
    n = len(mdp.states)
    xv = _Vars(mdp)
    F = xv.matrix("F", n, n)
    B = {a: xv.matrix(f"B{li}", n, n) for li, a in enumerate(mdp.labels)}
    rows = _strategy_rows(mdp, xv)
    rows += _trace_equiv_rows(mdp, xv, F, B, [Poly.const(c) for c in _mu_minus_nu(mdp, mu, nu)])
    notes = xv.notes() + [f"mu={_fmt_dist(mu)} nu={_fmt_dist(nu)}"]
    f = EtrFormula("TV=0", "none", xv.names, rows, notes)
    f.layout = {"x": xv.x, "F": F, "B": B}
    return f


def encode_tv_lt1(mdp, mu, nu, r1, supp2):
    n = len(mdp.states)
    xv = _Vars(mdp)
    F = xv.matrix("F", n, n)
    B = {a: xv.matrix(f"B{li}", n, n) for li, a in enumerate(mdp.labels)}
    m1 = [xv.new(f"mu1_{j}") for j in range(n)]
    m2 = [xv.new(f"mu2_{j}") for j in range(n)]
    rows = _strategy_rows(mdp, xv)
    first = [Poly.var(m1[j]) - Poly.var(m2[j]) for j in range(n)]
    rows += _trace_equiv_rows(mdp, xv, F, B, first)
    rows.append(("r1_mass", Poly.var(m1[mdp.index[r1]]), ">"))
    for j, s in enumerate(mdp.states):
        if s not in supp2:
            rows.append(("supp2", Poly.var(m2[j]), "="))
    for vec in (m1, m2):
        for j in range(n):
            rows.append(("subdist", Poly.var(vec[j]), ">="))
        rows.append(("subdist", 1 - psum(Poly.var(v) for v in vec), ">="))
    guess = f"r1={r1};supp2={','.join(sorted(supp2))}"
    notes = xv.notes() + [f"mu={_fmt_dist(mu)} nu={_fmt_dist(nu)}"]
    f = EtrFormula("TV<1", guess, xv.names, rows, notes)
    f.layout = {"x": xv.x, "F": F, "B": B, "mu1": m1, "mu2": m2}
    return f


def symbolic_word_vector(mdp, xv, w):
    n = len(mdp.states)
    v = [Poly.const(1) for _ in range(n)]
    for a in reversed(w):
        M = symbolic_label_matrix(mdp, xv, a)
        v = [psum(M[i][j] * v[j] for j in range(n) if not M[i][j].is_zero()) for i in range(n)]
    return v


def reach_sets(mdp, mu, nu, support=None):
    """R_s = {r2 : (s, r2) reachable} in the chain of a full-support strategy
    over the given (or every) action set."""
    lmc = induce(mdp, uniform_strategy(mdp, support))
    R = reachable_pairs(lmc, mu, nu)
    return {s: sorted(r2 for r1, r2 in R if r1 == s) for s in mdp.states}


def encode_tv_eq1(mdp, mu, nu, words, rprime, support=None):
    """words: the guessed words w_1..w_{r-1}; their vectors together with 1
    form a basis B. rprime = |S| - r is the dimension of its complement H."""
    n = len(mdp.states)
    r = len(words) + 1
    if r + rprime != n:
        raise ModelError(f"r + r' = {r + rprime} but |S| = {n}")
    xv = _Vars(mdp)
    b = [[xv.new(f"b_{i}_{j}") for j in range(n)] for i in range(r)]
    Q = xv.matrix("Q", n, r)
    R = {}
    for i in range(r):
        for k in range(i, r):
            R[(i, k)] = xv.new(f"R_{i}_{k}")
    G = {a: xv.matrix(f"G{li}", r, r) for li, a in enumerate(mdp.labels)}
    H = xv.matrix("H", n, rprime)
    V = xv.matrix("V", n, n)
    bs = [xv.new(f"bs_{j}") for j in range(n)]
    P = Poly.var
    rows = _strategy_rows(mdp, xv, support)
    for j in range(n):
        rows.append(("b0", P(b[0][j]) - 1, "="))
    for i, w in enumerate(words, 1):
        vec = symbolic_word_vector(mdp, xv, tuple(w))
        for j in range(n):
            rows.append(("word_vectors", P(b[i][j]) - vec[j], "="))
    for i in range(r):
        for k in range(i, r):
            rows.append(("q_orthonormal", psum(P(Q[j][i]) * P(Q[j][k]) for j in range(n)) - (1 if i == k else 0), "="))
    for i in range(r):
        rows.append(("r_diagonal", P(R[(i, i)]), "!="))
    for i in range(r):
        for j in range(n):
            rows.append(("qr", P(b[i][j]) - psum(P(Q[j][k]) * P(R[(k, i)]) for k in range(i + 1)), "="))
    for a in mdp.labels:
        M = symbolic_label_matrix(mdp, xv, a)
        for j in range(n):
            for i in range(r):
                lhs = psum(M[j][t] * P(b[i][t]) for t in range(n) if not M[j][t].is_zero())
                rhs = psum(P(b[k][j]) * P(G[a][k][i]) for k in range(r))
                rows.append(("invariance", lhs - rhs, "="))
    for i in range(rprime):
        for k in range(i, rprime):
            rows.append(("h_orthonormal", psum(P(H[j][i]) * P(H[j][k]) for j in range(n)) - (1 if i == k else 0), "="))
    for c in range(r):
        for i in range(rprime):
            rows.append(("h_perp_b", psum(P(b[c][j]) * P(H[j][i]) for j in range(n)), "="))
    Rs = reach_sets(mdp, mu, nu, support)
    for si, s in enumerate(mdp.states):
        for i in range(rprime):
            rows.append(("v_perp_h", psum(P(V[si][j]) * P(H[j][i]) for j in range(n)), "="))
        rows.append(("v_dot_cs", P(V[si][si]) - P(bs[si]), "="))
        for j in range(n):
            rows.append(("v_nonneg", P(V[si][j]), ">="))
        for t in Rs[s]:
            rows.append(("v_nonpos_reach", -P(V[si][mdp.index[t]]), ">="))
        rows.append(("bs_pos", P(bs[si]), ">"))
    guess = "words=" + "|".join(".".join(w) if w else "eps" for w in words) + f";rprime={rprime}"
    if support is not None:
        guess += ";support=" + ",".join(f"{s}:{'+'.join(sorted(support[s]))}" for s in sorted(support))
    notes = xv.notes() + [f"mu={_fmt_dist(mu)} nu={_fmt_dist(nu)}"]
    f = EtrFormula("TV=1", guess, xv.names, rows, notes)
    f.layout = {"x": xv.x, "b": b, "Q": Q, "R": R, "G": G, "H": H, "V": V, "bs": bs}
    return f


def strategy_assignment(mdp, layout, alpha):
    env = {}
    for (s, m), name in layout["x"].items():
        env[name] = Fraction(alpha.get(s, {}).get(m, 0))
    return env


def tv_eq0_assignment(mdp, mu, nu, alpha):
    """A satisfying assignment for the TV=0 formula built from the rows
    (mu - nu) M(w) of a trace-equivalent strategy, or None."""
    n = len(mdp.states)
    f = encode_tv_eq0(mdp, mu, nu)
    lay = f.layout
    lmc = induce(mdp, alpha)
    mats = {}
    for a in mdp.labels:
        M = [[ZERO] * n for _ in range(n)]
        for i, s in enumerate(mdp.states):
            if lmc.label[s] == a:
                for t, p in lmc.tau[s].items():
                    M[i][lmc.index[t]] = p
        mats[a] = M
    d = _mu_minus_nu(mdp, mu, nu)
    span = Span(n)
    rows = []
    if any(d):
        span.add(d)
        rows.append(d)
    i = 0
    while i < len(rows):
        for a in mdp.labels:
            v = vec_mat(rows[i], mats[a])
            if span.add(v):
                rows.append(v)
        i += 1
    if any(sum(r, ZERO) for r in rows):
        return None
    env = strategy_assignment(mdp, lay, alpha)
    Fm = rows + [[ZERO] * n for _ in range(n - len(rows))]
    for i in range(n):
        for j in range(n):
            env[lay["F"][i][j]] = Fm[i][j]
    for a in mdp.labels:
        for i in range(n):
            coeffs = [ZERO] * n
            if i < len(rows):
                c = combination(rows, vec_mat(rows[i], mats[a]))
                if c is None:
                    return None
                coeffs[:len(c)] = c
            for k in range(n):
                env[lay["B"][a][i][k]] = coeffs[k]
    return env, f


# ------------------------------------------------------------ guess enumeration

def _words_up_to(labels, n):
    for k in range(1, n + 1):
        for w in itertools.product(labels, repeat=k):
            yield w


def enumerate_guesses(tag, mdp, mu, nu, guard=4096):
    """Formulas for each NP guess of a problem tag, in canonical order."""
    n = len(mdp.states)
    out = []

    def push(f):
        out.append(f)
        if len(out) > guard:
            raise GuardExceeded("formula guesses", len(out), guard)

    tag = tag.rstrip("*")
    if tag == "TV=0":
        push(encode_tv_eq0(mdp, mu, nu))
    elif tag == "TV<1":
        Rs = reach_sets(mdp, mu, nu)
        for r1 in mdp.states:
            cand = Rs[r1]
            for k in range(1, len(cand) + 1):
                for supp2 in itertools.combinations(cand, k):
                    push(encode_tv_lt1(mdp, mu, nu, r1, set(supp2)))
    elif tag == "TV=1":
        words = list(_words_up_to(mdp.labels, n))
        for r in range(1, n + 1):
            for ws in itertools.combinations(words, r - 1):
                push(encode_tv_eq1(mdp, mu, nu, list(ws), n - r))
    else:
        raise ModelError(f"no formula encoding for {tag!r}")
    return out
