"""Exact rational helpers: parsing, spans, linear solves and a simplex LP.

Everything here works over fractions.Fraction. No floats are used.
"""
import re
from fractions import Fraction

Rat = Fraction

_RAT_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


class ParseError(ValueError):
    pass


def parse_rat(text):
    """Parse "n" or "n/d". Decimal and scientific forms are rejected."""
    m = _RAT_RE.match(text.strip())
    if not m:
        raise ParseError(f"not an exact rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def fmt_rat(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def dot(u, v):
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


def is_zero(v):
    return not any(v)


class Span:
    """Incrementally built row echelon basis of a subspace of Q^n."""

    def __init__(self, n):
        self.n = n
        self.rows = []   # (pivot, row) with row[pivot] == 1
        self.originals = []

    def __len__(self):
        return len(self.rows)

    def copy(self):
        other = Span(self.n)
        other.rows = list(self.rows)
        other.originals = list(self.originals)
        return other

    def reduce(self, v):
        v = list(v)
        for p, row in self.rows:
            c = v[p]
            if c:
                for j in range(self.n):
                    if row[j]:
                        v[j] -= c * row[j]
        return v

    def __contains__(self, v):
        return is_zero(self.reduce(v))

    def add(self, v):
        """Add v; return True if it was independent of the current span."""
        r = self.reduce(v)
        for p in range(self.n):
            if r[p]:
                piv = r[p]
                self.rows.append((p, [x / piv for x in r]))
                self.originals.append(list(v))
                return True
        return False


def rank(vectors):
    if not vectors:
        return 0
    sp = Span(len(vectors[0]))
    for v in vectors:
        sp.add(v)
    return len(sp)


def solve_linear(A, b):
    """One exact solution x of A x = b, or None. A is a list of rows."""
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(x) for x in A[i]] + [Fraction(b[i])] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        piv = M[r][c]
        M[r] = [x / piv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if M[i][n]:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = M[i][n]
    return x


def combination(vectors, target):
    """Coefficients c with sum c_i vectors[i] == target, or None."""
    if not vectors:
        return [] if is_zero(target) else None
    n = len(target)
    A = [[vectors[k][i] for k in range(len(vectors))] for i in range(n)]
    return solve_linear(A, target)


def mat_vec(M, v):
    return [dot(row, v) for row in M]


def vec_mat(v, M):
    n = len(M[0]) if M else 0
    out = [Fraction(0)] * n
    for i, a in enumerate(v):
        if a:
            row = M[i]
            for j in range(n):
                if row[j]:
                    out[j] += a * row[j]
    return out


def mat_mul(A, B):
    return [vec_mat(row, B) for row in A]


# primes

def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes_from(start=2):
    n = max(start, 2)
    while True:
        if is_prime(n):
            yield n
        n += 1


# linear programming

class LinearProgram:
    """Variables are nonnegative unless listed in `free`.

    constraints: list of (coeffs: dict var -> rational, rel, rhs) with rel in
    '<=', '>=', '='. objective: dict var -> rational to maximize, or None.
    """

    def __init__(self, variables, constraints, objective=None, free=()):
        self.variables = list(variables)
        self.constraints = [(dict(c), rel, Fraction(rhs)) for c, rel, rhs in constraints]
        self.objective = dict(objective) if objective else None
        self.free = set(free)
        known = set(self.variables)
        for c, rel, _ in self.constraints:
            if rel not in ("<=", ">=", "="):
                raise ValueError(f"bad relation {rel!r}")
            for v in c:
                if v not in known:
                    raise ValueError(f"unknown variable {v!r}")


class LpResult:
    def __init__(self, status, point=None, optimum=None, iterations=0):
        self.status = status  # 'infeasible' | 'feasible' | 'unbounded'
        self.point = point
        self.optimum = optimum
        self.iterations = iterations

    @property
    def feasible(self):
        return self.status in ("feasible", "unbounded")

    def __repr__(self):
        return f"LpResult({self.status}, optimum={self.optimum})"


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.T = [r + [b] for r, b in zip(rows, rhs)]
        self.basis = basis
        self.iterations = 0

    def pivot(self, i, j):
        T = self.T
        row = T[i]
        piv = row[j]
        if piv != 1:
            row = [x / piv for x in row]
            T[i] = row
        nz = [k for k, x in enumerate(row) if x]
        for r in range(len(T)):
            if r != i:
                f = T[r][j]
                if f:
                    tr = T[r]
                    for k in nz:
                        tr[k] -= f * row[k]
        self.basis[i] = j
        self.iterations += 1

    def run(self, cost, allowed):
        """Maximize cost.x over allowed columns with Bland's rule."""
        T = self.T
        width = len(T[0]) - 1 if T else len(cost)
        while True:
            red = list(cost)
            for i, bv in enumerate(self.basis):
                cb = cost[bv]
                if cb:
                    row = T[i]
                    for k in range(width):
                        if row[k]:
                            red[k] -= cb * row[k]
            enter = next((j for j in range(width) if allowed[j] and red[j] > 0), None)
            if enter is None:
                return "optimal"
            best = None
            for i, row in enumerate(T):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], enter)

    def value(self, cost):
        return sum((cost[bv] * self.T[i][-1] for i, bv in enumerate(self.basis)), Fraction(0))


def solve_lp(lp):
    """Exact two-phase simplex with Bland's anti-cycling rule."""
    # column layout: user variables (free ones split), then slacks, then artificials
    cols = []
    colmap = {}
    for v in lp.variables:
        colmap[v] = [(len(cols), 1)]
        cols.append(v)
        if v in lp.free:
            colmap[v].append((len(cols), -1))
            cols.append(("neg", v))
    nuser = len(cols)
    rows, rhs, kinds = [], [], []
    for coeffs, rel, b in lp.constraints:
        row = [Fraction(0)] * nuser
        for v, a in coeffs.items():
            for k, sgn in colmap[v]:
                row[k] += sgn * Fraction(a)
        if b < 0:
            row = [-x for x in row]
            b = -b
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        rows.append(row)
        rhs.append(b)
        kinds.append(rel)
    m = len(rows)
    nslack = sum(1 for k in kinds if k != "=")
    nart = sum(1 for k in kinds if k != "<=")
    width = nuser + nslack + nart
    full = []
    basis = []
    si, ai = nuser, nuser + nslack
    for row, kind in zip(rows, kinds):
        ext = row + [Fraction(0)] * (nslack + nart)
        if kind == "<=":
            ext[si] = Fraction(1)
            basis.append(si)
            si += 1
        elif kind == ">=":
            ext[si] = Fraction(-1)
            si += 1
            ext[ai] = Fraction(1)
            basis.append(ai)
            ai += 1
        else:
            ext[ai] = Fraction(1)
            basis.append(ai)
            ai += 1
        full.append(ext)
    tab = _Tableau(full, rhs, basis)
    art = set(range(nuser + nslack, width))
    if art:
        cost1 = [Fraction(-1) if j in art else Fraction(0) for j in range(width)]
        tab.run(cost1, [True] * width)
        if tab.value(cost1) < 0:
            return LpResult("infeasible", iterations=tab.iterations)
        # drive artificials out of the basis
        i = 0
        while i < len(tab.T):
            if tab.basis[i] in art:
                j = next((j for j in range(nuser + nslack) if tab.T[i][j]), None)
                if j is None:
                    del tab.T[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, j)
            i += 1
    allowed = [j not in art for j in range(width)]
    cost2 = [Fraction(0)] * width
    if lp.objective:
        for v, a in lp.objective.items():
            for k, sgn in colmap[v]:
                cost2[k] += sgn * Fraction(a)
    status = tab.run(cost2, allowed)
    vals = [Fraction(0)] * width
    for i, bv in enumerate(tab.basis):
        vals[bv] = tab.T[i][-1]
    point = {}
    for v in lp.variables:
        point[v] = sum((sgn * vals[k] for k, sgn in colmap[v]), Fraction(0))
    if status == "unbounded":
        return LpResult("unbounded", point, None, tab.iterations)
    opt = tab.value(cost2) if lp.objective else None
    return LpResult("feasible", point, opt, tab.iterations)


def strictly_feasible(variables, constraints, strict, free=()):
    """Feasibility with the extra demand that every listed expression is > 0.

    strict: list of coeff dicts e (meaning e > 0). Maximizes an auxiliary
    variable bounded by every strict slack and by 1; accepted iff it is > 0.
    Returns (ok, point).
    """
    aux = ("__aux__",)
    cons = list(constraints)
    for e in strict:
        c = dict(e)
        c[aux] = c.get(aux, 0) - 1
        cons.append((c, ">=", 0))
    cons.append(({aux: 1}, "<=", 1))
    res = solve_lp(LinearProgram(list(variables) + [aux], cons, {aux: 1}, free))
    if res.status != "feasible" or res.optimum <= 0:
        return False, None
    point = dict(res.point)
    point.pop(aux)
    return True, point
