"""Text formats for models and reduction instances.

Model files:

    mdp                      (or: lmc)
    state s label a
      action m -> s1:1/2, s2:1/2
    ...
    query pb s t             (or: query tv mu {s:1} nu {t:1})

Weights are integers or num/den; decimals are rejected. Lines starting with
'#' are comments. In an lmc every state has exactly one action line.
"""
from dataclasses import dataclass
from fractions import Fraction
import re

from .exactmath import ParseError, fmt_rat, parse_rat
from .model import Lmc, Mdp, ModelError
from .reductions import NmfInstance, SetSplittingInstance, SubsetSumInstance

FORMAT_VERSION = 1

_ID = r"[^\s:,{}]+"


@dataclass
class ModelFile:
    kind: str          # 'mdp' or 'lmc'
    model: object      # Mdp or Lmc
    query: tuple = None
    version: int = FORMAT_VERSION

    @property
    def mdp(self):
        return self.model if self.kind == "mdp" else self.model.as_mdp()


def _err(lineno, msg):
    return ModelError(f"line {lineno}: {msg}")


def _parse_weights(text, lineno):
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(rf"({_ID})\s*:\s*(\S+)", part)
        if not m:
            raise _err(lineno, f"bad weight entry {part!r}")
        try:
            w = parse_rat(m.group(2))
        except ParseError as e:
            raise _err(lineno, str(e))
        if m.group(1) in out:
            raise _err(lineno, f"repeated target {m.group(1)}")
        out[m.group(1)] = w
    return out


def _parse_dist(text, lineno):
    m = re.fullmatch(r"\{(.*)\}", text.strip())
    if not m:
        raise _err(lineno, f"expected {{...}}, got {text!r}")
    return _parse_weights(m.group(1), lineno)


def parse_model(text):
    lines = [(i, ln.rstrip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ModelError("empty model file")
    i0, head = lines[0]
    parts = head.split()
    if parts[0] not in ("mdp", "lmc"):
        raise _err(i0, "header must be 'mdp' or 'lmc'")
    kind = parts[0]
    version = FORMAT_VERSION
    if len(parts) == 3 and parts[1] == "version":
        version = int(parts[2])
    elif len(parts) != 1:
        raise _err(i0, "bad header")
    if version != FORMAT_VERSION:
        raise _err(i0, f"unsupported format version {version}")
    label, trans, query = {}, {}, None
    cur = None
    for lineno, ln in lines[1:]:
        toks = ln.split()
        if toks[0] == "state":
            if len(toks) != 4 or toks[2] != "label":
                raise _err(lineno, "expected 'state <id> label <label>'")
            cur = toks[1]
            if cur in label:
                raise _err(lineno, f"duplicate state {cur}")
            label[cur] = toks[3]
            trans[cur] = {}
        elif toks[0] == "action":
            m = re.fullmatch(rf"\s*action\s+({_ID})\s*->\s*(.*)", ln)
            if not m or cur is None:
                raise _err(lineno, "expected '  action <name> -> <id>:<rat>, ...' under a state")
            name = m.group(1)
            if name in trans[cur]:
                raise _err(lineno, f"duplicate action {name} at {cur}")
            trans[cur][name] = _parse_weights(m.group(2), lineno)
        elif toks[0] == "query":
            if query is not None:
                raise _err(lineno, "more than one query")
            query = _parse_query(ln, lineno)
        else:
            raise _err(lineno, f"unexpected {toks[0]!r}")
    for s, acts in trans.items():
        for m, d in acts.items():
            for t in d:
                if t not in label:
                    raise ModelError(f"{s}/{m}: unknown target {t}")
    if kind == "lmc":
        for s, acts in trans.items():
            if len(acts) != 1:
                raise ModelError(f"lmc state {s} must have exactly one action line")
        model = Lmc(label, {s: next(iter(a.values())) for s, a in trans.items()})
    else:
        model = Mdp(label, trans)
    model.check()
    mf = ModelFile(kind, model, query, version)
    _check_query(mf)
    return mf


def _parse_query(ln, lineno):
    toks = ln.split()
    if len(toks) == 4 and toks[1] == "pb":
        return ("pb", toks[2], toks[3])
    m = re.fullmatch(r"\s*query\s+tv\s+mu\s+(\{[^}]*\})\s+nu\s+(\{[^}]*\})\s*", ln)
    if m:
        return ("tv", _parse_dist(m.group(1), lineno), _parse_dist(m.group(2), lineno))
    raise _err(lineno, "expected 'query pb <s> <t>' or 'query tv mu {..} nu {..}'")


def _check_query(mf):
    q = mf.query
    if q is None:
        return
    states = set(mf.model.states)
    if q[0] == "pb":
        for s in q[1:]:
            if s not in states:
                raise ModelError(f"query mentions unknown state {s}")
    else:
        for d in q[1:]:
            for s, p in d.items():
                if s not in states:
                    raise ModelError(f"query mentions unknown state {s}")
                if p < 0:
                    raise ModelError("negative mass in query distribution")
            if sum(d.values(), Fraction(0)) != 1:
                raise ModelError("query distribution does not sum to 1")


def _fmt_weights(d):
    return ", ".join(f"{t}:{fmt_rat(p)}" for t, p in sorted(d.items()))


def serialize(mf):
    out = [mf.kind]
    model = mf.model
    for s in model.states:
        out.append(f"state {s} label {model.label[s]}")
        if mf.kind == "lmc":
            out.append(f"  action tau -> {_fmt_weights(model.tau[s])}")
        else:
            for m in model.actions(s):
                out.append(f"  action {m} -> {_fmt_weights(model.phi(s, m))}")
    q = mf.query
    if q is not None:
        if q[0] == "pb":
            out.append(f"query pb {q[1]} {q[2]}")
        else:
            out.append("query tv mu {" + _fmt_weights(q[1]).replace(" ", "") + "} nu {"
                       + _fmt_weights(q[2]).replace(" ", "") + "}")
    return "\n".join(out) + "\n"


def model_file(mdp, query=None):
    return ModelFile("mdp", mdp, query)


# ------------------------------------------------------------ instances

def parse_instance(text):
    """Return (tag, instance). First non-comment line is the reduction tag."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ModelError("empty instance file")
    tag = lines[0]
    fields = {}
    rows = []
    for ln in lines[1:]:
        key, *vals = ln.split()
        if key in ("set", "row"):
            rows.append(vals)
        else:
            fields[key] = vals
    try:
        if tag == "subset-sum":
            return tag, SubsetSumInstance(tuple(int(v) for v in fields["values"]),
                                          int(fields["target"][0]))
        if tag == "set-splitting":
            return tag, SetSplittingInstance(tuple(fields["elements"]),
                                             tuple(tuple(r) for r in rows))
        if tag == "nmf":
            J = tuple(tuple(parse_rat(x) for x in r) for r in rows)
            return tag, NmfInstance(J, int(fields["rank"][0]))
    except (KeyError, IndexError, ValueError) as e:
        if isinstance(e, ModelError):
            raise
        raise ModelError(f"malformed {tag} instance: {e}")
    raise ModelError(f"unknown reduction {tag!r}")
