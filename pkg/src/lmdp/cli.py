"""Command line front end.

    lmdp run --problem PB>0 model.txt
    lmdp generate subset-sum instance.txt
    lmdp parse model.txt

Exit codes: 0 decision completed, 2 usage or model error, 3 guard exceeded.
"""
import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import bisim, distance, etr, trace
from .model import GuardExceeded, ModelError, induce
from .modelio import model_file, parse_instance, parse_model, serialize
from .reductions import build

PB_TAGS = ("PB>0", "PB=0", "PB=1", "PB<1")
TV_TAGS = ("TV>0", "TV=0*", "TV<1*", "TV=1*")


def decide(mf, problem, guard=4096, emit_dir=None, oracle=False, seed=0):
    """Run a problem on a parsed model file and return a Verdict."""
    mdp = mf.mdp
    q = mf.query
    if q is None:
        raise ModelError("model file has no query line")
    if problem in PB_TAGS and q[0] != "pb":
        raise ModelError(f"{problem} needs a 'query pb' line")
    if problem in TV_TAGS and q[0] != "tv":
        raise ModelError(f"{problem} needs a 'query tv' line")
    a, b = q[1], q[2]
    if problem == "TV>0":
        v = trace.tv_gt0(mdp, a, b)
        if oracle:
            ok, _, _ = trace.brute_oracle_tv_gt0(mdp, a, b, guard)
            v.evidence["oracle_agrees"] = ok == v.yes
    elif problem == "PB>0":
        v = bisim.pb_gt0(mdp, a, b)
    elif problem == "PB=0":
        v = distance.pb_eq0(mdp, a, b, guard)
    elif problem == "PB=1":
        v = distance.pb_eq1(mdp, a, b, guard)
    elif problem == "PB<1":
        v = distance.pb_lt1(mdp, a, b, guard)
    elif problem in TV_TAGS:
        v = distance.md_underapprox(mdp, problem, a, b, guard)
        if emit_dir:
            os.makedirs(emit_dir, exist_ok=True)
            forms = etr.enumerate_guesses(problem, mdp, a, b, guard)
            names = []
            for i, f in enumerate(forms):
                name = f"{problem.rstrip('*').replace('=', 'eq').replace('<', 'lt')}_{i:04d}.smt2"
                with open(os.path.join(emit_dir, name), "w") as fh:
                    fh.write(f.to_smtlib())
                names.append(name)
            v.evidence["formulas"] = names
    else:
        raise ModelError(f"unknown problem {problem!r}")
    if oracle and problem in PB_TAGS:
        v.evidence["md_screen"] = distance.md_underapprox(mdp, problem, a, b, guard).answer
        v.evidence["sampled_agree"] = _sample_check(mdp, problem, a, b, v, seed)
    return v


def _random_strategy(mdp, rng):
    out = {}
    for s in mdp.states:
        ws = [rng.randint(1, 9) for _ in mdp.actions(s)]
        tot = sum(ws)
        out[s] = {m: Fraction(w, tot) for m, w in zip(mdp.actions(s), ws)}
    return out


def _sample_check(mdp, problem, s, t, verdict, seed, n=20):
    """One-sided consistency: a 'no' must not be contradicted by samples."""
    rng = random.Random(seed)
    for _ in range(n):
        lmc = induce(mdp, _random_strategy(mdp, rng))
        bis = bisim.lmc_bisimilar(lmc, s, t)
        eq1 = distance.lmc_pb_eq1(lmc, s, t)
        hit = {"PB>0": not bis, "PB=0": bis, "PB=1": eq1, "PB<1": not eq1}[problem]
        if hit and verdict.answer == "no":
            return False
    return True


def summary(v):
    line = f"{v.problem}: {v.answer}"
    if v.word is not None:
        line += f" (word {' '.join(v.word) or 'eps'})"
    if v.strategy is not None:
        rand = [s for s, d in v.strategy.items() if len([p for p in d.values() if p]) > 1]
        line += f"; strategy randomizes at {', '.join(rand)}" if rand else "; MD strategy"
    return line


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def main(argv=None):
    ap = argparse.ArgumentParser(prog="lmdp", description="Qualitative distance problems on labelled MDPs")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="decide a problem for the query in a model file")
    r.add_argument("model")
    r.add_argument("--problem", required=True, choices=PB_TAGS + TV_TAGS)
    r.add_argument("--guard", type=int, default=4096)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--emit-dir")
    r.add_argument("--oracle", action="store_true")
    g = sub.add_parser("generate", help="build the MDP of a reduction instance")
    g.add_argument("tag", choices=("subset-sum", "set-splitting", "nmf"))
    g.add_argument("instance")
    g.add_argument("-o", "--output")
    p = sub.add_parser("parse", help="validate a model file and print it canonically")
    p.add_argument("model")
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.cmd == "run":
            mf = parse_model(_read(args.model))
            v = decide(mf, args.problem, args.guard, args.emit_dir, args.oracle, args.seed)
            doc = v.to_json()
            doc["summary"] = summary(v)
            print(json.dumps(doc, indent=2))
            return 0
        if args.cmd == "generate":
            tag, inst = parse_instance(_read(args.instance))
            if tag != args.tag:
                raise ModelError(f"instance is {tag!r}, not {args.tag!r}")
            mdp, query = build(tag, inst)
            text = serialize(model_file(mdp, query))
            if args.output:
                with open(args.output, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 0
        if args.cmd == "parse":
            sys.stdout.write(serialize(parse_model(_read(args.model))))
            return 0
    except GuardExceeded as e:
        print(json.dumps({"error": "guard exceeded", "detail": str(e)}), file=sys.stderr)
        return 3
    except (ModelError, OSError, ValueError) as e:
        print(json.dumps({"error": "model error", "detail": str(e)}), file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
