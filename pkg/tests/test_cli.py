import json
import os
import random
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from lmdp.cli import main
from lmdp.etr import enumerate_guesses
from lmdp.gallery import random_mdp
from lmdp.model import Lmc
from lmdp.modelio import ModelFile, model_file, parse_model, serialize

MODELS = os.path.join(os.path.dirname(__file__), "..", "models")


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_serialize_roundtrip(seed):
    rng = random.Random(seed)
    mdp = random_mdp(rng)
    s, t = mdp.states[0], mdp.states[-1]
    mf = model_file(mdp, ("pb", s, t))
    back = parse_model(serialize(mf))
    assert back.model.trans == mdp.trans and back.model.label == mdp.label
    assert back.query == mf.query
    assert serialize(back) == serialize(mf)


def test_lmc_roundtrip():
    lmc = Lmc({"x": "a", "y": "b"}, {"x": {"x": F(1, 3), "y": F(2, 3)}, "y": {"y": 1}})
    mf = ModelFile("lmc", lmc, ("tv", {"x": F(1)}, {"y": F(1)}))
    back = parse_model(serialize(mf))
    assert back.kind == "lmc" and back.model.tau == lmc.tau and back.query == mf.query


def test_run_figure(capsys):
    code = main(["run", "--problem", "PB=0", os.path.join(MODELS, "coin_split.txt"), "--oracle"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["answer"] == "yes" and out["evidence"]["sampled_agree"]
    assert "PB=0: yes" in out["summary"]


def test_decimal_rejected(tmp_path, capsys):
    path = _write(tmp_path, "m.txt", "mdp\nstate s label a\n  action m -> s:1.0\nquery pb s s\n")
    assert main(["run", "--problem", "PB>0", path]) == 2
    assert "model error" in capsys.readouterr().err


def test_bad_sum_and_usage(tmp_path):
    path = _write(tmp_path, "m.txt", "mdp\nstate s label a\n  action m -> s:5/6\nquery pb s s\n")
    assert main(["run", "--problem", "PB>0", path]) == 2
    assert main(["run", path]) == 2
    assert main(["parse", str(tmp_path / "missing.txt")]) == 2


def test_guard_exit(tmp_path):
    lines = ["mdp"]
    for i in range(8):
        lines.append(f"state x{i} label a")
        for j in (1, 2):
            lines.append(f"  action m{j} -> x{(i + j) % 8}:1")
    lines.append("query tv mu {x0:1} nu {x1:1}")
    path = _write(tmp_path, "g.txt", "\n".join(lines) + "\n")
    assert main(["run", "--problem", "TV=0*", path, "--guard", "8"]) == 3


def test_generate_subset_sum(tmp_path, capsys):
    path = _write(tmp_path, "i.txt", "subset-sum\nvalues 1 2 3\ntarget 3\n")
    assert main(["generate", "subset-sum", path]) == 0
    text = capsys.readouterr().out
    assert "t1:1/2, t2:1/2" in text
    assert parse_model(text).query == ("pb", "s", "t")
    assert main(["generate", "nmf", path]) == 2


def test_emit_dir(tmp_path, capsys):
    text = ("mdp\nstate x label a\n  action m -> x:1\n  action n -> y:1\n"
            "state y label a\n  action m -> y:1/2, z:1/2\nstate z label b\n  action m -> z:1\n"
            "query tv mu {x:1} nu {y:1}\n")
    path = _write(tmp_path, "m.txt", text)
    out = tmp_path / "smt"
    for tag in ("TV=0*", "TV<1*"):
        assert main(["run", "--problem", tag, path, "--emit-dir", str(out / tag)]) == 0
        doc = json.loads(capsys.readouterr().out)
        mf = parse_model(text)
        n = len(enumerate_guesses(tag, mf.mdp, mf.query[1], mf.query[2]))
        files = os.listdir(out / tag)
        assert len(files) == n == len(doc["evidence"]["formulas"])
        first = (out / tag / sorted(files)[0]).read_text()
        assert first.startswith("; problem=") and "(check-sat)" in first
