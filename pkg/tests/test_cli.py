import io as stdio
import json
import re
import subprocess
import sys

import pytest

from scatdiag.cli import main


@pytest.fixture
def run(tmp_path):
    store = str(tmp_path / "store.json")

    def _run(*argv, store_arg=True):
        out = stdio.StringIO()
        args = list(argv)
        if store_arg and args[0] not in ("init", "load"):
            args += ["--store", store]
        code = main(args, out=out)
        return code, out.getvalue()

    _run.store = store
    _run.tmp = tmp_path
    return _run


def test_init_case(run):
    code, out = run("init", "P2", "--order", "3")
    assert code == 0
    assert out.startswith("(9): 42 rays")


def test_init_named(run):
    code, out = run("init", "std", "3", "3")
    assert code == 0 and "1 + 3*t0*x + 3*t0^2*x^2 + t0^3*x^3" in out


def test_init_unknown(run, capsys):
    code, _ = run("init", "bogus")
    assert code == 2
    assert "usage:" in capsys.readouterr().err


def test_usage_errors(run):
    assert run("scatter", "std", "1")[0] == 2
    assert run("scatter", "P2")[0] == 2
    assert run("scatter", "P2", "x")[0] == 2
    assert main([]) == 2
    assert main(["frobnicate"]) == 2


def test_scatter_case_and_cache(run):
    code, out = run("scatter", "P2", "3", "--accelerate")
    assert code == 0
    table = dict(re.findall(r"^\s+(\d)\s+(\S+)$", out, re.M))
    assert table == {"1": "9", "2": "135/4", "3": "244"}
    assert "(1 + 9*y^3)^3" in out
    code, out = run("scatter", "P2", "3", "--accelerate")
    assert code == 0 and "cache hit" in out and "scattered" not in out


def test_scatter_named(run):
    for target in (["std11"], ["std", "1", "1"]):
        code, out = run("scatter", *target, "5")
        assert code == 0
        rays = out.strip().splitlines()[2:]
        assert len(rays) == 1 and "(1, 1)" in rays[0] and rays[0].endswith("1 + t0*t1*x*y")


def test_resume_named(run):
    run("scatter", "exp", "2", "3", "3")
    code, out = run("scatter", "exp", "2", "3", "5")
    assert code == 0 and "resuming" in out and "from cached order 3" in out


def test_corrupt_cache(run, capsys):
    run("scatter", "std11", "3")
    doc = json.load(open(run.store))
    doc["entries"][0]["diagram"]["rays"][0]["function"][0]["c"] = "7"
    with open(run.store, "w") as fh:
        json.dump(doc, fh)
    code, out = run("scatter", "std11", "3")
    assert code == 0 and "scattered" in out
    assert "corrupt" in capsys.readouterr().err


def test_show_with_classes(run):
    code, out = run("show", "P2", "1", "--accelerate")
    assert code == 0 and "[beta=1]" in out
    assert run("show", "(6)", "1", "--classes")[0] == 3


def test_tex(run):
    code, out = run("tex", "P2", "1", "--accelerate", "--clip", "-3", "-1", "3", "4")
    assert code == 0
    body = [l for l in out.splitlines() if l.startswith("\\draw")]
    assert body and all(re.match(r"^\\draw\[->,[^\]]+\] \([^)]+\) -- \([^)]+\);$", l) for l in body)
    code, out = run("tex", "P2", "1", "--accelerate", "--colors", "off")
    assert code == 0 and all("[->,black]" in l for l in out.splitlines() if "\\draw" in l)
    code, out = run("tex", "P2", "1", "--directions", "1,0", "0,1")
    assert code == 0
    assert run("tex", "P2", "1", "--clip", "0", "0", "0", "1")[0] == 3
    assert run("tex", "P2", "1", "--directions", "up")[0] == 2


def test_tropical(run):
    _, out = run("show", "P2", "1", "--accelerate")
    rid = next(l.split()[0] for l in out.splitlines() if "[beta=1]" in l)
    code, out = run("tropical", "P2", "1", "--accelerate", "--ray", rid[:7], "--tex")
    assert code == 0
    assert "Mult = 3" in out and "sum of multiplicities: 3" in out and "\\begin{tikzpicture}" in out
    assert run("tropical", "P2", "1", "--accelerate", "--ray", "zzzz")[0] == 3


def test_invariants(run):
    code, out = run("invariants", "P2", "3")
    assert code == 0
    assert dict(re.findall(r"^\s+(\d)\s+(\S+)$", out, re.M)) == {"1": "9", "2": "135/4",
                                                                   "3": "244"}
    code, out = run("invariants", "std11", "2")
    assert code == 2


def test_invariants_by_class(run):
    code, out = run("invariants", "(8'a)", "2", "--refined", "--classes")
    assert code == 0 and "L1+L2" in out


def test_save_load(run):
    a, b = run.tmp / "a.json", run.tmp / "b.json"
    assert run("save", "P2", "2", "--accelerate", "-o", str(a))[0] == 0
    code, out = run("load", str(a))
    assert code == 0 and out.startswith("(9):")
    assert run("scatter", str(a), "-o", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out = run("invariants", str(a))
    assert code == 0 and "135/4" in out
    code, _ = run("load", str(a), "--into-store", "--store", run.store, store_arg=False)
    assert code == 0


def test_load_errors(run):
    p = run.tmp / "bad.json"
    p.write_text("{}")
    assert run("load", str(p))[0] == 3
    assert run("load", str(run.tmp / "missing.json"))[0] == 3


def test_module_entry(tmp_path):
    env = {"SCATDIAG_STORE": str(tmp_path / "s.json"), "PATH": ""}
    r = subprocess.run([sys.executable, "-m", "scatdiag", "scatter", "std11", "3"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0 and "1 + t0*t1*x*y" in r.stdout
    r = subprocess.run([sys.executable, "-m", "scatdiag", "init", "nope"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 2
