import csv
import io
import json
import subprocess
import sys

import pytest

from kneser_density.cli import run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


def test_density_json():
    code, out = call("density", "--group", "pgl2", "--q", "9", "--deterministic")
    assert code == 0
    d = json.loads(out)
    assert d["rho"] == "3/1" and d["status"] == "exact" and "timings" not in d


def test_deterministic_output_is_byte_identical():
    a = call("density", "--group", "pgl2", "--q", "8", "--deterministic")[1]
    b = call("density", "--group", "pgl2", "--q", "8", "--deterministic", "--threads", "4")[1]
    assert a == b


@pytest.mark.parametrize("fmt", ["csv", "markdown"])
def test_formats(fmt):
    code, out = call("density", "--group", "pgl2", "--q", "8", "--format", fmt)
    assert code == 0
    if fmt == "csv":
        row = next(csv.DictReader(io.StringIO(out)))
        assert row["rho"] == "4/3"
    else:
        assert out.startswith("| case |")


def test_usage_errors():
    assert call("density", "--group", "psl2", "--q", "9")[0] == 2  # intransitive
    assert call("density", "--group", "psl-sigma", "--q", "27")[0] == 2
    assert call("density", "--group", "pgl2", "--q", "6")[0] == 2
    assert call("density", "--group", "pgl2")[0] == 2
    assert call("density")[0] == 2
    assert call("bounds", "--group", "pgl2", "--q", "5", "--method", "exact")[0] == 2
    assert call("nonsense")[0] == 2
    assert call("array", "--catalog", "missing")[0] == 2
    assert call("verify", "--case", "missing")[0] == 2


def test_orbit_flag_and_clique():
    code, out = call("orbits", "--group", "psl2", "--q", "9")
    d = json.loads(out)
    assert [o["size"] for o in d["orbits"]] == [60, 60]
    assert {o["triple_sign"] for o in d["orbits"]} == {"square", "nonsquare"}
    code, out = call("clique", "--group", "psl2", "--q", "9", "--orbit", "0", "--deterministic")
    d = json.loads(out)
    assert code == 0 and d["size"] == 15 and d["rho_lower"] == "5/2"


def test_bounds_output():
    code, out = call("bounds", "--group", "pgl2", "--q", "16", "--deterministic")
    d = json.loads(out)
    assert code == 0 and d["best"]["floor"] == 48
    assert {b["method"] for b in d["bounds"]} == {"ratio", "lp", "ratio_weighted"}


def test_build_roundtrip(tmp_path):
    path = tmp_path / "g.json"
    code, out = call("build", "--group", "pgl2", "--q", "7", "--output", str(path))
    assert code == 0 and json.loads(out)["order"] == 336
    code, out = call("density", "--group-file", str(path), "--deterministic")
    assert code == 0 and json.loads(out)["rho"] == "1/1"
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x", "degree": 3}')
    assert call("density", "--group-file", str(bad))[0] == 2


def test_verify_and_array():
    code, out = call("verify", "--list", "--format", "csv")
    assert code == 0 and "qeven-8" in out
    code, out = call("verify", "--case", "qeven-4", "--deterministic")
    assert code == 0 and json.loads(out)["passed"]
    code, out = call("array", "--catalog", "K10_3", "--format", "markdown")
    assert code == 0 and "[1†, 3]" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "kneser_density", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "0.1.0" in r.stdout
