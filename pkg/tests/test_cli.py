import csv
import io
import json
import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from rsmahler.cli import main
from rsmahler.poly import rudin_shapiro, to_signs


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_rs(capsys):
    code, out, _ = run(capsys, "gen", "rs", "--k", "3")
    p, q = out.split()
    pair = rudin_shapiro(3)
    assert code == 0 and p == to_signs(pair.p) and q == to_signs(pair.q) and len(p) == 8


def test_gen_fekete_and_symbolic(capsys):
    assert run(capsys, "gen", "fekete", "--p", "5")[1] == "0+--+\n"
    assert run(capsys, "gen", "rs", "--k", "2", "--symbolic")[1] == "RS k=2 which=P\nRS k=2 which=Q\n"


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "gen", "rs", "--k", "-1")[0] == 2
    assert run(capsys, "gen", "fekete", "--p", "9")[0] == 2
    assert run(capsys, "norm", "--rs-k", "3", "--kind", "mq")[0] == 2
    assert run(capsys, "dist", "saffari", "--k", "4", "--N", "64")[0] == 2
    assert run(capsys, "verify", "--k", "3", "--check", "nonsense")[0] == 2


def test_norm(capsys):
    code, out, _ = run(capsys, "norm", "--rs-k", "5", "--kind", "m2")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(2 ** 2.5, rel=1e-12)
    assert json.loads(run(capsys, "norm", "--lit", "+-", "--kind", "mahler")[1])["value"] == pytest.approx(1.0, abs=1e-10)
    a = json.loads(run(capsys, "norm", "--fekete-p", "7", "--kind", "mahler", "--method", "zeros")[1])["value"]
    b = json.loads(run(capsys, "norm", "--fekete-p", "7", "--kind", "mahler", "--method", "quad")[1])["value"]
    assert abs(a - b) <= 1e-8
    e = json.loads(run(capsys, "norm", "--rs-k", "4", "--kind", "mahler", "--method", "extrap")[1])
    assert e["method"] == "mahler_extrap"
    s = json.loads(run(capsys, "norm", "--poly", "RS k=3 which=Q", "--kind", "sup")[1])
    assert s["method"] == "sup_certified"


def test_norm_nonconvergence_exit_1(capsys):
    assert run(capsys, "norm", "--lit", "++", "--kind", "mq", "--q", "0.01", "--tol", "1e-300")[0] == 1


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--k", "8", "--check", "parallelogram")
    assert code == 0 and "parallelogram_exact,8,pass" in out
    code, out, _ = run(capsys, "verify", "--k", "8", "--check", "all")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    code, out, _ = run(capsys, "verify", "--k", "5", "--check", "q_symmetry", "--format", "json")
    assert json.loads(out)[0]["passed"] is True


def test_verify_piped_mutation(tmp_path):
    env = dict(os.environ, RSMAHLER_CACHE_DIR=str(tmp_path / "c"))
    pair = rudin_shapiro(5)
    good = to_signs(pair.p) + "\n" + to_signs(pair.q) + "\n"
    bad = ("-" if good[0] == "+" else "+") + good[1:]
    cmd = [sys.executable, "-m", "rsmahler.cli", "verify", "--check", "parallelogram", "--input", "-"]
    assert subprocess.run(cmd, input=good, text=True, capture_output=True, env=env).returncode == 0
    r = subprocess.run(cmd, input=bad, text=True, capture_output=True, env=env)
    assert r.returncode == 1 and ",fail," in r.stdout


def test_dist(capsys, tmp_path):
    svg = tmp_path / "h.svg"
    code, out, _ = run(capsys, "dist", "saffari", "--k", "4", "--svg", str(svg))
    d = json.loads(out)
    assert code == 0 and sum(d["bins"]["masses"]) == pytest.approx(1.0, abs=1e-12)
    assert ET.parse(svg).getroot().tag.endswith("svg")
    ks12 = json.loads(run(capsys, "dist", "saffari", "--k", "12")[1])["statistic"]
    assert ks12 < d["statistic"]
    code, out, _ = run(capsys, "dist", "montgomery", "--k", "5", "--format", "csv", "--svg", str(tmp_path / "m.svg"))
    assert out.startswith("bin_lo,bin_hi,mass,limit_mass\n")
    ET.parse(tmp_path / "m.svg")


def test_sweep_rs_mahler_rows_and_cache(capsys, tmp_path):
    out1 = tmp_path / "a.csv"
    code, _, err = run(capsys, "sweep", "rs-mahler", "--k", "6..14", "--out", str(out1),
                       "--svg", str(tmp_path / "a.svg"))
    rows = list(csv.DictReader(open(out1, newline="")))
    assert code == 0 and len(rows) == 9
    assert all(abs(float(r["reference"]) - 0.8577638850) < 1e-10 for r in rows)
    manifest = json.loads(open(str(out1) + ".manifest.json").read())
    assert manifest["cache_hit"] is False and manifest["config"]["name"] == "rs-mahler"
    ET.parse(tmp_path / "a.svg")
    out2 = tmp_path / "b.csv"
    code, _, err = run(capsys, "sweep", "rs-mahler", "--k", "6..14", "--out", str(out2))
    assert "cache hit" in err
    assert open(out1, "rb").read() == open(out2, "rb").read()
    assert json.loads(open(str(out2) + ".manifest.json").read())["cache_hit"] is True


def test_cache_corruption_recomputes(capsys, tmp_path):
    cache = tmp_path / "cache"
    args = ["sweep", "rs-mq", "--k", "3..4", "--q", "1", "--cache-dir", str(cache)]
    first = run(capsys, *args)[1]
    for f in cache.glob("*.json"):
        if not f.name.endswith("manifest.json"):
            f.write_text(f.read_text().replace("M1_over", "XX_over"))
    code, out, err = run(capsys, *args)
    assert "cache hit" not in err and out == first


def test_sweep_lit_avg(capsys):
    code, out, _ = run(capsys, "sweep", "lit-avg", "--n", "10", "--mode", "exhaustive")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1 and rows[0]["family"] == "LIT_AVG"


def test_determinism_without_cache(capsys):
    a = run(capsys, "sweep", "lit-avg", "--n", "6", "--mode", "montecarlo", "--count", "300",
            "--seed", "4", "--no-cache")[1]
    b = run(capsys, "sweep", "lit-avg", "--n", "6", "--mode", "montecarlo", "--count", "300",
            "--seed", "4", "--no-cache")[1]
    assert a == b
