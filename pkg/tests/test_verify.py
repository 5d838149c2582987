import csv
import io
import json
import math

import numpy as np
import pytest

from rsmahler.constants import GAMMA_RS
from rsmahler.poly import SignedPoly, rudin_shapiro
from rsmahler.verify import (
    CHECK_NAMES, check_bernstein_szego, check_grid_lower_bound, check_parallelogram_exact,
    check_q_symmetry, check_rn_derivative_bound, check_zero_annulus, check_zero_counting,
    check_zero_separation, rollup_csv, run_all,
)


def test_passed_matches_margin():
    for r in run_all(6):
        assert r.passed == (r.worst_margin >= -r.params["tolerance"])


@pytest.mark.parametrize("k", [0, 1, 7, 20])
def test_parallelogram_exact(k):
    r = check_parallelogram_exact(k)
    assert r.passed and r.worst_margin == 0.0 and r.params["zero_shift"] == 2 ** (k + 1)


@pytest.mark.parametrize("k", [3, 10])
def test_parallelogram_detects_every_single_flip(k):
    pair = rudin_shapiro(k)
    n = pair.n
    positions = range(n) if n <= 8 else np.random.default_rng(k).choice(n, 40, replace=False)
    for which in ("p", "q"):
        for j in positions:
            c = (pair.p if which == "p" else pair.q).coeffs.copy()
            c[j] = -c[j]
            bad = SignedPoly(c)
            p, q = (bad, pair.q) if which == "p" else (pair.p, bad)
            assert not check_parallelogram_exact(k, p=p, q=q).passed


def test_parallelogram_cap():
    with pytest.raises(ValueError):
        check_parallelogram_exact(23)


def test_q_symmetry():
    r = check_q_symmetry(2, 16)
    assert r.passed and r.params["max_deviation"] < 1e-12
    assert check_q_symmetry(1, 4).passed
    assert check_q_symmetry(14, 1 << 17).passed
    with pytest.raises(ValueError):
        check_q_symmetry(4, 16)


def test_grid_lower_bound():
    r = check_grid_lower_bound(1)
    # grid {1, -1}: R(0) = 4, R(pi) = 0; margin = (4 - 4 gamma) / 4
    assert r.worst_margin == pytest.approx((4 - 4 * GAMMA_RS) / 4)
    assert check_grid_lower_bound(10).worst_margin > 0
    assert GAMMA_RS == pytest.approx(math.sin(math.pi / 8) ** 2, abs=1e-17)


def test_bernstein_szego():
    assert check_bernstein_szego(0, 8, SignedPoly([1])).worst_margin == pytest.approx(1.0)
    assert check_bernstein_szego(6, 8 << 6).worst_margin >= 0
    assert check_bernstein_szego(12, 1 << 17).passed
    with pytest.raises(ValueError):
        check_bernstein_szego(6, 128)


def test_rn_derivative_bound():
    t = np.linspace(0, 2 * np.pi, 10001)
    lhs = np.abs(-2 * np.sin(t))
    rhs = 2 ** 1.5 * np.sqrt(2 * (2 + 2 * np.cos(t)))
    assert np.all(lhs <= rhs + 1e-12)
    for k in (1, 8, 14):
        assert check_rn_derivative_bound(k, 8 << k).passed


def test_zero_annulus():
    r0 = check_zero_annulus(0)
    assert r0.passed and r0.worst_margin == math.inf
    r2 = check_zero_annulus(2)
    roots = np.roots([-1, 1, 1, 1])
    assert r2.worst_margin == pytest.approx(np.min(np.minimum(np.abs(roots) - 0.5, 2 - np.abs(roots))), abs=1e-12)
    assert check_zero_annulus(8).params["roots"] == 255
    with pytest.raises(ValueError):
        check_zero_annulus(13)


def test_zero_separation():
    assert check_zero_separation(2).params["c8_hat"] > 0
    c6 = check_zero_separation(6).params["c8_hat"]
    c10 = check_zero_separation(10).params["c8_hat"]
    assert c6 / 4 <= c10 <= 4 * c6


def test_zero_counting():
    for k in (4, 8):
        n = 2 ** k
        r = check_zero_counting(k, [4.0])
        assert r.params["c1_hat"] == pytest.approx((n - 1) / (4 * n + 1))
        assert r.params["c1_hat"] < 0.25
    assert math.isfinite(check_zero_counting(8, [1 / 256]).params["c1_hat"])
    c = [check_zero_counting(k, [4 / 2 ** k]).params["c1_hat"] for k in (6, 8, 10)]
    assert max(c) <= 2 * min(c)


def test_rollup_and_json():
    reps = run_all(13)
    text = rollup_csv(13, reps)
    rows = list(csv.reader(io.StringIO(text)))
    assert [r[0] for r in rows[1:]] == list(CHECK_NAMES)
    assert {r[2] for r in rows[1:] if r[0].startswith("zero_")} == {"skipped"}
    d = json.loads(check_zero_annulus(0).to_json())
    assert d["worst_margin"] == "inf"
