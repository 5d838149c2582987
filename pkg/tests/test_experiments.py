import csv
import io
import json
import math

import mpmath
import numpy as np
import pytest

from rsmahler.constants import E_NEG_HALF_GAMMA, EULER_GAMMA, GAMMA_RS, SQRT_2_OVER_E
from rsmahler.experiments import (
    CSV_COLUMNS, SweepRow, fekete_experiments, littlewood_average, mq_reference,
    primes_between, rows_to_csv, rows_to_json, saffari_mq_reference, sweep_rs_mahler,
    sweep_rs_mq, symmetry_orbits,
)
from rsmahler.norms import mahler_quadrature
from rsmahler.poly import ResourceLimitError, littlewood_enumerate


def test_constants_recomputed():
    mpmath.mp.dps = 30
    assert SQRT_2_OVER_E == float(mpmath.sqrt(2 / mpmath.e))
    assert abs(SQRT_2_OVER_E - math.sqrt(2 / math.exp(1))) < 1e-15
    assert EULER_GAMMA == float(mpmath.euler)
    assert E_NEG_HALF_GAMMA == float(mpmath.exp(-mpmath.euler / 2))
    assert GAMMA_RS == float((2 - mpmath.sqrt(2)) / 4)
    assert f"{SQRT_2_OVER_E:.10f}" == "0.8577638850"


def test_row_gap_invariant():
    r = SweepRow("RS", 3, "x", 0.9, SQRT_2_OVER_E)
    assert abs(r.gap - (r.value - r.reference)) <= 1e-15


def test_rs_mahler_sweep_methods_agree():
    quad = sweep_rs_mahler(2, 8, "quad")
    zer = sweep_rs_mahler(2, 8, "zeros")
    for a, b in zip(quad, zer):
        assert a.reference == pytest.approx(0.857763884961, abs=1e-12)
        assert abs(a.value - b.value) <= a.bracket + b.bracket + 1e-6 * a.value
    with pytest.raises(ResourceLimitError):
        sweep_rs_mahler(10, 13, "zeros")


def test_rs_mq_references():
    rows = sweep_rs_mq(3, 6, [2.0, 4.0])
    for r in rows:
        if r.quantity.startswith("M2_"):
            assert r.reference == pytest.approx(2 ** -0.5)
            assert r.value == pytest.approx(2 ** -0.5, rel=1e-12)
        else:
            assert r.reference == pytest.approx(3 ** -0.25)
            k = r.parameter
            assert r.reference * 2 ** ((k + 1) / 2) == pytest.approx((4 ** (k + 1) / 3) ** 0.25)
    assert saffari_mq_reference(1.0) == pytest.approx(2 / 3)


def test_symmetry_orbits_cover():
    for n in (1, 4, 9):
        reps, sizes = symmetry_orbits(n)
        assert sizes.sum() == 2 ** (n + 1)
        assert set(sizes.tolist()) <= {1, 2, 4}


def test_littlewood_average_exact_cases():
    assert littlewood_average(1).value == pytest.approx(1.0, abs=1e-12)
    direct = np.mean([mahler_quadrature(f, tol=1e-12).value for f in littlewood_enumerate(6)]) / math.sqrt(6)
    assert littlewood_average(6).value == pytest.approx(direct, rel=1e-9)
    r = littlewood_average(4)
    assert r.reference == pytest.approx(0.749306, abs=1e-6)


def test_littlewood_average_q_positive():
    r = littlewood_average(7, q=2)
    assert r.value == pytest.approx(math.sqrt(8 / 7), rel=1e-10)
    assert r.reference == pytest.approx(1.0)
    assert mq_reference(1.0) == pytest.approx(math.sqrt(math.pi) / 2)


def test_littlewood_montecarlo_vs_exhaustive():
    ex = littlewood_average(8)
    mc = littlewood_average(8, mode="montecarlo", count=2048, seed=5)
    assert mc.bracket > 0
    assert abs(mc.value - ex.value) <= mc.bracket
    with pytest.raises(ResourceLimitError):
        littlewood_average(17)


def test_fekete_rows():
    rows = fekete_experiments([3, 5])
    m0 = [r for r in rows if r.quantity == "M0_over_sqrt_p"]
    assert m0[0].value == pytest.approx(1 / math.sqrt(3), rel=1e-10)
    assert m0[0].flag is True
    assert all(math.isnan(r.reference) for r in rows)
    with pytest.raises(ValueError):
        fekete_experiments([9])
    assert primes_between(100, 130) == [101, 103, 107, 109, 113, 127]


def test_exports_deterministic():
    rows = sweep_rs_mq(4, 5, [1.0])
    text = rows_to_csv(rows, timing=False)
    parsed = list(csv.reader(io.StringIO(text)))
    assert tuple(parsed[0]) == CSV_COLUMNS
    assert all(r[-1] == "" for r in parsed[1:])
    assert text == rows_to_csv(sweep_rs_mq(4, 5, [1.0]), timing=False)
    assert "\r" not in text
    d = json.loads(rows_to_json(fekete_experiments([7]), timing=False))
    assert d[0]["reference"] == "nan"
