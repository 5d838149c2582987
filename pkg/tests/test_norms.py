import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from rsmahler.norms import (
    NormEstimate, compensated_sum, gamma_function, mahler_extrapolate, mahler_from_zeros,
    mahler_quadrature, mq_norm, sup_norm,
)
from rsmahler.constants import GAMMA_RS
from rsmahler.poly import SignedPoly, fekete, littlewood_from_code, littlewood_sample, rudin_shapiro
from rsmahler.zeros import find_zeros

# high-precision polynomial-root oracle values (40 digits, truncated)
ORACLE_M0 = {
    "P2": 1.8392867552141611326,
    "P6": 6.8505729309192798991,
    "f7": 1.8832035059135258642,
    "f13": 2.2567293046166784788,
}
# adaptive-quadrature oracle for M_q(P_4)
ORACLE_MQ_P4 = {1: 3.806092946584422787, 3: 4.1561335142872502667}


def rel(a, b):
    return abs(a - b) / abs(b)


def test_m2_littlewood_and_constant():
    for f in littlewood_sample(40, 5, 1):
        assert rel(mq_norm(f, 2).value, math.sqrt(41)) < 1e-10
    for q in (0.3, 1, 2, 7.5):
        assert mq_norm(SignedPoly([1]), q).value == pytest.approx(1.0, abs=1e-15)


def test_mq_against_quadrature_oracle():
    f = rudin_shapiro(4).p
    for q, v in ORACLE_MQ_P4.items():
        assert rel(mq_norm(f, q).value, v) < 1e-9


def test_mq_against_scipy_quad():
    f = fekete(11)
    c = f.coeffs.astype(float)
    g = lambda t: abs(np.polyval(c[::-1], np.exp(1j * t))) ** 1.5
    val, _ = integrate.quad(g, 0, 2 * np.pi, limit=400)
    ref = (val / (2 * np.pi)) ** (1 / 1.5)
    assert rel(mq_norm(f, 1.5).value, ref) < 1e-7


def test_m4_gap_shrinks():
    gaps = {k: abs(mq_norm(rudin_shapiro(k).p, 4).value / (4 ** (k + 1) / 3) ** 0.25 - 1) for k in (8, 12)}
    assert gaps[12] < gaps[8]


def test_mq_nonconvergence_is_flagged():
    est = mq_norm(SignedPoly([1, 1]), 0.01, tol=1e-15, n_cap=64)
    assert not est.converged


def test_mq_rejects_nonpositive_q():
    with pytest.raises(ValueError):
        mq_norm(SignedPoly([1, 1]), 0)


def test_refinement_log_invariants():
    est = mq_norm(rudin_shapiro(6).p, 1)
    assert est.refinement_log[-1][1] == est.value
    assert est.error_bracket >= abs(est.refinement_log[-1][1] - est.refinement_log[-2][1])
    d = NormEstimate(**{k: v for k, v in est.to_dict().items()})
    assert d.value == est.value and '"method": "grid_q"' in est.to_json()


def test_power_mean_monotone():
    f = rudin_shapiro(7).q
    qs = [0.25, 0.5, 1, 2, 3, 4, 8]
    vals = [mq_norm(f, q).value for q in qs]
    assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))
    assert mahler_quadrature(f).value <= vals[0] + 1e-9


def test_sup_norm_examples():
    e = sup_norm(SignedPoly([1, 1]))
    assert abs(e.value - 2) < 1e-9
    for k in (3, 8, 11):
        e = sup_norm(rudin_shapiro(k).p)
        n = 2 ** k
        assert math.sqrt(2 * GAMMA_RS * n) - 1e-9 <= e.value <= math.sqrt(2 * n) + 1e-9
        assert e.extra["lower"] <= e.extra["upper"]
    e = sup_norm(fekete(101))
    assert e.error_bracket < 1e-6 * e.value and e.converged


def test_sup_norm_brackets_dense_grid_max():
    for f in [fekete(31), next(littlewood_sample(50, 1, 9))]:
        e = sup_norm(f)
        N = 1 << 20
        dense = np.abs(np.fft.ifft(f.coeffs.astype(float), N) * N).max()
        assert e.extra["lower"] - 1e-12 <= dense + 1e-12
        assert dense <= e.extra["upper"] + 1e-9


def test_mahler_simple():
    assert abs(mahler_quadrature(SignedPoly([1, 1])).value - 1) < 1e-10
    assert abs(mahler_quadrature(SignedPoly([-2, 1])).value - 2) < 1e-10
    assert abs(mahler_from_zeros(SignedPoly([1, 1])).value - 1) < 1e-14
    assert abs(mahler_from_zeros(SignedPoly([-2, 1])).value - 2) < 1e-14


def test_mahler_against_root_oracle():
    cases = {"P2": rudin_shapiro(2).p, "P6": rudin_shapiro(6).p, "f7": fekete(7), "f13": fekete(13)}
    for name, f in cases.items():
        assert rel(mahler_quadrature(f).value, ORACLE_M0[name]) < 1e-8
        assert rel(mahler_from_zeros(f).value, ORACLE_M0[name]) < 1e-8
    assert rel(mahler_quadrature(fekete(7)).value, mahler_from_zeros(fekete(7)).value) < 1e-8


def test_mahler_fekete_shift_invariance():
    f = fekete(29)
    g = SignedPoly(f.coeffs[1:])  # f(z) / z
    assert rel(mahler_quadrature(f).value, mahler_quadrature(g).value) < 1e-10


def test_mahler_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        mahler_quadrature(SignedPoly([0]))


def test_extrapolation():
    assert mahler_extrapolate(SignedPoly([1])).value == pytest.approx(1.0, abs=1e-14)
    e = mahler_extrapolate(rudin_shapiro(6).p)
    assert rel(e.value, ORACLE_M0["P6"]) < 1e-3
    vals = e.extra["mq_values"]
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))
    assert e.error_bracket == pytest.approx(abs(e.value - vals[-1]))
    with pytest.raises(ValueError):
        mahler_extrapolate(SignedPoly([1, 1]), q_sequence=[1, 0.5, 0.001])
    with pytest.raises(ValueError):
        mahler_extrapolate(SignedPoly([1, 1]), q_sequence=[0.5, 1])


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 32).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2 ** (n + 1) - 1))))
def test_jensen_rederivation(nc):
    n, code = nc
    f = littlewood_from_code(code, n)
    a = mahler_quadrature(f).value
    zs = find_zeros(f)
    b = abs(zs.leading_coeff) * math.prod(max(1.0, abs(w)) for w in zs.roots)
    assert rel(a, b) < 1e-7


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 64).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2 ** (n + 1) - 1))))
def test_three_way_agreement(nc):
    n, code = nc
    f = littlewood_from_code(code, n)
    ests = [mahler_quadrature(f), mahler_from_zeros(f), mahler_extrapolate(f)]
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = ests[i], ests[j]
            lim = max(1e-6 * max(a.value, b.value), a.error_bracket + b.error_bracket)
            assert abs(a.value - b.value) <= lim


def test_gamma_function():
    assert gamma_function(2) == pytest.approx(1.0, rel=1e-14)
    assert gamma_function(1.5) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-13)
    assert gamma_function(1 + 2 / 2) ** (1 / 2) == pytest.approx(1.0, rel=1e-14)
    for x in np.linspace(0.01, 30, 301):
        ref = float(mpmath.gamma(mpmath.mpf(float(x))))
        assert abs(gamma_function(x) - ref) <= 1e-12 * ref


def test_compensated_sum():
    x = np.log(np.abs(np.random.default_rng(0).standard_normal(1 << 20)))
    exact = math.fsum(x.tolist())
    assert abs(compensated_sum(x) - exact) <= 1e-15 * np.abs(x).sum()
    assert compensated_sum(np.array([0.1] * 10)) == math.fsum([0.1] * 10)
