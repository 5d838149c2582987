import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsmahler.exact import autocorrelation, correlation_sum, golay_defect
from rsmahler.poly import aperiodic_autocorrelation_exact, rudin_shapiro


def naive_autocorr(a):
    a = [int(x) for x in a]
    return [sum(a[j] * a[j + s] for j in range(len(a) - s)) for s in range(len(a))]


def test_hand_example():
    assert autocorrelation(np.array([1, 2, -3, 4])).tolist() == [30, -16, 5, 4]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-100, 100), min_size=1, max_size=40))
def test_matches_naive(a):
    assert autocorrelation(np.array(a)).tolist() == naive_autocorr(a)
    assert aperiodic_autocorrelation_exact(a) == naive_autocorr(a)


def test_rs_k1_pair():
    pair = rudin_shapiro(1)
    assert autocorrelation(pair.p.coeffs).tolist() == [2, 1]
    assert autocorrelation(pair.q.coeffs).tolist() == [2, -1]
    assert correlation_sum([pair.p.coeffs, pair.q.coeffs]).tolist() == [4, 0]


@pytest.mark.parametrize("k", [0, 3, 12, 20])
def test_golay(k):
    pair = rudin_shapiro(k)
    c, worst = golay_defect(pair.p.coeffs, pair.q.coeffs)
    assert c[0] == 2 ** (k + 1) and worst == 0 and not c[1:].any()


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        correlation_sum([np.ones(3), np.ones(4)])
