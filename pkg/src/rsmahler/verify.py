"""Executable checkers for the Rudin-Shapiro identities and inequalities.

Every checker returns a :class:`CheckReport` whose ``worst_margin`` is
normalized to an order-one scale (positive = slack, negative =
violation).  Only :func:`check_parallelogram_exact` is exact; all other
margins are floating point.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .constants import GAMMA_RS, ZERO_COUNT_C2
from .evaluation import check_grid, eval_circle, rn_derivative_samples
from .exact import golay_defect
from .norms import sup_norm
from .poly import RSPair, SignedPoly, as_coeffs, coerce_poly, rudin_shapiro
from .zeros import find_zeros

FLOAT_TOL = 1e-9
MAX_EXACT_ORDER = 22
MAX_ZERO_ORDER = 12


@dataclass
class CheckReport:
    check_name: str
    k: int
    passed: bool
    worst_margin: float
    worst_location: Optional[int] = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            if isinstance(v, (np.floating, np.integer)):
                return clean(v.item())
            return v

        return {
            "check_name": self.check_name,
            "k": self.k,
            "passed": self.passed,
            "worst_margin": clean(float(self.worst_margin)),
            "worst_location": self.worst_location,
            "params": {key: clean(v) for key, v in self.params.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _report(name: str, k: int, margin: float, loc, tol: float, **params) -> CheckReport:
    params["tolerance"] = tol
    return CheckReport(name, k, bool(margin >= -tol), float(margin),
                       None if loc is None else int(loc), params)


def _pair(k: int, pair: Optional[RSPair]) -> RSPair:
    return pair if pair is not None else rudin_shapiro(k)


# ---------------------------------------------------------------------------
# identities

def check_parallelogram_exact(k: int, pair: Optional[RSPair] = None,
                              p=None, q=None) -> CheckReport:
    """Golay complementarity of ``(P_k, Q_k)`` in exact integer arithmetic.

    ``p``/``q`` may override the pair (e.g. a deliberately mutated copy).
    """
    if k > MAX_EXACT_ORDER:
        raise ValueError(f"k={k} exceeds the exact-check cap {MAX_EXACT_ORDER}")
    if p is None or q is None:
        rs = _pair(k, pair)
        p, q = rs.p, rs.q
    a, b = as_coeffs(p), as_coeffs(q)
    n = 1 << k
    if len(a) != n or len(b) != n:
        return _report("parallelogram_exact", k, -1.0, None, 0.0,
                       reason="length mismatch", exact_zero_shift=None)
    c, worst = golay_defect(a, b)
    target = 2 * n
    defect = max(abs(int(c[0]) - target), int(np.abs(c[1:]).max(initial=0)))
    loc = worst if worst else (0 if c[0] != target else None)
    margin = 0.0 if defect == 0 else -defect / target
    return _report("parallelogram_exact", k, margin, loc, 0.0,
                   zero_shift=int(c[0]), expected=target, max_defect=defect)


def check_q_symmetry(k: int, N: int) -> CheckReport:
    """``|Q_k(z)| = |P_k(-z)|`` sampled on an even grid (``-z_j = z_{j+N/2}``)."""
    n = 1 << k
    N = int(N)
    if N % 2 or N < 2 * n:
        raise ValueError(f"N must be even and at least 2^(k+1) = {2 * n}")
    rs = rudin_shapiro(k)
    P = np.abs(eval_circle(rs.p, N).values)
    Q = np.abs(eval_circle(rs.q, N).values)
    dev = np.abs(Q - np.roll(P, -N // 2))
    j = int(np.argmax(dev))
    scale = math.sqrt(2 * n)
    margin = FLOAT_TOL - float(dev[j]) / scale
    return _report("q_symmetry", k, margin, j, 0.0, N=N, max_deviation=float(dev[j]),
                   relative_tolerance=FLOAT_TOL)


# ---------------------------------------------------------------------------
# grid and derivative inequalities

def _r_on_grid(f, N: int) -> np.ndarray:
    v = eval_circle(f, N).values
    return v.real ** 2 + v.imag ** 2


def check_grid_lower_bound(k: int) -> CheckReport:
    """Each even gridpoint of the ``n``-point grid or one of its neighbours has ``R >= 2*gamma*n``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    n = 1 << k
    R = _r_on_grid(rudin_shapiro(k).p, n)
    even = np.arange(0, n, 2)
    thr = 2 * GAMMA_RS * n
    fwd = np.maximum(R[even], R[(even + 1) % n])
    bwd = np.maximum(R[even], R[(even - 1) % n])
    m = np.minimum(fwd, bwd)
    i = int(np.argmin(m))
    margin = (float(m[i]) - thr) / (2 * n)
    return _report("grid_lower_bound", k, margin, even[i], FLOAT_TOL, gamma=GAMMA_RS,
                   threshold=thr)


def _resolve(k: int, f):
    if f is None:
        return rudin_shapiro(k).p, 1 << k
    f = coerce_poly(f)
    return f, f.length


def check_bernstein_szego(k: int, N: int, f: Optional[SignedPoly] = None) -> CheckReport:
    """``S'^2 + n^2 S^2 <= n^4`` for ``S = R - n``, using ``max|S| <= n``.

    ``f`` overrides ``P_k``; then ``n`` is its length.
    """
    f, n = _resolve(k, f)
    N = check_grid(N, len(as_coeffs(f)) - 1)
    if N < 8 * n:
        raise ValueError(f"N must be at least 8n = {8 * n}")
    S = _r_on_grid(f, N) - n
    dS = rn_derivative_samples(f, N)
    n4 = float(n) ** 4
    slack = (n4 - dS ** 2 - n * n * S ** 2) / n4
    j = int(np.argmin(slack))
    return _report("bernstein_szego", k, float(slack[j]), j, FLOAT_TOL, N=N, n=n)


def check_rn_derivative_bound(k: int, N: int, f: Optional[SignedPoly] = None) -> CheckReport:
    """``|R'| <= n^{3/2} sqrt(2R)`` on the grid."""
    f, n = _resolve(k, f)
    N = check_grid(N, len(as_coeffs(f)) - 1)
    if N < 8 * n:
        raise ValueError(f"N must be at least 8n = {8 * n}")
    R = _r_on_grid(f, N)
    dR = rn_derivative_samples(f, N)
    n32 = float(n) ** 1.5
    slack = (n32 * np.sqrt(2 * np.maximum(R, 0.0)) - np.abs(dR)) / (n32 * math.sqrt(2 * n))
    j = int(np.argmin(slack))
    return _report("rn_derivative_bound", k, float(slack[j]), j, FLOAT_TOL, N=N, n=n)


# ---------------------------------------------------------------------------
# zero-based checks

@lru_cache(maxsize=8)
def _rs_zeros(k: int) -> np.ndarray:
    return find_zeros(rudin_shapiro(k).p).roots


def _zero_cap(k: int):
    if k > MAX_ZERO_ORDER:
        raise ValueError(f"k={k} exceeds the root-finder cap {MAX_ZERO_ORDER}")


def check_zero_annulus(k: int) -> CheckReport:
    """Every zero ``w`` of ``P_k`` satisfies ``1/2 <= |w| <= 2``."""
    _zero_cap(k)
    roots = _rs_zeros(k)
    if len(roots) == 0:
        return _report("zero_annulus", k, math.inf, None, FLOAT_TOL, roots=0)
    r = np.abs(roots)
    slack = np.minimum(r - 0.5, 2.0 - r)
    j = int(np.argmin(slack))
    return _report("zero_annulus", k, float(slack[j]), j, FLOAT_TOL, roots=int(len(r)),
                   min_modulus=float(r.min()), max_modulus=float(r.max()))


def check_zero_separation(k: int) -> CheckReport:
    """Distance from the qualifying ``n``-th roots of unity to the zeros of ``P_k``.

    A root of unity qualifies when ``R >= 2*gamma*n`` there.  The report
    carries ``c8_hat = n * min |a_j - w|``; the check passes when it is
    strictly positive.
    """
    _zero_cap(k)
    n = 1 << k
    R = _r_on_grid(rudin_shapiro(k).p, n)
    good = np.flatnonzero(R >= 2 * GAMMA_RS * n)
    if good.size == 0:
        raise ArithmeticError("no gridpoint satisfies R >= 2*gamma*n; the grid lower bound is violated")
    roots = _rs_zeros(k)
    if len(roots) == 0:
        return _report("zero_separation", k, math.inf, None, -sys.float_info.min,
                       c8_hat=math.inf, qualifying=int(good.size))
    a = np.exp(2j * np.pi * good / n)
    best = math.inf
    loc = None
    for lo in range(0, len(a), 512):
        d = np.abs(a[lo:lo + 512, None] - roots[None, :])
        i = int(np.argmin(d.min(axis=1)))
        v = float(d[i].min())
        if v < best:
            best, loc = v, int(good[lo + i])
    c8 = n * best
    # strict positivity: tolerance is the negative of the smallest normal float
    return _report("zero_separation", k, c8, loc, -sys.float_info.min, c8_hat=c8,
                   qualifying=int(good.size))


def check_zero_counting(k: int, radii: Sequence[float]) -> CheckReport:
    """Count zeros of ``P_k`` in disks around gridpoints where ``|P_k| >= c2 * sup|P_k|``.

    Reports ``c1_hat = max count / (n r + 1)``.  The margin is the
    fraction of the degree left over by the largest count, which can only
    go negative if counting is broken.
    """
    _zero_cap(k)
    n = 1 << k
    f = rudin_shapiro(k).p
    sup = sup_norm(f).value
    v = np.abs(eval_circle(f, n).values)
    good = np.flatnonzero(v >= ZERO_COUNT_C2 * sup)
    z0 = np.exp(2j * np.pi * good / n)
    roots = _rs_zeros(k)
    deg = n - 1
    c1 = 0.0
    worst_count, loc = 0, None
    for r in radii:
        r = float(r)
        counts = np.zeros(len(z0), dtype=np.int64)
        for lo in range(0, len(z0), 256):
            d = np.abs(z0[lo:lo + 256, None] - roots[None, :])
            counts[lo:lo + 256] = np.count_nonzero(d < r, axis=1)
        if counts.size:
            i = int(np.argmax(counts))
            ratio = counts[i] / (n * r + 1)
            if ratio > c1:
                c1 = float(ratio)
            if counts[i] >= worst_count:
                worst_count, loc = int(counts[i]), int(good[i])
    margin = (deg - worst_count) / deg if deg else math.inf
    return _report("zero_counting", k, margin, loc, FLOAT_TOL, c1_hat=c1, c2=ZERO_COUNT_C2,
                   radii=[float(r) for r in radii], qualifying=int(good.size),
                   sup_norm=sup)


# ---------------------------------------------------------------------------
# roll-up

CHECK_NAMES = (
    "parallelogram_exact", "q_symmetry", "grid_lower_bound", "bernstein_szego",
    "rn_derivative_bound", "zero_annulus", "zero_separation", "zero_counting",
)


def run_check(name: str, k: int, N: Optional[int] = None) -> CheckReport:
    n = 1 << k
    if name == "parallelogram_exact":
        return check_parallelogram_exact(k)
    if name == "q_symmetry":
        return check_q_symmetry(k, N or 8 * n)
    if name == "grid_lower_bound":
        return check_grid_lower_bound(k)
    if name == "bernstein_szego":
        return check_bernstein_szego(k, N or 8 * n)
    if name == "rn_derivative_bound":
        return check_rn_derivative_bound(k, N or 8 * n)
    if name == "zero_annulus":
        return check_zero_annulus(k)
    if name == "zero_separation":
        return check_zero_separation(k)
    if name == "zero_counting":
        return check_zero_counting(k, [1.0 / n, 4.0 / n, 4.0])
    raise ValueError(f"unknown check {name!r}; choose from {', '.join(CHECK_NAMES)}")


def run_all(k: int, N: Optional[int] = None) -> list[Optional[CheckReport]]:
    """Every applicable check for order ``k``; ``None`` marks a skipped check."""
    out = []
    for name in CHECK_NAMES:
        if name == "grid_lower_bound" and k < 1:
            out.append(None)
        elif name.startswith("zero_") and k > MAX_ZERO_ORDER:
            out.append(None)
        else:
            out.append(run_check(name, k, N))
    return out


def rollup_csv(k: int, reports: Sequence[Optional[CheckReport]],
               names: Optional[Sequence[str]] = None) -> str:
    """Summary table with one row per check; ``None`` reports are marked skipped."""
    names = CHECK_NAMES if names is None else names
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check_name", "k", "status", "worst_margin", "worst_location"])
    for name, r in zip(names, reports):
        if r is None:
            w.writerow([name, k, "skipped", "", ""])
        else:
            w.writerow([name, k, "pass" if r.passed else "fail", repr(r.worst_margin),
                        "" if r.worst_location is None else r.worst_location])
    return buf.getvalue()
