"""Convergence sweeps for Rudin-Shapiro, Littlewood-average and Fekete quantities."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .constants import E_NEG_HALF_GAMMA, SQRT_2_OVER_E
from .evaluation import next_power_of_two
from .norms import (
    NormEstimate, compensated_sum, gamma_function, mahler_from_zeros,
    mahler_quadrature, mq_norm, sup_norm,
)
from .poly import (
    MAX_EXHAUSTIVE_N, ResourceLimitError, signs_from_codes, fekete, is_prime,
    littlewood_sample, rudin_shapiro,
)
from .zeros import ZeroFinderError, aberth

CSV_COLUMNS = ("family", "parameter", "quantity", "value", "reference", "gap", "bracket",
               "wall_time_ms")
MAX_QUAD_ORDER = 20
MAX_ZEROS_ORDER = 12


@dataclass
class SweepRow:
    family: str  # RS | FEKETE | LIT_AVG
    parameter: int
    quantity: str
    value: float
    reference: float
    bracket: float = 0.0
    wall_time_ms: float = 0.0
    flag: Optional[bool] = None
    gap: float = field(init=False)

    def __post_init__(self):
        self.gap = self.value - self.reference

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_fields(self, timing: bool = True) -> list[str]:
        return [self.family, str(self.parameter), self.quantity, repr(float(self.value)),
                repr(float(self.reference)), repr(float(self.gap)), repr(float(self.bracket)),
                repr(round(float(self.wall_time_ms), 3)) if timing else ""]


def rows_to_csv(rows: Iterable[SweepRow], timing: bool = True) -> str:
    """CSV with a header row and LF endings; ``timing=False`` leaves wall time blank."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_fields(timing))
    return buf.getvalue()


def rows_to_json(rows: Iterable[SweepRow], timing: bool = True) -> str:
    out = []
    for r in rows:
        d = r.to_dict()
        if not timing:
            d.pop("wall_time_ms")
        for key in ("value", "reference", "gap", "bracket"):
            if not math.isfinite(d[key]):
                d[key] = repr(d[key])
        out.append(d)
    return json.dumps(out, sort_keys=True, indent=1)


def mq_reference(q: float) -> float:
    """Limit of ``M_q(f) / sqrt(n)`` averaged over random signs: ``Gamma(1 + q/2)**(1/q)``."""
    return gamma_function(1.0 + q / 2.0) ** (1.0 / q)


def saffari_mq_reference(q: float) -> float:
    """Limit of ``M_q(P_k) / 2**((k+1)/2)``: ``(q/2 + 1)**(-1/q)``."""
    return (q / 2.0 + 1.0) ** (-1.0 / q)


# ---------------------------------------------------------------------------
# Rudin-Shapiro sweeps

def _rs_mahler(f, method: str, tol: float) -> NormEstimate:
    if method == "quad":
        return mahler_quadrature(f, tol=tol)
    if method == "zeros":
        return mahler_from_zeros(f)
    raise ValueError(f"unknown method {method!r}; use 'quad' or 'zeros'")


def sweep_rs_mahler(k_min: int, k_max: int, method: str = "quad",
                    tol: float = 1e-6) -> list[SweepRow]:
    """``M_0(P_k)/sqrt(n)`` against ``sqrt(2/e)``; ``Q_k`` is computed too and must agree."""
    cap = MAX_QUAD_ORDER if method == "quad" else MAX_ZEROS_ORDER
    if k_max > cap:
        raise ResourceLimitError(f"k_max={k_max} exceeds {cap} for method {method!r}")
    if k_min < 0 or k_min > k_max:
        raise ValueError("need 0 <= k_min <= k_max")
    rows = []
    for k in range(k_min, k_max + 1):
        t0 = time.perf_counter()
        rs = rudin_shapiro(k)
        ep = _rs_mahler(rs.p, method, tol)
        eq = _rs_mahler(rs.q, method, tol)
        allowed = ep.error_bracket + eq.error_bracket + tol * ep.value
        if abs(ep.value - eq.value) > allowed:
            raise ArithmeticError(
                f"k={k}: M_0(P)={ep.value!r} and M_0(Q)={eq.value!r} differ by more than {allowed:g}")
        if not (ep.converged and eq.converged):
            raise ArithmeticError(f"k={k}: Mahler estimate did not converge")
        ms = (time.perf_counter() - t0) * 1e3
        s = math.sqrt(rs.n)
        rows.append(SweepRow("RS", k, "M0_over_sqrt_n", ep.value / s, SQRT_2_OVER_E,
                             ep.error_bracket / s, ms))
    return rows


def sweep_rs_mq(k_min: int, k_max: int, q_list: Sequence[float],
                tol: float = 1e-9) -> list[SweepRow]:
    """``M_q(P_k) / 2**((k+1)/2)`` against ``(q/2 + 1)**(-1/q)``."""
    if any(q <= 0 for q in q_list):
        raise ValueError("q values must be positive")
    rows = []
    for k in range(k_min, k_max + 1):
        p = rudin_shapiro(k).p
        scale = 2.0 ** ((k + 1) / 2)
        for q in q_list:
            t0 = time.perf_counter()
            e = mq_norm(p, q, tol=tol)
            if not e.converged:
                raise ArithmeticError(f"M_{q} of P_{k} did not converge")
            ms = (time.perf_counter() - t0) * 1e3
            rows.append(SweepRow("RS", k, f"M{q:g}_over_sqrt_2n", e.value / scale,
                                 saffari_mq_reference(q), e.error_bracket / scale, ms))
    return rows


# ---------------------------------------------------------------------------
# Littlewood averages

def _bit_reverse(codes: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros_like(codes)
    for j in range(width):
        out |= ((codes >> j) & 1) << (width - 1 - j)
    return out


def symmetry_orbits(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Representatives and orbit sizes of 𝓛_n under negation and reversal.

    Codes use bit ``j`` set for ``a_j = -1``.  The weights sum to ``2**(n+1)``.
    """
    L = n + 1
    codes = np.arange(1 << L, dtype=np.int64)
    mask = (1 << L) - 1
    neg = codes ^ mask
    rev = _bit_reverse(codes, L)
    both = rev ^ mask
    canon = np.minimum(np.minimum(codes, neg), np.minimum(rev, both))
    reps = np.flatnonzero(canon == codes)
    # orbit size = number of distinct images
    imgs = np.stack([codes[reps], neg[reps], rev[reps], both[reps]], axis=1)
    imgs.sort(axis=1)
    sizes = 1 + (np.diff(imgs, axis=1) != 0).sum(axis=1)
    return reps, sizes


def _batch_mahler(C: np.ndarray, seed: int = 0) -> np.ndarray:
    """Mahler measures of many equal-degree polynomials (rows of ``C``, ascending)."""
    Z, ok = aberth(C, seed=seed)
    logs = np.log(np.maximum(1.0, np.abs(Z))).sum(axis=1)
    out = np.abs(C[:, -1]) * np.exp(logs)
    for i in np.flatnonzero(~ok.all(axis=1)):
        # repeated or stubborn roots: redo this row with exact factor stripping
        row = C[i].astype(np.int64)
        try:
            out[i] = mahler_from_zeros(row).value
        except ZeroFinderError:
            out[i] = mahler_quadrature(row, tol=1e-12).value
    return out


def _batch_mq(C: np.ndarray, q: float, tol: float = 1e-10) -> np.ndarray:
    """``M_q`` of many polynomials by grid doubling on the whole batch."""
    d = C.shape[1] - 1
    N = 8 * next_power_of_two(d + 1)
    prev = None
    while True:
        V = np.abs(np.fft.ifft(C, n=N, axis=1) * N)
        cur = np.mean(V ** q, axis=1) ** (1.0 / q)
        if prev is not None and np.all(np.abs(cur - prev) <= tol * np.abs(cur)):
            return cur
        if N >= (1 << 20):
            raise ArithmeticError(f"batched M_{q} did not converge by N={N}")
        prev = cur
        N *= 2


def _values(C: np.ndarray, q: float) -> np.ndarray:
    out = np.empty(len(C))
    step = 4096
    for lo in range(0, len(C), step):
        blk = C[lo:lo + step]
        out[lo:lo + step] = _batch_mahler(blk) if q == 0 else _batch_mq(blk, q)
    return out


def littlewood_average(n: int, q: float = 0.0, mode: str = "exhaustive",
                       count: int = 4096, seed: int = 0) -> SweepRow:
    """Average of ``M_q(f)/sqrt(n)`` over 𝓛_n (degree ``n``, ``2**(n+1)`` members).

    ``q = 0`` means the Mahler measure.  Monte-Carlo mode reports a
    ``3 sigma`` bracket on the sample mean.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if q < 0:
        raise ValueError("q must be nonnegative")
    t0 = time.perf_counter()
    ref = E_NEG_HALF_GAMMA if q == 0 else mq_reference(q)
    if mode == "exhaustive":
        if n > min(16, MAX_EXHAUSTIVE_N):
            raise ResourceLimitError(f"exhaustive averaging is limited to n <= 16 (got {n})")
        reps, sizes = symmetry_orbits(n)
        C = signs_from_codes(reps, n + 1).astype(np.float64)
        vals = _values(C, q) / math.sqrt(n)
        mean = compensated_sum(vals * sizes) / float(1 << (n + 1))
        bracket = 0.0
    elif mode == "montecarlo":
        if count < 2:
            raise ValueError("count must be at least 2")
        C = np.stack([f.coeffs for f in littlewood_sample(n, count, seed)]).astype(np.float64)
        vals = _values(C, q) / math.sqrt(n)
        mean = compensated_sum(vals) / count
        bracket = 3.0 * float(np.std(vals, ddof=1)) / math.sqrt(count)
    else:
        raise ValueError(f"unknown mode {mode!r}; use 'exhaustive' or 'montecarlo'")
    quantity = "M0_over_sqrt_n" if q == 0 else f"M{q:g}_over_sqrt_n"
    return SweepRow("LIT_AVG", n, quantity, mean, ref, bracket,
                    (time.perf_counter() - t0) * 1e3)


# ---------------------------------------------------------------------------
# Fekete polynomials

def fekete_experiments(p_list: Sequence[int], tol: float = 1e-9) -> list[SweepRow]:
    """Mahler and sup-norm ratios for Fekete polynomials.

    No limits are known here, so ``reference`` is NaN.  The Mahler row is
    flagged when ``M_0(f_p)/sqrt(p) >= 1/2``.
    """
    rows = []
    for p in p_list:
        if p < 3 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        f = fekete(p)
        t0 = time.perf_counter()
        m0 = mahler_quadrature(f, tol=tol)
        ms0 = (time.perf_counter() - t0) * 1e3
        t0 = time.perf_counter()
        sup = sup_norm(f)
        ms1 = (time.perf_counter() - t0) * 1e3
        s = math.sqrt(p)
        r0 = m0.value / s
        rows.append(SweepRow("FEKETE", p, "M0_over_sqrt_p", r0, math.nan, m0.error_bracket / s,
                             ms0, flag=bool(r0 >= 0.5)))
        hi = sup.extra["upper"]
        ll = math.log(math.log(p))
        lg = math.log(p)
        rows.append(SweepRow("FEKETE", p, "Minf_over_sqrt_p_loglog_p", sup.value / (s * ll),
                             math.nan, (hi - sup.value) / (s * ll), ms1))
        rows.append(SweepRow("FEKETE", p, "Minf_over_sqrt_p_log_p", sup.value / (s * lg),
                             math.nan, (hi - sup.value) / (s * lg), ms1))
    return rows


def primes_between(lo: int, hi: int) -> list[int]:
    return [p for p in range(max(lo, 3), hi + 1) if is_prime(p)]
