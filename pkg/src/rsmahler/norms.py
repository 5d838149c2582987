"""M_q norms, certified sup norm, and three independent Mahler measure estimators."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cyclotomic import strip_grid_cyclotomics, strip_low_zeros
from .evaluation import eval_coeffs_on_grid, newton_ratio, next_power_of_two, polyval_many
from .poly import as_coeffs
from .zeros import ZeroSet, find_zeros

N_CAP = 1 << 26
DEFAULT_Q_SEQUENCE = tuple(2.0 ** -i for i in range(7))


@dataclass
class NormEstimate:
    value: float
    method: str
    error_bracket: float
    refinement_log: list = field(default_factory=list)
    converged: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["refinement_log"] = [[int(N), float(v)] for N, v in self.refinement_log]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @property
    def lower(self) -> float:
        return self.value - self.error_bracket

    @property
    def upper(self) -> float:
        return self.value + self.error_bracket


def compensated_sum(x: np.ndarray) -> float:
    """Pairwise sums over blocks, combined exactly with ``math.fsum``."""
    x = np.asarray(x, dtype=np.float64).ravel()
    B = 1 << 14
    full = len(x) // B * B
    parts = list(x[:full].reshape(-1, B).sum(axis=1)) if full else []
    parts.extend(x[full:].tolist())
    return math.fsum(parts)


def start_grid(degree: int) -> int:
    return 8 * next_power_of_two(degree + 1)


def _bracket(log: list) -> float:
    if len(log) < 2:
        return 0.0
    return abs(log[-1][1] - log[-2][1])


# ---------------------------------------------------------------------------
# M_q

def _power_sum(c: np.ndarray, N: int, q: float, shift: float) -> float:
    v = np.abs(eval_coeffs_on_grid(c, N, shift))
    if q == 2.0:
        return compensated_sum(v * v)
    return compensated_sum(v ** q)


def mq_norm(f, q: float, tol: float = 1e-10, n_cap: int = N_CAP,
            n_start: Optional[int] = None) -> NormEstimate:
    """``M_q(f)`` by grid means of ``|f|**q`` under repeated grid doubling.

    Each doubling only evaluates the new half-step points (one FFT of the
    modulated coefficients), since the old samples are unchanged.
    """
    q = float(q)
    if not q > 0:
        raise ValueError("q must be positive")
    c = as_coeffs(f)
    deg = len(c) - 1
    if not c.any():
        return NormEstimate(0.0, "grid_q", 0.0, [(1, 0.0)], True, {"q": q})
    N = n_start or start_grid(deg)
    sums = [_power_sum(c, N, q, 0.0)]
    log = [(N, (math.fsum(sums) / N) ** (1.0 / q))]
    converged = False
    while N < n_cap:
        sums.append(_power_sum(c, N, q, 0.5))
        N *= 2
        log.append((N, (math.fsum(sums) / N) ** (1.0 / q)))
        if abs(log[-1][1] - log[-2][1]) <= tol * log[-1][1]:
            converged = True
            break
    value = log[-1][1]
    return NormEstimate(value, "grid_q", _bracket(log), log, converged, {"q": q})


# ---------------------------------------------------------------------------
# M_infinity

def sup_norm(f, tol: float = 1e-9, max_levels: int = 60,
             max_active: int = 1 << 21) -> NormEstimate:
    """Certified ``max |f|`` on the circle (up to floating rounding).

    Works on ``R = |f|**2``, a real trigonometric polynomial of degree
    ``deg``, so ``|R''| <= deg**2 * U**2`` for any upper bound ``U`` of
    ``|f|``.  On an interval of half-width ``h`` around ``m`` this gives
    ``R <= R(m) + |R'(m)| h + deg**2 U**2 h**2 / 2``.  Sample maxima are
    lower bounds; intervals whose bound beats the lower bound by more than
    ``tol`` (relative) are bisected.
    """
    c = as_coeffs(f)
    deg = len(c) - 1
    if deg == 0:
        v = float(abs(c[0]))
        return NormEstimate(v, "sup_certified", 0.0, [(1, v)], True, {"lower": v, "upper": v})
    cz = c * np.arange(deg + 1)  # coefficients of z f'(z)
    N = start_grid(deg)
    F = eval_coeffs_on_grid(c, N)
    G = eval_coeffs_on_grid(cz, N)
    t = 2 * math.pi * np.arange(N) / N
    h = math.pi / N
    R = F.real ** 2 + F.imag ** 2
    dR = -2.0 * (F.real * G.imag - F.imag * G.real)
    lo2 = float(R.max())
    # nearest sample is within h of the maximizer and |f'| <= deg * U
    U = math.sqrt(lo2) / (1.0 - deg * h)
    target = (1.0 + tol) ** 2
    settled = lo2
    log = [(N, math.sqrt(lo2))]
    level_N = N
    converged = False
    for _ in range(max_levels):
        bound = R + np.abs(dR) * h + 0.5 * (deg * U * h) ** 2
        keep = bound > lo2 * target
        if (~keep).any():
            settled = max(settled, float(bound[~keep].max()))
        U = min(U, math.sqrt(max(lo2, settled, float(bound.max()))))
        if not keep.any():
            converged = True
            break
        t = t[keep]
        if 2 * len(t) > max_active:
            break
        h /= 2
        t = np.concatenate([t - h, t + h])
        z = np.exp(1j * t)
        F = polyval_many(c, z)
        G = polyval_many(cz, z)
        R = F.real ** 2 + F.imag ** 2
        dR = -2.0 * (F.real * G.imag - F.imag * G.real)
        lo2 = max(lo2, float(R.max()))
        level_N *= 2
        log.append((level_N, math.sqrt(lo2)))
    lower = math.sqrt(lo2)
    upper = max(lower, U)
    return NormEstimate(lower, "sup_certified", upper - lower, log, converged,
                        {"lower": lower, "upper": upper})


# ---------------------------------------------------------------------------
# Mahler measure by quadrature

def _log_abs_power_minus_one(w: np.ndarray, N: int) -> np.ndarray:
    """``log|w**N - 1|`` without forming ``w**N`` directly."""
    rho = N * np.log(np.abs(w))
    phi = np.angle(w) * N
    phi = (phi + np.pi) % (2 * np.pi) - np.pi
    x = rho + 1j * phi
    out = np.empty(len(w))
    small = np.abs(x) < 1e-3
    # |e^x - 1| = |x| |1 + x/2 + x^2/6 + ...|
    xs = x[small]
    out[small] = np.log(np.abs(xs)) + np.log(np.abs(1 + xs / 2 + xs * xs / 6 + xs ** 3 / 24))
    big = ~small
    xb = x[big]
    huge = xb.real > 700
    res = np.empty(len(xb))
    res[huge] = xb.real[huge] + np.log1p(-np.exp(-xb.real[huge]))
    res[~huge] = np.log(np.abs(np.exp(xb[~huge]) - 1.0))
    out[big] = res
    return out


class _NearZeros:
    """Zeros within a few grid steps of the circle, located by local Newton iteration."""

    def __init__(self, c: np.ndarray):
        self.c = c.astype(np.float64)
        d = len(c) - 1
        self.dc = self.c[1:] * np.arange(1, d + 1)
        self.ddc = self.dc[1:] * np.arange(1, d)
        self.roots = np.zeros(0, dtype=complex)

    def locate(self, starts: np.ndarray, N: int, iters: int = 40) -> None:
        if not len(starts):
            return
        h = 2 * math.pi / N
        w = starts.copy()
        alive = np.ones(len(w), dtype=bool)
        for _ in range(iters):
            idx = np.flatnonzero(alive)
            if not idx.size:
                break
            step = newton_ratio(self.c, w[idx])
            finite = np.isfinite(step)
            w[idx[finite]] -= step[finite]
            alive[idx[~finite]] = False
            alive[idx[finite & (np.abs(step) <= 1e-15 * np.abs(w[idx]))]] = False
        ok = (np.abs(w - starts) < 8 * h) & (np.abs(np.abs(w) - 1.0) < min(0.5, 40.0 / N))
        w = w[ok]
        # accept only certified zeros: tiny backward error
        mag = polyval_many(np.abs(self.c), np.abs(w)).real
        w = w[np.abs(polyval_many(self.c, w)) <= 1e-13 * mag]
        merged = list(self.roots)
        for z in w:
            if not merged or np.min(np.abs(np.asarray(merged) - z)) > 1e-10:
                merged.append(z)
        self.roots = np.asarray(merged, dtype=complex)

    def correction(self, N: int) -> float:
        if not len(self.roots):
            return 0.0
        exact = np.log(np.maximum(1.0, np.abs(self.roots)))
        grid = _log_abs_power_minus_one(self.roots, N) / N
        return math.fsum((exact - grid).tolist())

    def patch(self, logabs: np.ndarray, N: int) -> None:
        """Replace samples lying almost on a located zero by a deflated evaluation."""
        d = len(self.c) - 1
        tau = 1e-6 / max(d, 1)
        for w in self.roots:
            j = int(round(np.angle(w) * N / (2 * math.pi))) % N
            for jj in (j - 1, j, j + 1):
                jj %= N
                z = np.exp(2j * math.pi * jj / N)
                dz = z - w
                if abs(dz) < tau:
                    fp = polyval_many(self.dc, np.array([w]))[0]
                    fpp = polyval_many(self.ddc, np.array([w]))[0] if len(self.ddc) else 0.0
                    logabs[jj] = math.log(abs(dz)) + math.log(abs(fp + 0.5 * fpp * dz))


def mahler_quadrature(f, tol: float = 1e-10, eps_floor: float = 1e-3,
                      n_cap: int = N_CAP, newton_budget: float = 6e7) -> NormEstimate:
    """Mahler measure from grid means of ``log|f|`` under grid doubling.

    Singular behaviour is handled in two layers.  Exact factors ``z - 1``
    and ``z**M + 1`` (roots on the sample grid) are divided out first;
    they have Mahler measure 1.  Samples that are small (below
    ``eps_floor * sqrt(deg+1)``) or sit at a local minimum close to a zero
    seed a local Newton search; each zero ``w`` found near the circle has
    its exact grid error ``log|w**N - 1|/N - log max(1, |w|)`` removed.
    """
    c0 = as_coeffs(f)
    if not c0.any():
        raise ValueError("Mahler measure of the zero polynomial is undefined (log 0)")
    deg0 = len(c0) - 1
    # z**m and the grid cyclotomics all have Mahler measure 1
    c, _ = strip_low_zeros(c0)
    c, removed = strip_grid_cyclotomics(c)
    extra = {"stripped_factors": removed}
    deg = len(c) - 1
    if deg == 0:
        v = float(abs(c[0]))
        return NormEstimate(v, "mahler_quad", 0.0, [(1, v)], True, extra)
    near = _NearZeros(c)
    scale = math.sqrt(float(np.sum(c.astype(float) ** 2)))
    floor = eps_floor * math.sqrt(deg + 1)
    N = start_grid(deg0)
    log_est: list = []
    converged = False
    degenerate = False
    while True:
        v = eval_coeffs_on_grid(c, N)
        a = np.abs(v)
        del v
        h = 2 * math.pi / N
        small = a < floor
        localmin = (a <= np.roll(a, 1)) & (a <= np.roll(a, -1)) & (a < 6 * h * deg * scale)
        starts = np.flatnonzero(small | localmin)
        if 0 < starts.size * deg <= newton_budget:
            near.locate(np.exp(2j * math.pi * starts / N), N)
        with np.errstate(divide="ignore"):
            la = np.log(a)
        del a
        near.patch(la, N)
        if not np.all(np.isfinite(la)):
            degenerate = True
            la[~np.isfinite(la)] = math.log(np.finfo(float).tiny)
        est = compensated_sum(la) / N + near.correction(N)
        del la
        log_est.append((N, est))
        if len(log_est) >= 2 and abs(log_est[-1][1] - log_est[-2][1]) <= tol:
            converged = not degenerate
            break
        if N >= n_cap:
            break
        N *= 2
    refinement = [(n_, math.exp(e)) for n_, e in log_est]
    value = refinement[-1][1]
    extra["near_zeros"] = int(len(near.roots))
    return NormEstimate(value, "mahler_quad", _bracket(refinement), refinement, converged, extra)


# ---------------------------------------------------------------------------
# Mahler measure from zeros

def mahler_from_zero_set(zs: ZeroSet) -> NormEstimate:
    r = np.abs(zs.roots)
    logs = np.log(np.maximum(1.0, r))
    value = math.exp(math.log(abs(zs.leading_coeff)) + math.fsum(logs.tolist()))
    # max(1, |w|) is 1-Lipschitz in w
    contrib = np.where(r + zs.errors >= 1.0, zs.errors / np.maximum(r, 1.0), 0.0) if len(r) else r
    bracket = value * (float(np.sum(contrib)) + 4 * np.finfo(float).eps * max(len(r), 1))
    return NormEstimate(value, "mahler_zeros", bracket, [(len(r), value)], True,
                        {"degree": int(len(r)), "clustered": int(np.sum(zs.clustered))})


def mahler_from_zeros(f) -> NormEstimate:
    """``|lead| * prod max(1, |w|)`` over the certified zeros of ``f``."""
    return mahler_from_zero_set(find_zeros(f))


# ---------------------------------------------------------------------------
# Mahler measure as the q -> 0 limit of M_q

def _extrapolate_to_zero(qs: Sequence[float], ys: Sequence[float]) -> float:
    """Neville evaluation at 0 of the interpolant through ``(q_i, y_i)``.

    With halving ``q`` this is the Richardson table built from repeated
    affine-in-``q`` eliminations.
    """
    qs = list(qs)
    p = list(ys)
    n = len(qs)
    for m in range(1, n):
        for i in range(n - 1, m - 1, -1):
            p[i] = (qs[i - m] * p[i] - qs[i] * p[i - 1]) / (qs[i - m] - qs[i])
    return p[-1]


def mahler_extrapolate(f, q_sequence: Sequence[float] = DEFAULT_Q_SEQUENCE,
                       tol: float = 1e-9, n_cap: int = 1 << 20) -> NormEstimate:
    """Extrapolate ``log M_q`` to ``q = 0`` along a descending ``q`` sequence."""
    qs = [float(q) for q in q_sequence]
    if any(b >= a for a, b in zip(qs, qs[1:])):
        raise ValueError("q_sequence must be strictly descending")
    if qs[-1] < 1.0 / 64 or qs[-1] <= 0:
        raise ValueError("smallest q must be at least 1/64")
    ests = [mq_norm(f, q, tol=tol, n_cap=n_cap) for q in qs]
    values = [e.value for e in ests]
    if values[-1] == 0.0:
        raise ValueError("Mahler measure of the zero polynomial is undefined (log 0)")
    slack = 1e-9 + max(e.error_bracket for e in ests)
    for a, b in zip(values, values[1:]):
        if b > a + slack:
            raise ArithmeticError(f"M_q increased as q decreased: {a!r} -> {b!r}")
    logs = [math.log(v) for v in values]
    value = math.exp(_extrapolate_to_zero(qs, logs))
    bracket = abs(value - values[-1])
    log = [(e.refinement_log[-1][0], v) for e, v in zip(ests, values)] + [(0, value)]
    return NormEstimate(value, "mahler_extrap", bracket, log,
                        all(e.converged for e in ests),
                        {"q_sequence": qs, "mq_values": values})


# ---------------------------------------------------------------------------
# Gamma function

_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
)


def gamma_function(x: float) -> float:
    """Lanczos approximation (g = 7, nine terms) with reflection below 1/2."""
    x = float(x)
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_function(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * math.exp((x + 0.5) * math.log(t) - t) * acc
