"""Simultaneous root finding (Aberth-Ehrlich) with per-root residual certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cyclotomic import factor_roots, strip_grid_cyclotomics, strip_low_zeros
from .evaluation import newton_ratio
from .poly import as_coeffs, make_rng

MAX_ZERO_DEGREE = 16384
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
CERTIFY_THRESHOLD = 1e-10
CLUSTER_RADIUS = 1e-8


class ZeroFinderError(RuntimeError):
    def __init__(self, message: str, indices=()):
        super().__init__(message)
        self.indices = list(indices)


@dataclass(frozen=True)
class ZeroSet:
    roots: np.ndarray
    residuals: np.ndarray
    leading_coeff: int
    clustered: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    errors: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return len(self.roots)


def initial_guesses(c: np.ndarray, count: int = 1, seed: int = 0) -> np.ndarray:
    """Golden-angle points on the ``(max|c|/|lead|)**(1/deg)`` circle, radially jittered."""
    d = c.shape[-1] - 1
    lead = np.abs(c[..., -1:]).astype(float)
    radius = (np.abs(c).max(axis=-1, keepdims=True) / lead) ** (1.0 / d)
    theta = GOLDEN_ANGLE * np.arange(d) + 0.25
    jitter = 1.0 + 1e-4 * make_rng(seed).uniform(-1.0, 1.0, size=(count, d))
    return radius * jitter * np.exp(1j * theta)


def _ratio_batch(C: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Row-wise ``f/f'`` for a stack of short polynomials (rows of ``C``)."""
    d = C.shape[1] - 1
    inner = np.abs(Z) <= 1.0
    W = np.where(inner, Z, 1.0 / np.where(Z == 0, 1.0, Z))
    # forward Horner on c for |z|<=1, on reversed c at 1/z otherwise
    R = C[:, ::-1]
    f = np.where(inner, C[:, -1:], R[:, -1:]).astype(np.complex128)
    fp = np.zeros_like(f)
    for j in range(d - 1, -1, -1):
        fp = fp * W + f
        f = f * W + np.where(inner, C[:, j:j + 1], R[:, j:j + 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        out_inner = f / fp
        out_outer = f / (d * W * f - W * W * fp)
    return np.where(inner, out_inner, out_outer)


def _aberth_sums(Z: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """``sum_{j != i} 1/(z_i - z_j)`` for the selected (row, col) pairs."""
    out = np.empty(len(rows), dtype=np.complex128)
    d = Z.shape[1]
    step = max(1, (1 << 22) // max(d, 1))
    for lo in range(0, len(rows), step):
        r = rows[lo:lo + step]
        k = cols[lo:lo + step]
        diff = Z[r, k][:, None] - Z[r]
        diff[np.arange(len(r)), k] = np.inf
        out[lo:lo + step] = (1.0 / diff).sum(axis=1)
    return out


def aberth(C, max_iter: int = 2000, tol: float = 4e-16, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Aberth-Ehrlich iteration for one or many polynomials of equal degree.

    ``C`` holds ascending coefficients, one polynomial per row, with a
    nonzero last entry.  Returns ``(roots, converged)`` arrays of shape
    ``(rows, degree)``.
    """
    C = np.atleast_2d(np.asarray(C, dtype=np.float64))
    B, d1 = C.shape
    d = d1 - 1
    Z = initial_guesses(C, B, seed)
    active = np.ones((B, d), dtype=bool)
    single = B == 1 and d > 48
    for _ in range(max_iter):
        rows, cols = np.nonzero(active)
        if rows.size == 0:
            break
        if single:
            ratio = newton_ratio(C[0], Z[0, cols])
        else:
            ratio = _ratio_batch(C, Z)[rows, cols]
        s = _aberth_sums(Z, rows, cols)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        if bad.any():
            # landed on a critical point: nudge and retry next sweep
            step[bad] = 1e-7 * np.exp(1j * GOLDEN_ANGLE * cols[bad])
        Z[rows, cols] -= step
        done = np.abs(step) <= tol * np.maximum(1.0, np.abs(Z[rows, cols]))
        active[rows[done], cols[done]] = False
    return Z, ~active


def _residuals(c: np.ndarray, roots: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Residual ``|f(w)| / sum_j j|a_j||w|^(j-1)`` and Newton-step size per root."""
    d = len(c) - 1
    if d < 1 or len(roots) == 0:
        return np.zeros(len(roots)), np.zeros(len(roots))
    a = np.abs(c).astype(float)
    res = np.empty(len(roots))
    r = np.abs(roots)
    inner = r <= 1.0
    j = np.arange(d + 1)
    from .evaluation import polyval_many

    if inner.any():
        w = roots[inner]
        fv = np.abs(polyval_many(c, w))
        scale = polyval_many(a[1:] * j[1:], r[inner]).real
        res[inner] = fv / np.maximum(scale, np.finfo(float).tiny)
    if (~inner).any():
        w = roots[~inner]
        u = 1.0 / r[~inner]
        gv = np.abs(polyval_many(c[::-1], 1.0 / w))
        # majorant of |f'| divided by |w|^(d-1)
        scale = polyval_many((j * a)[::-1][:-1], u).real
        res[~inner] = r[~inner] * gv / np.maximum(scale, np.finfo(float).tiny)
    steps = np.abs(newton_ratio(c, roots))
    steps[~np.isfinite(steps)] = np.inf
    return res, steps


def _polish(c: np.ndarray, roots: np.ndarray, sweeps: int = 2) -> np.ndarray:
    roots = roots.copy()
    for _ in range(sweeps):
        step = newton_ratio(c, roots)
        ok = np.isfinite(step) & (np.abs(step) < 1e-6)
        cand = roots - np.where(ok, step, 0)
        before = np.abs(newton_ratio(c, roots))
        after = np.abs(newton_ratio(c, cand))
        better = ok & np.isfinite(after) & (after <= before)
        roots[better] = cand[better]
    return roots


def _cluster_flags(roots: np.ndarray, radius: float = CLUSTER_RADIUS) -> np.ndarray:
    flags = np.zeros(len(roots), dtype=bool)
    if len(roots) < 2:
        return flags
    order = np.argsort(roots.real)
    rs = roots[order]
    for i in range(len(rs)):
        j = i + 1
        while j < len(rs) and rs[j].real - rs[i].real <= radius:
            if abs(rs[j] - rs[i]) <= radius:
                flags[order[i]] = flags[order[j]] = True
            j += 1
    return flags


def find_zeros(f, max_iter: int = 2000, threshold: float = CERTIFY_THRESHOLD) -> ZeroSet:
    """All complex zeros of ``f`` with residual certificates.

    Exact factors ``z**m``, ``z - 1`` and ``z**M + 1`` are divided out
    first and their roots reported at exact angles; the remaining quotient
    goes through Aberth-Ehrlich iteration and a Newton polish.
    """
    c = as_coeffs(f)
    d = len(c) - 1
    if d > MAX_ZERO_DEGREE:
        raise ZeroFinderError(f"degree {d} exceeds the root-finder cap {MAX_ZERO_DEGREE}")
    lead = int(c[-1])
    if d == 0:
        if lead == 0:
            raise ZeroFinderError("the zero polynomial has no finite zero set")
        return ZeroSet(np.zeros(0, complex), np.zeros(0), lead, np.zeros(0, bool), np.zeros(0))
    body, m = strip_low_zeros(c)
    body, factors = strip_grid_cyclotomics(body)
    known = [np.zeros(m, dtype=complex)] + [factor_roots(code) for code in factors]
    found = np.zeros(0, dtype=complex)
    if len(body) > 1:
        Z, ok = aberth(body, max_iter=max_iter)
        found = Z[0]
        if not ok.all():
            # stalled roots are accepted if their residual certifies anyway
            res, _ = _residuals(body, found)
            stalled = np.flatnonzero(~ok[0] & (res > threshold))
            if stalled.size:
                raise ZeroFinderError(
                    f"{stalled.size} roots did not converge: indices {stalled.tolist()[:20]}",
                    stalled.tolist(),
                )
        found = _polish(body, found)
    roots = np.concatenate(known + [found])
    res, steps = _residuals(c, roots)
    # exactly known roots carry only rounding in their angle
    nk = sum(len(k) for k in known)
    res[:nk] = np.minimum(res[:nk], np.finfo(float).eps)
    steps[:nk] = np.finfo(float).eps
    bad = np.flatnonzero(res > threshold)
    if bad.size:
        raise ZeroFinderError(
            f"{bad.size} roots failed certification (threshold {threshold:g}): "
            f"indices {bad.tolist()[:20]}",
            bad.tolist(),
        )
    clustered = _cluster_flags(roots)
    errors = np.where(clustered, np.sqrt(np.maximum(steps, 0) * np.maximum(np.abs(roots), 1.0)), steps)
    return ZeroSet(roots, res, lead, clustered, errors)
