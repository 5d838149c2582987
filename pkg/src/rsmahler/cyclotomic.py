"""Exact removal of the cyclotomic factors whose roots lie on power-of-two grids.

The zeros of ``z - 1`` and of ``z**M + 1`` (``M`` a power of two) are
``2M``-th roots of unity, so they land exactly on the sample grids used
for quadrature.  Both factors have Mahler measure 1, so dividing them out
leaves ``M_0`` unchanged.  All arithmetic is on int64.
"""

from __future__ import annotations

import numpy as np


def _fold(c: np.ndarray, M: int) -> np.ndarray:
    """Remainder of ``c`` modulo ``z**M + 1``."""
    L = -(-len(c) // M) * M
    padded = np.zeros(L, dtype=np.int64)
    padded[: len(c)] = c
    rows = padded.reshape(-1, M)
    signs = np.where(np.arange(rows.shape[0]) % 2 == 0, 1, -1)[:, None]
    return (rows * signs).sum(axis=0)


def _div_z_minus_1(c: np.ndarray) -> np.ndarray:
    # a_0 = -g_0, a_i = g_{i-1} - g_i  =>  g_i = -(a_0 + ... + a_i)
    return -np.cumsum(c[:-1])


def _div_z_pow_plus_1(c: np.ndarray, M: int) -> np.ndarray:
    # a_i = g_i + g_{i-M}  =>  g_i = a_i - g_{i-M}, for i < deg - M + 1
    d = len(c) - 1
    g = np.zeros(d - M + 1, dtype=np.int64)
    for start in range(min(M, len(g))):
        seg = c[start: d - M + 1: M]
        signs = np.where(np.arange(len(seg)) % 2 == 0, 1, -1)
        g[start::M] = signs * np.cumsum(seg * signs)
    return g


def strip_grid_cyclotomics(c) -> tuple[np.ndarray, list[int]]:
    """Divide out every factor ``z - 1`` and ``z**M + 1`` (``M = 1, 2, 4, ...``).

    Returns the integer quotient and the list of removed factors, encoded
    as ``0`` for ``z - 1`` and ``M`` for ``z**M + 1`` (with multiplicity).
    """
    c = np.asarray(c, dtype=np.int64)
    removed: list[int] = []
    while len(c) > 1 and c.sum() == 0:
        c = _div_z_minus_1(c)
        removed.append(0)
    M = 1
    while M <= len(c) - 1:
        if not _fold(c, M).any():
            c = _div_z_pow_plus_1(c, M)
            removed.append(M)
            continue
        M *= 2
    return c, removed


def factor_roots(code: int) -> np.ndarray:
    """Exact-angle roots of a removed factor (``0`` -> ``z - 1``)."""
    if code == 0:
        return np.array([1.0 + 0j])
    j = np.arange(code)
    return np.exp(1j * np.pi * (2 * j + 1) / code)


def strip_low_zeros(c) -> tuple[np.ndarray, int]:
    """Remove the factor ``z**m``; returns the quotient and ``m``."""
    c = np.asarray(c, dtype=np.int64)
    nz = np.flatnonzero(c)
    if not nz.size:
        return c, 0
    return c[nz[0]:], int(nz[0])
