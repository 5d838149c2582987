"""Polynomial evaluation on uniform unit-circle grids and at arbitrary points."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly import as_coeffs


class GridError(ValueError):
    pass


def is_power_of_two(N: int) -> bool:
    return N >= 1 and (N & (N - 1)) == 0


def next_power_of_two(m: int) -> int:
    return 1 << max(0, (int(m) - 1).bit_length())


def check_grid(N: int, degree: int) -> int:
    N = int(N)
    if not is_power_of_two(N):
        raise GridError(f"grid size {N} is not a power of two")
    if N < degree + 1:
        raise GridError(f"grid size {N} is smaller than degree+1 = {degree + 1}")
    return N


@dataclass(frozen=True)
class CircleSamples:
    values: np.ndarray  # f(exp(2*pi*i*j/N)), j = 0..N-1
    grid_size: int
    source_degree: int

    @property
    def oversample_factor(self) -> Fraction:
        return Fraction(self.grid_size, self.source_degree + 1)

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.grid_size) / self.grid_size

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "t_j", "re", "im"])
        for j, (t, v) in enumerate(zip(self.angles, self.values)):
            w.writerow([j, repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()


@dataclass(frozen=True)
class ModulusSquaredSamples:
    values: np.ndarray
    grid_size: int
    n: int


def _grid_values(c: np.ndarray, N: int, shift: float = 0.0) -> np.ndarray:
    """Values at angles ``2*pi*(j + shift)/N`` via a zero-padded inverse FFT."""
    c = np.asarray(c, dtype=np.float64)
    if shift:
        c = c * np.exp(2j * np.pi * shift * np.arange(len(c)) / N)
    return np.fft.ifft(c, n=N) * N


def eval_circle(f, N: int) -> CircleSamples:
    """Sample ``f`` at the ``N``-th roots of unity.

    Rounding error is bounded by roughly
    ``eps * (deg+1) * log2(N) * max|coeff|`` per sample.
    """
    c = as_coeffs(f)
    deg = len(c) - 1
    N = check_grid(N, deg)
    return CircleSamples(_grid_values(c, N), N, deg)


def eval_coeffs_on_grid(c, N: int, shift: float = 0.0) -> np.ndarray:
    """Grid values for an arbitrary integer/float coefficient array (no size checks)."""
    return _grid_values(np.asarray(c), N, shift)


def eval_point(f, z: complex) -> complex:
    """Horner evaluation at a single point."""
    c = as_coeffs(f)
    acc = 0j
    for a in c[::-1]:
        acc = acc * z + int(a)
    return complex(acc)


def polyval_many(c, z) -> np.ndarray:
    """Evaluate ``sum c[j] z**j`` at many points.

    Short polynomials use plain Horner.  Long ones split the coefficients
    into blocks of ``B``, evaluate every block with a matrix product and
    run Horner over the blocks in ``z**B``.
    """
    c = np.asarray(c, dtype=np.float64)
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    z = z.ravel()
    d = len(c)
    if d == 0:
        return np.zeros(shape, dtype=np.complex128)
    if d <= 48:
        y = np.full(z.shape, c[-1], dtype=np.complex128)
        for a in c[-2::-1]:
            y = y * z + a
        return y.reshape(shape)
    B = int(min(1024, max(16, next_power_of_two(int(math.sqrt(d))))))
    nb = -(-d // B)
    C = np.zeros(nb * B)
    C[:d] = c
    C = C.reshape(nb, B)
    out = np.empty(z.shape, dtype=np.complex128)
    step = max(1, (1 << 22) // (B + nb))
    for lo in range(0, len(z), step):
        zz = z[lo:lo + step]
        P = np.empty((len(zz), B), dtype=np.complex128)
        P[:, 0] = 1.0
        if B > 1:
            P[:, 1:] = np.cumprod(np.broadcast_to(zz[:, None], (len(zz), B - 1)), axis=1)
        V = (P.real @ C.T) + 1j * (P.imag @ C.T)
        zB = P[:, -1] * zz
        y = V[:, -1].copy()
        for b in range(nb - 2, -1, -1):
            y *= zB
            y += V[:, b]
        out[lo:lo + step] = y
    return out.reshape(shape)


def derivative_coeffs(f) -> np.ndarray:
    """Exact coefficients of ``f'``; the derivative of a constant is ``[]``."""
    c = as_coeffs(f)
    return (c[1:] * np.arange(1, len(c), dtype=np.int64)).astype(np.int64)


def newton_ratio(c, z) -> np.ndarray:
    """``f(z)/f'(z)`` for many points, using the reversed polynomial when ``|z| > 1``."""
    c = np.asarray(c, dtype=np.float64)
    z = np.asarray(z, dtype=np.complex128)
    d = len(c) - 1
    out = np.empty(z.shape, dtype=np.complex128)
    inner = np.abs(z) <= 1.0
    dc = c[1:] * np.arange(1, d + 1)
    err = np.seterr(divide="ignore", invalid="ignore")
    try:
        if inner.any():
            zi = z[inner]
            out[inner] = polyval_many(c, zi) / polyval_many(dc, zi)
        if (~inner).any():
            w = 1.0 / z[~inner]
            r = c[::-1]
            dr = r[1:] * np.arange(1, d + 1)
            g = polyval_many(r, w)
            gp = polyval_many(dr, w)
            # f = z^d g(1/z)  =>  f/f' = g / (d w g - w^2 g')
            out[~inner] = g / (d * w * g - w * w * gp)
    finally:
        np.seterr(**err)
    return out


def modulus_squared(s: CircleSamples, n: int | None = None) -> ModulusSquaredSamples:
    v = s.values
    r = v.real * v.real + v.imag * v.imag
    return ModulusSquaredSamples(r, s.grid_size, s.source_degree + 1 if n is None else int(n))


def rn_derivative_samples(f, N: int) -> np.ndarray:
    """Samples of ``d/dt |f(e^{it})|^2`` on the ``N``-point grid.

    Uses ``R' = 2 Re(conj(f) * i z f'(z)) = -2 Im(conj(f) * z f'(z))``
    with ``z f'(z)`` obtained from the coefficients ``j * a_j``.
    """
    c = as_coeffs(f)
    deg = len(c) - 1
    N = check_grid(N, deg)
    if N < 2 * deg + 1:
        raise GridError(f"grid size {N} must be at least 2*deg+1 = {2 * deg + 1}")
    F = _grid_values(c, N)
    G = _grid_values(c * np.arange(len(c)), N)
    return -2.0 * (F.real * G.imag - F.imag * G.real)
