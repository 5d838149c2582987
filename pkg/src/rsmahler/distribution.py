"""Value distribution of Rudin-Shapiro polynomials on the unit circle.

``|P_k|^2 / 2n`` should look uniform on ``[0, 1]`` and ``P_k / sqrt(2n)``
uniform on the unit disk.  Angles are weighted by normalized Lebesgue
measure ``dt / 2pi`` on ``[0, 2pi)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .evaluation import check_grid, eval_circle
from .poly import rudin_shapiro

MIN_OVERSAMPLE = 32


@dataclass
class DistReport:
    k: int
    grid_size: int
    statistic_kind: str  # "ks_1d" | "tv_2d"
    statistic: float
    bins: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "grid_size": self.grid_size,
            "statistic_kind": self.statistic_kind,
            "statistic": self.statistic,
            "bins": {key: np.asarray(v).tolist() for key, v in self.bins.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def histogram_rows(self) -> list[tuple[float, float, float, float]]:
        """``(bin_lo, bin_hi, mass, limit_mass)`` rows; 2-d cells are flattened row-major in x."""
        masses = np.asarray(self.bins["masses"]).ravel()
        limit = np.asarray(self.bins["limit_masses"]).ravel()
        if self.statistic_kind == "ks_1d":
            e = np.asarray(self.bins["edges"])
            lo, hi = e[:-1], e[1:]
        else:
            # index cells by their linear position in the flattened grid
            lo = np.arange(len(masses), dtype=float)
            hi = lo + 1
        return list(zip(lo.tolist(), hi.tolist(), masses.tolist(), limit.tolist()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "mass", "limit_mass"])
        for row in self.histogram_rows():
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def _check_size(k: int, N: int) -> int:
    n = 1 << k
    N = check_grid(N, n - 1)
    if N < MIN_OVERSAMPLE * n:
        raise ValueError(f"grid size {N} must be at least {MIN_OVERSAMPLE} * 2^k = {MIN_OVERSAMPLE * n}")
    return N


def normalized_values(k: int, N: int, which: str = "P") -> np.ndarray:
    pair = rudin_shapiro(k)
    f = pair.p if which == "P" else pair.q
    return eval_circle(f, N).values / math.sqrt(2 * pair.n)


def ks_uniform(u: np.ndarray) -> float:
    """One-sample Kolmogorov-Smirnov distance to the uniform law on ``[0, 1]``."""
    x = np.sort(np.clip(np.asarray(u, dtype=float), 0.0, 1.0))
    m = len(x)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - x), np.max(x - (i - 1) / m)))


def saffari_statistic(k: int, N: int, bins: int = 20, which: str = "P") -> DistReport:
    """KS distance between ``{|P_k(z_j)|^2 / 2n}`` and ``U[0, 1]``, plus a histogram."""
    N = _check_size(k, N)
    w = normalized_values(k, N, which)
    # |P|^2 + |Q|^2 = 2n keeps every value in [0, 1] up to rounding
    u = np.clip(w.real ** 2 + w.imag ** 2, 0.0, 1.0)
    counts, edges = np.histogram(u, bins=bins, range=(0.0, 1.0))
    masses = counts / N
    return DistReport(k, N, "ks_1d", ks_uniform(u), {
        "edges": edges,
        "masses": masses,
        "limit_masses": np.diff(edges),
    })


def _quadrant_area(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Area of the unit disk inside ``[0, x] x [0, y]`` for ``x, y >= 0``."""
    x = np.minimum(x, 1.0)
    y = np.minimum(y, 1.0)
    s = np.sqrt(np.maximum(0.0, 1.0 - y * y))  # where the arc meets height y

    def arc(t):  # integral of sqrt(1 - u^2) from 0 to t
        return 0.5 * (t * np.sqrt(np.maximum(0.0, 1.0 - t * t)) + np.arcsin(t))

    return np.where(x <= s, x * y, s * y + arc(x) - arc(s))


def _signed_area(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.sign(y) * _quadrant_area(np.abs(x), np.abs(y))


def disk_rectangle_area(x0, x1, y0, y1):
    """Exact area of ``[x0, x1] x [y0, y1]`` intersected with the unit disk."""
    x0, x1, y0, y1 = (np.asarray(v, dtype=float) for v in (x0, x1, y0, y1))
    return (_signed_area(x1, y1) - _signed_area(x0, y1)
            - _signed_area(x1, y0) + _signed_area(x0, y0))


def disk_cell_masses(cells_per_axis: int) -> np.ndarray:
    """Uniform-on-disk probability of each cell of the ``[-1, 1]^2`` grid, indexed ``[ix, iy]``."""
    e = np.linspace(-1.0, 1.0, cells_per_axis + 1)
    X0, Y0 = np.meshgrid(e[:-1], e[:-1], indexing="ij")
    X1, Y1 = np.meshgrid(e[1:], e[1:], indexing="ij")
    return disk_rectangle_area(X0, X1, Y0, Y1) / math.pi


def montgomery_statistic(k: int, N: int, cells_per_axis: int = 16, which: str = "P") -> DistReport:
    """Total variation between the cell masses of ``{P_k(z_j)/sqrt(2n)}`` and uniform-on-disk."""
    N = _check_size(k, N)
    w = normalized_values(k, N, which)
    counts, xe, ye = np.histogram2d(
        np.clip(w.real, -1.0, 1.0), np.clip(w.imag, -1.0, 1.0),
        bins=cells_per_axis, range=[[-1.0, 1.0], [-1.0, 1.0]],
    )
    masses = counts / N
    limit = disk_cell_masses(cells_per_axis)
    tv = 0.5 * float(np.abs(masses - limit).sum())
    return DistReport(k, N, "tv_2d", tv, {
        "x_edges": xe,
        "y_edges": ye,
        "masses": masses,
        "limit_masses": limit,
    })


def saffari_mass(k: int, N: int, alpha: float, beta: float, which: str = "P") -> float:
    """Fraction of grid angles with ``|P_k|^2 / 2n`` in ``[alpha, beta]``."""
    N = _check_size(k, N)
    w = normalized_values(k, N, which)
    u = w.real ** 2 + w.imag ** 2
    return float(np.count_nonzero((u >= alpha) & (u <= beta + 1e-12)) / N)
