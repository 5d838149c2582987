"""Exact constructions: Rudin-Shapiro pairs, Fekete polynomials, Littlewood class.

Coefficients are stored lowest degree first (``coeffs[j]`` multiplies ``z**j``)
as read-only ``int8`` arrays.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

MAX_RS_ORDER = 26
MAX_EXHAUSTIVE_N = 24


class ResourceLimitError(ValueError):
    """Requested object would exceed a configured size limit."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of the operation."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SignedPoly:
    """Integer polynomial with small coefficients.

    ``origin`` is an optional symbolic description (``"RS k=3 which=P"``)
    used for compact serialization; it does not take part in equality.
    """

    coeffs: np.ndarray
    origin: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficient vector must be a nonempty 1-d sequence")
        if c.dtype != np.int8:
            if c.dtype.kind not in "iub" and not np.all(np.asarray(c) == np.round(c)):
                raise ValueError("coefficients must be integers")
            wide = np.asarray(c, dtype=np.int64)
            if wide.size and (wide.max() > 127 or wide.min() < -128):
                raise ValueError("coefficients must fit in a signed byte")
            c = wide.astype(np.int8)
        nz = np.flatnonzero(c)
        top = nz[-1] + 1 if nz.size else 1
        c = np.array(c[:top], dtype=np.int8)
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return self.length == 1 and self.coeffs[0] == 0

    def is_littlewood(self) -> bool:
        return bool(np.all(np.abs(self.coeffs) == 1))

    def __eq__(self, other):
        if not isinstance(other, SignedPoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __len__(self):
        return self.length

    def __repr__(self):
        if self.origin:
            return f"SignedPoly({self.origin})"
        return f"SignedPoly({self.coeffs.tolist()})"

    def tolist(self) -> list[int]:
        return [int(a) for a in self.coeffs]

    def negated(self) -> "SignedPoly":
        return SignedPoly(-self.coeffs.astype(np.int16))

    def reversed(self) -> "SignedPoly":
        """``z**deg * f(1/z)``."""
        return SignedPoly(self.coeffs[::-1].copy())


@dataclass(frozen=True)
class RSPair:
    p: SignedPoly
    q: SignedPoly
    k: int

    @property
    def n(self) -> int:
        return 1 << self.k

    def halves(self) -> "RSPair":
        """Recover ``(P_{k-1}, Q_{k-1})`` from the first and second halves of ``P_k``."""
        if self.k == 0:
            raise ValueError("order-0 pair has no predecessor")
        h = self.n // 2
        return RSPair(SignedPoly(self.p.coeffs[:h]), SignedPoly(self.p.coeffs[h:]), self.k - 1)


def rudin_shapiro(k: int, max_order: int = MAX_RS_ORDER) -> RSPair:
    """Return the Rudin-Shapiro pair of order ``k`` (length ``2**k``)."""
    k = int(k)
    if k < 0:
        raise DomainError("order must be nonnegative")
    if k > max_order:
        raise ResourceLimitError(f"order {k} exceeds the configured maximum {max_order}")
    n = 1 << k
    p = np.empty(n, dtype=np.int8)
    q = np.empty(n, dtype=np.int8)
    p[0] = q[0] = 1
    m = 1
    while m < n:
        # P <- P + z^m Q, Q <- P - z^m Q, done in place on doubling buffers
        p[m:2 * m] = q[:m]
        q[m:2 * m] = -q[:m]
        q[:m] = p[:m]
        m *= 2
    return RSPair(
        SignedPoly(p, origin=f"RS k={k} which=P"),
        SignedPoly(q, origin=f"RS k={k} which=Q"),
        k,
    )


# Deterministic Miller-Rabin: the first 13 primes are a valid witness set
# for every n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3317044064679887385961981


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    if n >= _MR_LIMIT:
        raise ResourceLimitError("deterministic primality test is only valid below 3.3e24")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _require_odd_prime(p: int) -> int:
    p = int(p)
    if p < 3 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    return p


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol ``(a/p)`` by Euler's criterion."""
    p = _require_odd_prime(p)
    a = int(a) % p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def fekete(p: int) -> SignedPoly:
    """Fekete polynomial ``sum_{k=1}^{p-1} (k/p) z^k``."""
    p = _require_odd_prime(p)
    c = np.zeros(p, dtype=np.int8)
    for k in range(1, p):
        c[k] = 1 if pow(k, (p - 1) // 2, p) == 1 else -1
    return SignedPoly(c, origin=f"FEKETE p={p}")


def signs_from_codes(codes: np.ndarray, length: int) -> np.ndarray:
    # bit j set <=> coefficient j is -1
    bits = (codes[:, None] >> np.arange(length, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def littlewood_enumerate(n: int, partition: Optional[tuple[int, int]] = None,
                         chunk: int = 4096) -> Iterator[SignedPoly]:
    """Yield every Littlewood polynomial of degree ``n``.

    Patterns are ordered by their bit code (bit ``j`` set means
    ``a_j = -1``).  ``partition=(index, count)`` with 0-based ``index``
    restricts the stream to one of ``count`` contiguous, disjoint slices.
    """
    if n < 0:
        raise DomainError("degree must be nonnegative")
    total = 1 << (n + 1)
    lo, hi = 0, total
    if partition is not None:
        index, count = partition
        if count < 1 or not 0 <= index < count:
            raise ValueError("partition index must lie in [0, count)")
        lo, hi = index * total // count, (index + 1) * total // count
    for start in range(lo, hi, chunk):
        codes = np.arange(start, min(hi, start + chunk), dtype=np.int64)
        for row in signs_from_codes(codes, n + 1):
            yield SignedPoly(row)


def make_rng(seed: int) -> np.random.Generator:
    """Project-wide generator: PCG64 seeded through ``SeedSequence``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def littlewood_sample(n: int, count: int, seed: int) -> Iterator[SignedPoly]:
    """Yield ``count`` i.i.d. uniform Littlewood polynomials of degree ``n``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = make_rng(seed)
    remaining = count
    while remaining:
        m = min(remaining, 4096)
        signs = (1 - 2 * rng.integers(0, 2, size=(m, n + 1), dtype=np.int8)).astype(np.int8)
        for row in signs:
            yield SignedPoly(row)
        remaining -= m


# ---------------------------------------------------------------------------
# text / JSON serialization

_SIGN_CHARS = {1: "+", -1: "-", 0: "0"}
_CHAR_SIGNS = {"+": 1, "-": -1, "0": 0, "−": -1}


def to_signs(f: SignedPoly) -> str:
    try:
        return "".join(_SIGN_CHARS[int(a)] for a in f.coeffs)
    except KeyError:
        raise ValueError("sign-string form needs coefficients in {-1, 0, 1}") from None


def from_signs(s: str) -> SignedPoly:
    try:
        return SignedPoly(np.array([_CHAR_SIGNS[ch] for ch in s.strip()], dtype=np.int8))
    except KeyError as exc:
        raise ValueError(f"bad sign character {exc.args[0]!r}") from None


def to_text(f: SignedPoly, symbolic: bool = True) -> str:
    """One-line serialization; symbolic form when the origin is known."""
    if symbolic and f.origin:
        return f.origin
    return f"LIT coeffs={to_signs(f)}"


def to_json(f: SignedPoly) -> str:
    return json.dumps(f.tolist(), separators=(",", ":"))


_RS_RE = re.compile(r"^RS\s+k=(\d+)\s+which=([PQ])$")
_FEKETE_RE = re.compile(r"^FEKETE\s+p=(\d+)$")
_LIT_RE = re.compile(r"^LIT\s+coeffs=(\S+)$")
_BARE_RE = re.compile(r"^[+\-0\u2212]+$")


def from_text(line: str) -> SignedPoly:
    """Parse a symbolic form, ``LIT coeffs=...``, a bare sign string or a JSON array."""
    s = line.strip()
    if s.startswith("["):
        return SignedPoly(np.array(json.loads(s), dtype=np.int64))
    m = _RS_RE.match(s)
    if m:
        pair = rudin_shapiro(int(m.group(1)))
        return pair.p if m.group(2) == "P" else pair.q
    m = _FEKETE_RE.match(s)
    if m:
        return fekete(int(m.group(1)))
    m = _LIT_RE.match(s)
    if m:
        return from_signs(m.group(1))
    if _BARE_RE.match(s):
        return from_signs(s)
    raise ValueError(f"unrecognized polynomial serialization: {line!r}")


def as_coeffs(f) -> np.ndarray:
    """Integer coefficient array (int64) for a SignedPoly or any int sequence."""
    if isinstance(f, SignedPoly):
        return f.coeffs.astype(np.int64)
    c = np.asarray(f)
    if c.dtype.kind == "f" and not np.all(c == np.round(c)):
        raise ValueError("coefficients must be integers")
    c = c.astype(np.int64)
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:1]


def coerce_poly(f) -> SignedPoly:
    if isinstance(f, SignedPoly):
        return f
    if isinstance(f, str):
        return from_text(f)
    return SignedPoly(np.asarray(f))


def littlewood_from_code(code: int, n: int) -> SignedPoly:
    return SignedPoly(signs_from_codes(np.array([code], dtype=np.int64), n + 1)[0])


def aperiodic_autocorrelation_exact(c: Sequence[int]) -> list[int]:
    """Exact aperiodic autocorrelation ``C(s) = sum_j a_j a_{j+s}`` for ``s >= 0``.

    Delegates to :func:`rsmahler.exact.autocorrelation`; kept here because
    it is the coefficient-level statement of the Golay property.
    """
    from .exact import autocorrelation

    return autocorrelation(np.asarray(c, dtype=np.int64)).tolist()
