"""Exact integer correlations by Kronecker substitution.

A coefficient vector is packed into one big integer in base 2**32,
products are taken with GMP, and the digits are read back.  No floating
point is involved anywhere.
"""

from __future__ import annotations

from typing import Sequence

import gmpy2
import numpy as np

_DIGIT_BITS = 32
_HALF = 1 << (_DIGIT_BITS - 1)


def _pack(a: np.ndarray) -> "gmpy2.mpz":
    a = np.asarray(a, dtype=np.int64)
    if a.size and np.abs(a).max() >= _HALF:
        raise OverflowError("coefficient too large for 32-bit packing")
    pos = np.where(a > 0, a, 0).astype("<u4").tobytes()
    neg = np.where(a < 0, -a, 0).astype("<u4").tobytes()
    return gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(int.from_bytes(neg, "little"))


def _unpack(value: "gmpy2.mpz", length: int) -> np.ndarray:
    bias = int.from_bytes(np.full(length, _HALF, dtype="<u4").tobytes(), "little")
    shifted = int(value + bias)
    if shifted < 0 or shifted.bit_length() > length * _DIGIT_BITS:
        raise OverflowError("packed product left the representable range")
    digits = np.frombuffer(shifted.to_bytes(length * 4, "little"), dtype="<u4")
    return digits.astype(np.int64) - _HALF


def correlation_sum(seqs: Sequence[np.ndarray]) -> np.ndarray:
    """Return ``sum_i autocorr(seqs[i])`` at shifts ``0 .. L-1``.

    All sequences must share the same length ``L``.
    """
    seqs = [np.asarray(s, dtype=np.int64) for s in seqs]
    L = len(seqs[0])
    if any(len(s) != L for s in seqs):
        raise ValueError("sequences must have equal length")
    bound = sum(int(np.abs(s).sum()) * int(np.abs(s).max(initial=0)) for s in seqs)
    if bound >= _HALF:
        raise OverflowError("correlation values would overflow 32-bit digits")
    total = gmpy2.mpz(0)
    for s in seqs:
        total += _pack(s) * _pack(s[::-1])
    full = _unpack(total, 2 * L - 1)
    # coefficient of x^(L-1-s) is the correlation at shift s
    return full[L - 1::-1].copy()


def autocorrelation(a: np.ndarray) -> np.ndarray:
    return correlation_sum([a])


def golay_defect(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, int]:
    """Summed autocorrelation of ``(p, q)`` and the index of its worst nonzero shift.

    The pair is complementary iff every entry past shift 0 is zero; the
    returned index is 0 in that case.
    """
    c = correlation_sum([p, q])
    tail = np.abs(c[1:])
    worst = int(np.argmax(tail)) + 1 if tail.size and tail.max() > 0 else 0
    return c, worst
