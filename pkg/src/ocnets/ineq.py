"""Bit-streaming check of ``m*A + B >= n*C + D`` over binary naturals."""

from __future__ import annotations

from typing import NamedTuple, Sequence, Union

Bits = Sequence[int]
BinaryNat = Union[int, Bits, str]


def to_bits(x: BinaryNat) -> list[int]:
    """Little-endian bits. Strings are read as binary with ``0b`` prefix or MSB-first digits."""
    if isinstance(x, str):
        s = x.strip()
        x = int(s, 2) if not s.startswith("0b") else int(s[2:], 2)
    if isinstance(x, int):
        if x < 0:
            raise ValueError("negative operand")
        return [(x >> i) & 1 for i in range(x.bit_length())]
    bits = [int(b) for b in x]
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"not a bit sequence: {x!r}")
    return bits


def from_bits(bits: Bits) -> int:
    return sum(b << i for i, b in enumerate(bits))


def _pad(*xs: list[int]) -> list[list[int]]:
    n = max((len(x) for x in xs), default=0)
    return [x + [0] * (n - len(x)) for x in xs]


class StreamResult(NamedTuple):
    holds: bool
    max_scratch_bits: int
    operand_bits: int


def stream_check(m: BinaryNat, A: BinaryNat, B: BinaryNat, n: BinaryNat, C: BinaryNat, D: BinaryNat) -> StreamResult:
    """Compare ``m*A + B`` with ``n*C + D`` reading ``m`` and ``n`` from the low end.

    Two scratchpads start as ``B`` and ``D``. At step ``i`` the coefficient
    is added when bit ``i`` of the multiplier is set, then the lowest bit of
    each pad is settled and shifted out into the comparison flag, which only
    moves on a strict difference. Each pad stays below ``2 * 2**w`` where ``w``
    is the padded coefficient width.
    """
    mb, nb = _pad(to_bits(m), to_bits(n))
    Ab, Bb, Cb, Db = _pad(to_bits(A), to_bits(B), to_bits(C), to_bits(D))
    a, c = from_bits(Ab), from_bits(Cb)
    left, right = from_bits(Bb), from_bits(Db)
    out = 1
    peak = max(left.bit_length(), right.bit_length())

    def settle(x, y):
        nonlocal out
        if x < y:
            out = 0
        elif x > y:
            out = 1

    for bm, bn in zip(mb, nb):
        if bm:
            left += a
        if bn:
            right += c
        peak = max(peak, left.bit_length(), right.bit_length())
        settle(left & 1, right & 1)
        left >>= 1
        right >>= 1
    while left or right:
        settle(left & 1, right & 1)
        left >>= 1
        right >>= 1
    width = max(len(Ab), len(mb))  # padded widths: all coefficients share len(Ab), m and n share len(mb)
    return StreamResult(bool(out), peak, width)


def check_weighted_inequality(m: BinaryNat, A: BinaryNat, B: BinaryNat, n: BinaryNat, C: BinaryNat, D: BinaryNat) -> bool:
    return stream_check(m, A, B, n, C, D).holds


def geq(m: int, A: int, n: int, C: int, K: int) -> bool:
    """``m*A >= n*C + K`` for naturals ``m, n, A, C`` and any integer ``K``."""
    if A < 0 or C < 0:
        raise ValueError("coefficients must be non-negative")
    B, D = (0, K) if K >= 0 else (-K, 0)
    return check_weighted_inequality(m, A, B, n, C, D)
