"""Small exact-arithmetic helpers used throughout the package."""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def pow2(n: int) -> Fraction:
    """2**(-n) as an exact rational, for n >= 0."""
    if n < 0:
        raise ValueError("negative length")
    return Fraction(1, 1 << n)


def floor_log2(n: int) -> int:
    if n <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    return n.bit_length() - 1


def is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def least_length(v: Fraction) -> int:
    """Least r >= 0 with 2**(-r) <= v, for a positive rational v <= 1."""
    if v <= 0:
        raise ValueError("least_length needs a positive value")
    r = 0
    while pow2(r) > v:
        r += 1
    return r


def cantor_pair(x: int, i: int) -> int:
    """Monotone pairing with pair(x, i) >= x; the default change-set pairing."""
    s = x + i
    return s * (s + 1) // 2 + x


def cantor_unpair(p: int) -> tuple[int, int]:
    m = 0
    while (m + 1) * (m + 2) // 2 <= p:
        m += 1
    x = p - m * (m + 1) // 2
    return x, m - x


def triple_pair(e: int, v: int, m: int) -> int:
    """Iterated Cantor pairing of a triple."""
    return cantor_pair(cantor_pair(e, v), m)


def bits_to_nat(bits: str) -> int:
    """Standard length-lexicographic coding of binary strings into naturals."""
    if bits and set(bits) - {"0", "1"}:
        raise ValueError("not a bit string")
    return int("1" + bits, 2) - 1


def nat_to_bits(n: int) -> str:
    if n < 0:
        raise ValueError("negative code")
    return bin(n + 1)[3:]


def drop_trailing_zeros(bits: str) -> str:
    """Longest prefix ending in 1 (empty if the string has no 1)."""
    i = bits.rfind("1")
    return bits[: i + 1]


class Fenwick:
    """Integer Fenwick tree: point updates, prefix sums. Exact by construction."""

    __slots__ = ("_n", "_a")

    def __init__(self, n: int):
        self._n = n
        self._a = [0] * (n + 1)

    def add(self, i: int, delta: int) -> None:
        i += 1
        while i <= self._n:
            self._a[i] += delta
            i += i & (-i)

    def prefix(self, i: int) -> int:
        """Sum of values at positions 0..i inclusive."""
        if i < 0:
            return 0
        i = min(i, self._n - 1) + 1
        total = 0
        while i > 0:
            total += self._a[i]
            i -= i & (-i)
        return total
