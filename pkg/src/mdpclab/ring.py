"""Arithmetic in the ring GF(2)[x]/(x^k - 1).

Elements are binary polynomials of degree < k stored as plain Python ints
(bit i = coefficient of x^i), which makes addition a single XOR and cyclic
shifts two shifts and an OR.  A RingElement stands in for the full k x k
circulant matrix it generates, so circulant-by-circulant products never
materialize a matrix.

Multiplication iterates over the set bits of the sparser operand (the vectors
of interest here have weight ~ omega/2 << k).  Inversion runs the extended
Euclidean algorithm on (a(x), x^k - 1); elements of even weight are divisible
by x + 1 and therefore never invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionMismatch(ValueError):
    """Operands live in rings with different k."""


class NotInvertible(Exception):
    """gcd(a(x), x^k - 1) != 1, so a has no inverse in the ring."""


@dataclass(frozen=True)
class RingElement:
    """A residue in GF(2)[x]/(x^k - 1), bit i of `bits` = coefficient of x^i."""

    bits: int
    k: int

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("block length k must be positive")
        if self.bits < 0 or self.bits >> self.k:
            raise ValueError("coefficient word does not fit in k bits")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_support(cls, support, k: int) -> "RingElement":
        bits = 0
        for i in support:
            i = int(i) % k
            bits |= 1 << i
        return cls(bits, k)

    @classmethod
    def from_array(cls, arr, k: int | None = None) -> "RingElement":
        arr = np.asarray(arr)
        if k is None:
            k = len(arr)
        bits = 0
        for i in np.flatnonzero(arr):
            bits |= 1 << int(i)
        return cls(bits, k)

    # -- views -------------------------------------------------------------

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> np.ndarray:
        """Sorted indices of set coefficients."""
        out = []
        b = self.bits
        while b:
            lsb = b & -b
            out.append(lsb.bit_length() - 1)
            b ^= lsb
        return np.array(out, dtype=np.int64)

    def to_array(self) -> np.ndarray:
        arr = np.zeros(self.k, dtype=np.uint8)
        arr[self.support()] = 1
        return arr

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "RingElement"):
        if self.k != other.k:
            raise DimensionMismatch(f"k mismatch: {self.k} != {other.k}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        return RingElement(self.bits ^ other.bits, self.k)

    def shift(self, r: int) -> "RingElement":
        """Multiply by x^r (cyclic left rotation of the coefficient word)."""
        k = self.k
        r %= k
        if r == 0:
            return self
        mask = (1 << k) - 1
        return RingElement(((self.bits << r) | (self.bits >> (k - r))) & mask, k)

    def __mul__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        # accumulate shifts of the denser operand over the sparser support
        a, b = (self, other) if self.weight <= other.weight else (other, self)
        k = self.k
        mask = (1 << k) - 1
        acc = 0
        bits = a.bits
        other_bits = b.bits
        while bits:
            lsb = bits & -bits
            r = lsb.bit_length() - 1
            if r:
                acc ^= ((other_bits << r) | (other_bits >> (k - r))) & mask
            else:
                acc ^= other_bits
            bits ^= lsb
        return RingElement(acc, k)

    def reverse(self) -> "RingElement":
        """The image under x -> x^{-1} (index negation mod k)."""
        return RingElement.from_support([(-i) % self.k for i in self.support()], self.k)


def zero(k: int) -> RingElement:
    return RingElement(0, k)


def unit(k: int) -> RingElement:
    return RingElement(1, k)


def add(a: RingElement, b: RingElement) -> RingElement:
    return a + b


def mul(a: RingElement, b: RingElement) -> RingElement:
    return a * b


# -- inversion via extended Euclid on plain (non-cyclic) GF(2) polynomials --


def _poly_mul(a: int, b: int) -> int:
    r = 0
    while b:
        lsb = b & -b
        r ^= a << (lsb.bit_length() - 1)
        b ^= lsb
    return r


def _poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        sh = a.bit_length() - db
        q ^= 1 << sh
        a ^= b << sh
    return q, a


def invert(a: RingElement) -> RingElement:
    """Inverse of a modulo x^k - 1, or raise NotInvertible.

    Extended Euclid on (x^k + 1, a(x)); over GF(2) the modulus x^k - 1 and
    x^k + 1 coincide.
    """
    k = a.k
    if a.bits == 0:
        raise NotInvertible("zero element")
    modulus = (1 << k) | 1
    r0, r1 = modulus, a.bits
    t0, t1 = 0, 1
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, t0 ^ _poly_mul(q, t1)
    if r0 != 1:
        raise NotInvertible("gcd(a, x^k - 1) != 1")
    inv = _poly_divmod(t0, modulus)[1]
    return RingElement(inv, k)
