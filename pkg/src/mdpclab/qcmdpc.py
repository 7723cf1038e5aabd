"""QC-MDPC McEliece: parameters, key generation, encryption, decryption.

The code is defined by [n, k, omega, t] with n = 2k.  The secret key is a pair
of sparse ring elements (h0, h1) of total weight omega with h1 invertible; the
public key is the single ring element q = h0 * h1^{-1}, the generator being
G = [I | circ(q)].  The convention used throughout the repo:

    syndrome(c) = h0 * c0 + h1 * c1        (ring products)
    encrypt(m)  = [m | m * q] + e

which makes the codeword identity h0*m + h1*(m*q) = 0 automatic.  The dense
GF(2) matrix realization of this convention (parity-check blocks are the
transposes of circ(h0), circ(h1)) is pinned down by oracle tests at small k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import ceil, floor

import numpy as np

from . import ring
from .ring import RingElement


class KeygenFailure(Exception):
    """Retry budget exhausted without finding an invertible h1."""


@dataclass(frozen=True)
class CodeParams:
    """Public code parameters plus the decoder configuration.

    thresholds[i] is the flip threshold of iteration i; its length must equal
    max_iters so that a mis-sized vector is a loud configuration error rather
    than something silently padded.
    """

    n: int
    k: int
    omega: int
    t: int
    thresholds: tuple[int, ...]
    max_iters: int

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(int(b) for b in self.thresholds))
        if self.n != 2 * self.k:
            raise ValueError(f"n must equal 2k (got n={self.n}, k={self.k})")
        if not 0 < self.omega < self.k:
            raise ValueError("omega must satisfy 0 < omega < k")
        if not 0 < self.t < self.k:
            raise ValueError("t must satisfy 0 < t < k")
        if self.max_iters <= 0:
            raise ValueError("max_iters must be positive")
        if len(self.thresholds) != self.max_iters:
            raise ValueError(
                f"thresholds length {len(self.thresholds)} != max_iters {self.max_iters}"
            )
        if any(not 0 < b <= self.omega for b in self.thresholds):
            raise ValueError("every threshold must lie in (0, omega]")

    @property
    def omega0(self) -> int:
        return ceil(self.omega / 2)

    @property
    def omega1(self) -> int:
        return floor(self.omega / 2)


@dataclass(frozen=True)
class KeyPair:
    """Secret sparse rows h0, h1 and the public row q = h0 * h1^{-1}."""

    h0: RingElement
    h1: RingElement
    q: RingElement

    @property
    def k(self) -> int:
        return self.h0.k

    @property
    def omega0(self) -> int:
        return self.h0.weight

    @property
    def omega1(self) -> int:
        return self.h1.weight


@dataclass(frozen=True)
class ErrorVector:
    """A length-n error pattern; attack errors live entirely in the first half."""

    bits: np.ndarray  # uint8, length n

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    @property
    def n(self) -> int:
        return len(self.bits)

    def first_half(self) -> np.ndarray:
        return self.bits[: self.n // 2]

    def second_half(self) -> np.ndarray:
        return self.bits[self.n // 2 :]


def random_error(params: CodeParams, rng: np.random.Generator,
                 half_only: bool = False) -> ErrorVector:
    """Uniform weight-t error; with half_only the support stays in the first half."""
    bits = np.zeros(params.n, dtype=np.uint8)
    span = params.k if half_only else params.n
    bits[rng.choice(span, size=params.t, replace=False)] = 1
    return ErrorVector(bits)


def keygen(params: CodeParams, seed, max_attempts: int = 100) -> KeyPair:
    """Draw sparse (h0, h1) until h1 is invertible; deterministic per seed.

    Weight split: ceil(omega/2) to h0, floor(omega/2) to h1.
    """
    rng = np.random.default_rng(seed)
    k = params.k
    for _ in range(max_attempts):
        h0 = RingElement.from_support(rng.choice(k, size=params.omega0, replace=False), k)
        h1 = RingElement.from_support(rng.choice(k, size=params.omega1, replace=False), k)
        try:
            h1_inv = ring.invert(h1)
        except ring.NotInvertible:
            continue
        return KeyPair(h0=h0, h1=h1, q=h0 * h1_inv)
    raise KeygenFailure(f"no invertible h1 found in {max_attempts} attempts")


def encrypt(m: np.ndarray, q: RingElement, e: ErrorVector) -> np.ndarray:
    """Ciphertext [m | m*q] XOR e."""
    k = q.k
    m = np.asarray(m, dtype=np.uint8)
    if len(m) != k:
        raise ring.DimensionMismatch(f"message length {len(m)} != k {k}")
    if e.n != 2 * k:
        raise ring.DimensionMismatch(f"error length {e.n} != n {2 * k}")
    redundancy = (RingElement.from_array(m, k) * q).to_array()
    return np.concatenate([m, redundancy]) ^ e.bits


def syndrome(c: np.ndarray, key: KeyPair) -> RingElement:
    """s = h0*c0 + h1*c1; zero exactly when c is a codeword."""
    c = np.asarray(c, dtype=np.uint8)
    k = key.k
    if len(c) != 2 * k:
        raise ring.DimensionMismatch(f"word length {len(c)} != n {2 * k}")
    c0 = RingElement.from_array(c[:k], k)
    c1 = RingElement.from_array(c[k:], k)
    return key.h0 * c0 + key.h1 * c1


@dataclass(frozen=True)
class DecodeFailure:
    """The decoder's failure symbol; carries the outcome for inspection."""

    outcome: object = None


def decrypt(c: np.ndarray, key: KeyPair, params: CodeParams):
    """Bit-flip decode, then return the first k bits, or a DecodeFailure value."""
    from .decoder import decode  # deferred: decoder depends on this module

    outcome = decode(np.asarray(c, dtype=np.uint8), key, params)
    if not outcome.success:
        return DecodeFailure(outcome)
    return outcome.final_word[: params.k].copy()


# -- key file I/O ----------------------------------------------------------


def save_key(path, key: KeyPair, params: CodeParams) -> None:
    """JSON key file: sparse h0/h1 as sorted indices, dense q as hex."""
    nbytes = (key.k + 7) // 8
    obj = {
        "params": {"n": params.n, "k": params.k, "omega": params.omega, "t": params.t},
        "h0": [int(i) for i in key.h0.support()],
        "h1": [int(i) for i in key.h1.support()],
        "q_hex": key.q.bits.to_bytes(nbytes, "little").hex(),
    }
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def load_key(path) -> tuple[KeyPair, dict]:
    """Load a key file; verifies the q = h0 * h1^{-1} identity."""
    with open(path) as fh:
        obj = json.load(fh)
    k = int(obj["params"]["k"])
    h0 = RingElement.from_support(obj["h0"], k)
    h1 = RingElement.from_support(obj["h1"], k)
    q = RingElement(int.from_bytes(bytes.fromhex(obj["q_hex"]), "little"), k)
    if q * h1 != h0:
        raise ValueError(f"inconsistent key file {path}: q * h1 != h0")
    return KeyPair(h0=h0, h1=h1, q=q), obj["params"]
