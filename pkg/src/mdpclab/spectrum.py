"""Distance spectra of sparse vectors and the overlap statistic theta.

The distance between two set bits i, j on a length-k cyclic block is
min(|i-j|, k - |i-j|), so distances range over 1..floor(k/2).  The spectrum
of a weight-w vector counts its C(w, 2) unordered set-bit pairs by distance;
theta is the dot product of two spectra and measures how many distances they
share, with multiplicity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ring import DimensionMismatch, RingElement


def distance(i: int, j: int, k: int) -> int:
    """Cyclic distance between positions i != j on a length-k block."""
    if not (0 <= i < k and 0 <= j < k):
        raise ValueError(f"positions must lie in [0, {k})")
    if i == j:
        raise ValueError("distance requires two distinct positions")
    d = abs(i - j)
    return min(d, k - d)


@dataclass(frozen=True)
class DistanceSpectrum:
    """counts[d] = number of set-bit pairs at cyclic distance d (index 0 unused)."""

    counts: np.ndarray  # int64, length floor(k/2) + 1
    k: int

    def __post_init__(self):
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))
        if len(self.counts) != self.k // 2 + 1:
            raise ValueError("counts must have length floor(k/2) + 1")
        if self.counts[0] != 0:
            raise ValueError("distance 0 is not a thing")

    @property
    def max_distance(self) -> int:
        return self.k // 2

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DistanceSpectrum)
            and self.k == other.k
            and np.array_equal(self.counts, other.counts)
        )

    def nonzero_distances(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    def to_json(self) -> str:
        """Sparse map {distance: count} plus k."""
        entries = {str(int(d)): int(self.counts[d]) for d in self.nonzero_distances()}
        return json.dumps({"k": self.k, "counts": entries})

    @classmethod
    def from_json(cls, text: str) -> "DistanceSpectrum":
        obj = json.loads(text)
        k = int(obj["k"])
        counts = np.zeros(k // 2 + 1, dtype=np.int64)
        for d, c in obj["counts"].items():
            counts[int(d)] = int(c)
        return cls(counts, k)


def spectrum_of_support(support, k: int) -> DistanceSpectrum:
    """Spectrum from set-bit positions; vectors of weight <= 1 have no pairs."""
    supp = np.asarray(support, dtype=np.int64)
    counts = np.zeros(k // 2 + 1, dtype=np.int64)
    if len(supp) >= 2:
        d = np.abs(supp[:, None] - supp[None, :])
        d = np.minimum(d, k - d)
        iu = np.triu_indices(len(supp), 1)
        counts = np.bincount(d[iu], minlength=k // 2 + 1)
    return DistanceSpectrum(counts, k)


def spectrum(v: RingElement) -> DistanceSpectrum:
    return spectrum_of_support(v.support(), v.k)


def theta(dh: DistanceSpectrum, de: DistanceSpectrum) -> int:
    """Overlap level Delta(h) . Delta(e)."""
    if dh.k != de.k:
        raise DimensionMismatch(f"k mismatch: {dh.k} != {de.k}")
    return int(np.dot(dh.counts, de.counts))
