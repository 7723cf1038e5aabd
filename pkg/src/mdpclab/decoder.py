"""Instrumented hard-decision bit-flipping decoder.

Each iteration computes, for every bit, the number of unsatisfied parity
checks touching it (its counter), flips all bits whose counter reaches the
iteration's threshold simultaneously (counters always come from the pre-flip
word), and recomputes the syndrome.  Success means the syndrome reached zero
within max_iters iterations; failure is an ordinary return value.

When the true error pattern is supplied the decoder also reports first-
iteration observables: how many erroneous bits got corrected (err_crt), how
many error-free bits got flipped (err_gen), and the exact integer counter
sums over erroneous / error-free bits from which the score means derive.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .qcmdpc import CodeParams, ErrorVector, KeyPair


@dataclass(frozen=True)
class FirstLayerStats:
    """First-iteration observables, kept as exact integer sums.

    score1_sum / score0_sum are the total counters over erroneous resp.
    error-free bits before any flip; dividing by the population sizes gives
    the score means as exact rationals, so aggregation across trials is
    order-independent.
    """

    err_crt: int
    err_gen: int
    score1_sum: int
    score0_sum: int
    n_err: int
    n_ok: int
    counters_hist: tuple | None = None

    @property
    def score1_mean(self) -> Fraction:
        return Fraction(self.score1_sum, self.n_err) if self.n_err else Fraction(0)

    @property
    def score0_mean(self) -> Fraction:
        return Fraction(self.score0_sum, self.n_ok) if self.n_ok else Fraction(0)


@dataclass(frozen=True)
class DecodeOutcome:
    success: bool
    iterations: int
    first_layer: FirstLayerStats | None
    final_word: np.ndarray


class DecoderTables:
    """Per-key scratch for fast syndrome/counter evaluation.

    syndrome bit r collects word0[(r - p) % k] over p in supp(h0) (and the
    h1 analogue on the second half); the counter of bit i collects
    s[(i + p) % k] over the matching support.  Both are circular
    correlations, evaluated as sums of rotated copies via pairs of
    contiguous slice operations (far faster than fancy-index gathers).
    """

    def __init__(self, key: KeyPair):
        k = key.k
        self.k = k
        self.h0_support = key.h0.support()
        self.h1_support = key.h1.support()

    def _accumulate_rotations(self, out: np.ndarray, src: np.ndarray,
                              shifts: np.ndarray, sign: int) -> None:
        """out += sum over p in shifts of src rotated by sign*p (cyclically)."""
        k = self.k
        for p in shifts:
            p = int(p) % k
            if sign > 0:
                # out[i] += src[(i + p) % k]
                out[: k - p] += src[p:]
                if p:
                    out[k - p :] += src[:p]
            else:
                # out[i] += src[(i - p) % k]
                out[p:] += src[: k - p]
                if p:
                    out[:p] += src[k - p :]

    def syndrome_bits(self, word: np.ndarray) -> np.ndarray:
        acc = np.zeros(self.k, dtype=np.uint16)
        self._accumulate_rotations(acc, word[: self.k], self.h0_support, -1)
        self._accumulate_rotations(acc, word[self.k :], self.h1_support, -1)
        np.bitwise_and(acc, 1, out=acc)
        return acc.astype(np.uint8)

    def syndrome_of_support(self, supp: np.ndarray) -> np.ndarray:
        """Syndrome of a sparse word given as absolute positions in [0, n)."""
        k = self.k
        first = supp[supp < k]
        second = supp[supp >= k] - k
        hits = []
        if len(first):
            hits.append(((first[:, None] + self.h0_support[None, :]) % k).ravel())
        if len(second):
            hits.append(((second[:, None] + self.h1_support[None, :]) % k).ravel())
        if not hits:
            return np.zeros(k, dtype=np.uint8)
        return (np.bincount(np.concatenate(hits), minlength=k) & 1).astype(np.uint8)

    def counters(self, s: np.ndarray) -> np.ndarray:
        k = self.k
        cnt = np.zeros(2 * k, dtype=np.uint16)
        self._accumulate_rotations(cnt[:k], s, self.h0_support, 1)
        self._accumulate_rotations(cnt[k:], s, self.h1_support, 1)
        return cnt


def bit_counters(c: np.ndarray, key: KeyPair,
                 tables: DecoderTables | None = None) -> np.ndarray:
    """Unsatisfied-check counters of every bit of c (length-n integer vector)."""
    if tables is None:
        tables = DecoderTables(key)
    word = np.asarray(c, dtype=np.uint8)
    return tables.counters(tables.syndrome_bits(word))


def _first_layer(counters: np.ndarray, flips: np.ndarray, err_idx: np.ndarray,
                 collect_hist: bool) -> FirstLayerStats:
    n_err = len(err_idx)
    hist = None
    if collect_hist:
        hist = tuple(np.bincount(counters).tolist())
    err_crt = int(flips[err_idx].sum())
    score1_sum = int(counters[err_idx].sum())
    return FirstLayerStats(
        err_crt=err_crt,
        err_gen=int(flips.sum()) - err_crt,
        score1_sum=score1_sum,
        score0_sum=int(counters.sum()) - score1_sum,
        n_err=n_err,
        n_ok=len(counters) - n_err,
        counters_hist=hist,
    )


def decode(c: np.ndarray, key: KeyPair, params: CodeParams,
           truth: ErrorVector | None = None, tables: DecoderTables | None = None,
           strict_threshold: bool = False, incremental: bool = False,
           collect_hist: bool = False) -> DecodeOutcome:
    """Run the bit-flipping loop on c; pure function of its inputs.

    truth, when given, is the planted error pattern; first-layer stats are
    measured against it before the first flip.  The flip rule is
    counter >= threshold (counter > threshold with strict_threshold).
    incremental=True updates the syndrome from the flipped set instead of
    recomputing it from the whole word; both paths are exactly equivalent.
    """
    if tables is None:
        tables = DecoderTables(key)
    word = np.array(c, dtype=np.uint8, copy=True)
    err_idx = None
    if truth is not None:
        err_idx = np.flatnonzero(truth.bits)
    first_layer = None
    support = np.flatnonzero(word)
    if len(support) <= tables.k // 4:
        # sparse words (the attack always decodes weight-t errors directly)
        s = tables.syndrome_of_support(support)
    else:
        s = tables.syndrome_bits(word)
    iterations = 0
    for it in range(params.max_iters):
        if not s.any():
            break
        counters = tables.counters(s)
        if strict_threshold:
            flips = counters > params.thresholds[it]
        else:
            flips = counters >= params.thresholds[it]
        if it == 0 and err_idx is not None:
            first_layer = _first_layer(counters, flips, err_idx, collect_hist)
        word[flips] ^= 1
        if incremental:
            s = s ^ tables.syndrome_of_support(np.flatnonzero(flips))
        else:
            s = tables.syndrome_bits(word)
        iterations = it + 1
    success = not s.any()
    if first_layer is None and err_idx is not None:
        # syndrome was zero on entry: nothing flipped, all-zero stats
        first_layer = FirstLayerStats(0, 0, 0, 0, len(err_idx), len(word) - len(err_idx))
    return DecodeOutcome(
        success=success,
        iterations=iterations,
        first_layer=first_layer,
        final_word=word,
    )
