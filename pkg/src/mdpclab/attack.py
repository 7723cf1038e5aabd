"""Simulated timing/score attack: accumulation, classification, reconstruction.

Each attack trial sends a weight-t error on the first half through the
instrumented decoder (against the zero codeword) and credits the observed
statistic — iteration count, or the first-iteration mean score of error-free
bits — to every distance present in the error's spectrum.  Per-distance
ratios then cluster into levels determined by the key spectrum Delta(h0)_d,
separated by a constant negative gap; classifying the levels recovers the
key's distance spectrum, and a backtracking search turns the spectrum back
into a sparse first row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import ring
from .qcmdpc import CodeParams, ErrorVector, KeyPair
from .ring import RingElement
from .spectrum import DistanceSpectrum, spectrum_of_support


class ReconstructFailure(Exception):
    """The backtracking search exhausted its options or its node budget."""


def sample_attack_error(params: CodeParams, seed) -> ErrorVector:
    """Uniform weight-t pattern on the first half, zero second half."""
    rng = np.random.default_rng(seed)
    bits = np.zeros(params.n, dtype=np.uint8)
    bits[rng.choice(params.k, size=params.t, replace=False)] = 1
    return ErrorVector(bits)


@dataclass
class AttackAccumulator:
    """Per-distance sums over trials whose error spectrum touches the distance.

    All fields are exact integer counts, so merging partial accumulators is
    associative and commutative and worker partitioning cannot change any
    result.  score0_sum[d] holds raw counter totals; the per-trial score0
    mean is that total divided by (n - t), recorded in score0_denom.
    """

    k: int
    trials: int = 0
    fails: int = 0
    score0_denom: int = 0
    observed: np.ndarray = None
    iter_sum: np.ndarray = None
    score0_sum: np.ndarray = None

    def __post_init__(self):
        size = self.k // 2 + 1
        if self.observed is None:
            self.observed = np.zeros(size, dtype=np.int64)
        if self.iter_sum is None:
            self.iter_sum = np.zeros(size, dtype=np.int64)
        if self.score0_sum is None:
            self.score0_sum = np.zeros(size, dtype=np.int64)

    def add_trial(self, error_spectrum: DistanceSpectrum, iterations: int,
                  score0_sum: int, failed: bool) -> None:
        hits = error_spectrum.nonzero_distances()
        self.observed[hits] += 1
        self.iter_sum[hits] += iterations
        self.score0_sum[hits] += score0_sum
        self.trials += 1
        self.fails += int(failed)

    def merge(self, other: "AttackAccumulator") -> "AttackAccumulator":
        if self.k != other.k:
            raise ring.DimensionMismatch("accumulator k mismatch")
        if self.score0_denom and other.score0_denom and self.score0_denom != other.score0_denom:
            raise ValueError("accumulators use different score denominators")
        return AttackAccumulator(
            k=self.k,
            trials=self.trials + other.trials,
            fails=self.fails + other.fails,
            score0_denom=self.score0_denom or other.score0_denom,
            observed=self.observed + other.observed,
            iter_sum=self.iter_sum + other.iter_sum,
            score0_sum=self.score0_sum + other.score0_sum,
        )

    def ratios(self, statistic: str = "score0") -> np.ndarray:
        """Per-distance mean statistic (float; NaN where never observed),
        indexed by distance 1..floor(k/2)."""
        if statistic == "iterations":
            num = self.iter_sum.astype(float)
            denom = self.observed.astype(float)
        elif statistic == "score0":
            num = self.score0_sum.astype(float)
            denom = self.observed.astype(float) * self.score0_denom
        else:
            raise ValueError(f"unknown statistic {statistic!r}")
        with np.errstate(invalid="ignore", divide="ignore"):
            out = num / denom
        return out[1:]

    def ratio_fraction(self, d: int, statistic: str = "score0") -> Fraction:
        """Exact per-distance ratio (observed[d] must be positive)."""
        if statistic == "iterations":
            return Fraction(int(self.iter_sum[d]), int(self.observed[d]))
        return Fraction(int(self.score0_sum[d]), int(self.observed[d]) * self.score0_denom)

    def standard_errors(self, statistic: str = "score0") -> np.ndarray:
        """Rough per-distance standard errors from the observation counts.

        Uses a single pooled spread estimate (the ratios' own scatter), which
        is honest enough for flagging under-sampled runs.
        """
        r = self.ratios(statistic)
        good = ~np.isnan(r)
        spread = float(np.nanstd(r)) if good.sum() > 1 else float("nan")
        with np.errstate(divide="ignore"):
            return spread / np.sqrt(self.observed[1:].astype(float))


@dataclass
class SpectrumEstimate:
    """Estimated Delta(h0) levels per distance plus classification margins."""

    levels: np.ndarray  # int64, index 0 unused, length floor(k/2) + 1
    confidence: np.ndarray  # float in [0, 1] per distance, same indexing
    k: int
    base: float = float("nan")  # fitted level-0 ratio
    gap: float = float("nan")  # fitted adjacent-level gap (signed)

    @property
    def total(self) -> int:
        return int(self.levels[1:].sum())

    def to_spectrum(self) -> DistanceSpectrum:
        return DistanceSpectrum(self.levels.copy(), self.k)


def run_timing_attack(key: KeyPair, params: CodeParams, trials: int,
                      statistic: str = "iterations", seed=0,
                      threads: int = 1) -> AttackAccumulator:
    """Run `trials` attack queries against the instrumented decoder and return
    the per-distance accumulator (both statistics are always accumulated; the
    `statistic` argument is validated here and chooses what callers read)."""
    from .campaign import run_campaign  # deferred: campaign builds on this module

    if statistic not in ("iterations", "score0"):
        raise ValueError(f"unknown statistic {statistic!r}")
    result = run_campaign(key, params, trials, seed, threads=threads,
                          keep_trials=False)
    return result.accumulator


def classify_spectrum(acc: AttackAccumulator, omega0: int,
                      statistic: str = "score0",
                      predicted_gap: float | None = None,
                      enforce_sum: bool = True) -> SpectrumEstimate:
    """Cluster the per-distance ratios into integer levels 0, 1, 2, ...

    Levels sit on a line base + level * gap with gap < 0 for the score0
    statistic (higher Delta(h0)_d pulls the mean score down).  The gap is
    seeded from the theory prediction when given, then refined by weighted
    least squares; assignment and refit alternate until stable.  With
    enforce_sum the levels are nudged (lowest-confidence distances first)
    until they total C(omega0, 2).
    """
    ratios = acc.ratios(statistic)
    if np.isnan(ratios).any():
        raise ValueError("classification requires every distance observed at least once")
    weights = acc.observed[1:].astype(float)
    k = acc.k

    if predicted_gap is None:
        # crude seed: assume the extreme ratios span the populated levels
        span = float(ratios.min() - ratios.max())
        predicted_gap = span / max(1, round(abs(span) / max(np.nanstd(ratios), 1e-12) / 2)) \
            if span != 0 else -1.0
    gap = float(predicted_gap)
    base = float(np.max(ratios) if gap < 0 else np.min(ratios))

    levels = np.zeros_like(ratios, dtype=np.int64)
    for _ in range(50):
        new_levels = np.rint((ratios - base) / gap).astype(np.int64)
        np.clip(new_levels, 0, None, out=new_levels)
        # refit base and gap by weighted least squares of ratio on level
        x = new_levels.astype(float)
        wsum = weights.sum()
        xm = np.average(x, weights=weights)
        ym = np.average(ratios, weights=weights)
        varx = np.average((x - xm) ** 2, weights=weights)
        if varx > 0:
            gap = float(np.average((x - xm) * (ratios - ym), weights=weights) / varx)
        base = float(ym - gap * xm)
        if np.array_equal(new_levels, levels):
            break
        levels = new_levels
    levels = np.rint((ratios - base) / gap).astype(np.int64)
    np.clip(levels, 0, None, out=levels)

    resid = (ratios - base) / gap - levels
    confidence = np.clip(1.0 - 2.0 * np.abs(resid), 0.0, 1.0)

    if enforce_sum:
        target = comb(omega0, 2)
        diff = target - int(levels.sum())
        step = 1 if diff > 0 else -1
        work = resid.copy()
        while diff != 0:
            # adjust the distance whose residual most supports moving a level
            # in the needed direction (never below level 0)
            cand = step * work
            if step < 0:
                cand = np.where(levels > 0, cand, -np.inf)
            d = int(np.argmax(cand))
            if not np.isfinite(cand[d]):
                break
            levels[d] += step
            work[d] -= step
            diff -= step

    full = np.zeros(k // 2 + 1, dtype=np.int64)
    full[1:] = levels
    conf_full = np.zeros(k // 2 + 1)
    conf_full[1:] = confidence
    return SpectrumEstimate(levels=full, confidence=conf_full, k=k, base=base, gap=gap)


def reconstruct_key(spec: SpectrumEstimate | DistanceSpectrum, params: CodeParams,
                    accept=None, node_budget: int = 5_000_000) -> RingElement:
    """Backtracking placement of omega0 set bits realizing a distance spectrum.

    Bit 0 is fixed (shift invariance); further bits are placed in increasing
    position order, decrementing the remaining multiset of distances and
    pruning any placement that overdraws a distance.  An optional accept
    callback filters spectrum-consistent candidates (e.g. consistency with
    the public key); the true key is recovered up to cyclic shift, and up to
    reversal when no callback distinguishes the orientation.
    """
    levels = spec.levels[1:] if isinstance(spec, SpectrumEstimate) else spec.counts[1:]
    k = spec.k
    omega0 = params.omega0
    if int(levels.sum()) != comb(omega0, 2):
        raise ValueError(
            f"spectrum sums to {int(levels.sum())}, expected C({omega0},2) = {comb(omega0, 2)}"
        )
    remaining = [0] + [int(c) for c in levels]
    allowed = sorted(d for d in range(1, k // 2 + 1) if remaining[d] > 0)
    chosen = [0]
    budget = [node_budget]
    half = k // 2

    def feasible(pos: int) -> list[int] | None:
        dists = []
        for c in chosen:
            delta = pos - c
            d = delta if delta <= half else k - delta
            if remaining[d] == 0:
                restore(dists)
                return None
            remaining[d] -= 1
            dists.append(d)
        return dists

    def restore(dists: list[int]) -> None:
        for d in dists:
            remaining[d] += 1

    def search() -> RingElement | None:
        if len(chosen) == omega0:
            h = RingElement.from_support(chosen, k)
            if accept is None or accept(h):
                return h
            return None
        # candidate positions: only those reachable from bit 0 by an allowed
        # distance, and beyond the last chosen position
        lo = chosen[-1] + 1
        for pos in range(lo, k):
            budget[0] -= 1
            if budget[0] < 0:
                raise ReconstructFailure("node budget exhausted")
            d0 = pos if pos <= half else k - pos
            if d0 not in allowed_set:
                continue
            dists = feasible(pos)
            if dists is None:
                continue
            chosen.append(pos)
            found = search()
            chosen.pop()
            restore(dists)
            if found is not None:
                return found
        return None

    allowed_set = set(allowed)
    if omega0 >= 2 and not allowed:
        raise ReconstructFailure("no distances available for a key of weight >= 2")
    result = search()
    if result is None:
        raise ReconstructFailure("no placement realizes the requested spectrum")
    return result


def verify_candidate(h: RingElement, q: RingElement, omega1: int) -> RingElement | None:
    """Check a candidate first row against the public key.

    A correct h (up to cyclic shift) satisfies h = q * h1 for a sparse h1,
    so invert(q) * h must have weight omega1; returns that h1 candidate, or
    None (including when q itself is not invertible, in which case no check
    is possible and the caller should fall back to spectrum consistency)."""
    try:
        q_inv = ring.invert(q)
    except ring.NotInvertible:
        return None
    h1_cand = q_inv * h
    if h1_cand.weight == omega1:
        return h1_cand
    return None
