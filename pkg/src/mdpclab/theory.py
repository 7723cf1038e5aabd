"""Closed-form score predictors, slope estimates, and the cluster-gap formula.

Everything here is exact rational arithmetic (fractions.Fraction over
math.comb big integers); floats only appear when callers render results.

The score of a bit is its number of unsatisfied adjacent parity checks.  Each
of the omega0 checks adjacent to a first-half bit is unsatisfied exactly when
an odd number of errors sits on the check's other taps, so per-check
probabilities are parity-restricted hypergeometric sums and a bit's expected
score is the sum over its checks.  The conditioning event A fixes one shared
distance between the error's spectrum and the key's spectrum, which pins two
of the key's set bits (the shared pair) and two error positions; the two
checks anchored at the shared pair behave differently (case 1) from the other
omega0 - 2 checks (case 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd


@dataclass(frozen=True)
class PredictorInput:
    """Parameter bundle for the predictors: block length, error weight, row weights."""

    k: int
    t: int
    omega0: int
    omega1: int

    def __post_init__(self):
        if not 0 < self.t < self.k:
            raise ValueError("need 0 < t < k")
        if not (0 < self.omega0 < self.k and 0 < self.omega1 < self.k):
            raise ValueError("need 0 < omega0, omega1 < k")

    @classmethod
    def from_params(cls, params) -> "PredictorInput":
        return cls(k=params.k, t=params.t, omega0=params.omega0, omega1=params.omega1)


@dataclass(frozen=True)
class SlopeEstimate:
    """Finite-difference slope: beta = E[score | A] - E[score]."""

    beta: Fraction
    baseline: Fraction
    conditional: Fraction

    @classmethod
    def from_expectations(cls, baseline: Fraction, conditional: Fraction) -> "SlopeEstimate":
        return cls(beta=conditional - baseline, baseline=baseline, conditional=conditional)


def hyper_parity_sum(N: int, K: int, n_draw: int, parity: str) -> Fraction:
    """P(number of marked items among n_draw draws from (N, K marked) has `parity`).

    Sum over m of the requested parity of C(K, m) C(N-K, n_draw-m) / C(N, n_draw).
    even-sum + odd-sum = 1 for every valid (N, K, n_draw).
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if not (0 <= K <= N and 0 <= n_draw <= N):
        raise ValueError(f"invalid hypergeometric domain N={N}, K={K}, n={n_draw}")
    start = 0 if parity == "even" else 1
    total = 0
    for m in range(start, min(K, n_draw) + 1, 2):
        if n_draw - m <= N - K:
            total += comb(K, m) * comb(N - K, n_draw - m)
    return Fraction(total, comb(N, n_draw))


# -- Score1: expected counter of an erroneous bit --------------------------


def predict_score1_base(p: PredictorInput) -> Fraction:
    """Unconditional E[score of an erroneous bit].

    Each of the omega0 adjacent checks sees the bit's own error plus omega0-1
    other taps among the k-1 remaining positions carrying t-1 errors; it is
    unsatisfied when those carry an even count.
    """
    return p.omega0 * hyper_parity_sum(p.k - 1, p.t - 1, p.omega0 - 1, "even")


def _score1_case1(p: PredictorInput) -> Fraction:
    """Per-check unsatisfied probability for the two checks anchored at the
    shared key pair: with probability 1/t the observed error is the pair's
    partner (the check then sees both pair errors), else it behaves as base."""
    k, t, w = p.k, p.t, p.omega0
    return Fraction(1, t) * hyper_parity_sum(k - 2, t - 2, w - 2, "odd") + Fraction(
        t - 1, t
    ) * hyper_parity_sum(k - 1, t - 1, w - 1, "even")


def _score1_case2(p: PredictorInput) -> Fraction:
    """Per-check probability for the omega0-2 generic checks: three-way split
    on what the check's tap at the shared-pair offset hits (the partner error,
    another error, or a zero), each with a conditional parity draw on the
    remaining omega0-3 taps."""
    k, t, w = p.k, p.t, p.omega0
    A = hyper_parity_sum(k - 3, t - 3, w - 3, "even")
    B = hyper_parity_sum(k - 3, t - 2, w - 3, "odd")
    C = hyper_parity_sum(k - 3, t - 1, w - 3, "even")
    return (
        Fraction(1, k - 1) * A
        + Fraction(t - 2, k - 1) * (Fraction(t - 3, k - 3) * A + Fraction(k - t, k - 3) * B)
        + Fraction(k - t, k - 1) * (Fraction(t - 2, k - 3) * B + Fraction(k - t - 1, k - 3) * C)
    )


def predict_score1_given_A(p: PredictorInput) -> Fraction:
    """E[score of an erroneous bit | the error spectrum shares a distance with
    the key spectrum]: two case-1 checks plus omega0-2 case-2 checks."""
    return 2 * _score1_case1(p) + (p.omega0 - 2) * _score1_case2(p)


def slope_score1(p: PredictorInput) -> SlopeEstimate:
    return SlopeEstimate.from_expectations(
        predict_score1_base(p), predict_score1_given_A(p)
    )


# -- Score0: expected counter of an error-free bit -------------------------


def predict_score0_first_base(p: PredictorInput) -> Fraction:
    """Unconditional E[score of an error-free first-half bit]: each check's
    omega0-1 other taps fall among k-1 positions carrying all t errors."""
    return p.omega0 * hyper_parity_sum(p.k - 1, p.t, p.omega0 - 1, "odd")


def _score0_case1(p: PredictorInput) -> Fraction:
    k, t, w = p.k, p.t, p.omega0
    return Fraction(t - 1, k - 2) * hyper_parity_sum(k - 2, t - 1, w - 2, "even") + Fraction(
        k - t - 1, k - 2
    ) * hyper_parity_sum(k - 2, t, w - 2, "odd")


def _score0_case2(p: PredictorInput) -> Fraction:
    k, t, w = p.k, p.t, p.omega0
    B = hyper_parity_sum(k - 3, t - 2, w - 3, "odd")
    C = hyper_parity_sum(k - 3, t - 1, w - 3, "even")
    D = hyper_parity_sum(k - 3, t, w - 3, "odd")
    return (
        Fraction(t - 1, k - 1) * (Fraction(t - 2, k - 3) * B + Fraction(k - t - 1, k - 3) * C)
        + Fraction(1, k - 1) * B
        + Fraction(k - t - 1, k - 1) * (Fraction(t - 1, k - 3) * C + Fraction(k - t - 2, k - 3) * D)
    )


def predict_score0_first_given_A(p: PredictorInput) -> Fraction:
    return 2 * _score0_case1(p) + (p.omega0 - 2) * _score0_case2(p)


def slope_score0(p: PredictorInput) -> SlopeEstimate:
    return SlopeEstimate.from_expectations(
        predict_score0_first_base(p), predict_score0_first_given_A(p)
    )


def predict_score0_second(p: PredictorInput) -> Fraction:
    """Exact E[score of a second-half bit] for first-half-only errors.

    With no errors in the second half, a second-half bit never influences its
    checks, each of which is unsatisfied iff its omega0 first-half taps catch
    an odd number of the t errors.
    """
    return p.omega1 * hyper_parity_sum(p.k, p.t, p.omega0, "odd")


def predict_score0_combined(p: PredictorInput) -> Fraction:
    """Both-halves mean score of error-free bits, using the standard
    second-half approximation E_second ~ omega1 (k-t) / (omega0 k) * E_first;
    with omega0 = omega1 and t << k this collapses toward E_first."""
    e_first = predict_score0_first_base(p)
    k, t = p.k, p.t
    return e_first * Fraction((k - t) * (p.omega0 + p.omega1), (2 * k - t) * p.omega0)


def predict_score0_combined_exact(p: PredictorInput) -> Fraction:
    """Same mixture weights with the exact second-half expectation."""
    k, t = p.k, p.t
    return Fraction(k - t, 2 * k - t) * predict_score0_first_base(p) + Fraction(
        k, 2 * k - t
    ) * predict_score0_second(p)


# -- conditional spectrum shift and cluster gap ----------------------------


def _cycle_independent_sets(m: int, j: int) -> int:
    """Number of j-subsets of an m-cycle with no two adjacent (m >= 2)."""
    if j == 0:
        return 1
    if j > m // 2:
        return 0
    return m * comb(m - j, j) // (m - j)


def spectrum_shift_exact(k: int, t: int) -> Fraction:
    """E[De_d | De_d != 0] - E[De_d] for uniform weight-t errors, averaged
    over distances d.

    E[De_d] = C(t,2) / floor(k/2) for every d.  P(De_d = 0) counts t-subsets
    avoiding distance d, i.e. independent sets in the circulant graph whose
    components are gcd(d, k) cycles of length k / gcd(d, k).
    """
    D = k // 2
    e_uncond = Fraction(comb(t, 2), D)
    total_sets = comb(k, t)
    p_zero_by_gcd: dict[int, Fraction] = {}
    shift_sum = Fraction(0)
    for d in range(1, D + 1):
        g = gcd(d, k)
        if g not in p_zero_by_gcd:
            m = k // g
            # coefficients above t never matter, so truncate the tables there
            single = [_cycle_independent_sets(m, j) for j in range(min(m // 2, t) + 1)]
            poly = [1]
            for _ in range(g):
                new = [0] * min(len(poly) + len(single) - 1, t + 1)
                for i, a in enumerate(poly):
                    if a == 0:
                        continue
                    for j, b in enumerate(single):
                        if i + j > t:
                            break
                        new[i + j] += a * b
                poly = new
            avoiding = poly[t] if t < len(poly) else 0
            p_zero_by_gcd[g] = Fraction(avoiding, total_sets)
        p_zero = p_zero_by_gcd[g]
        shift_sum += e_uncond / (1 - p_zero) - e_uncond
    return shift_sum / D


def predict_cluster_gap(slope, spectrum_shift):
    """Adjacent-level gap of the attack output: slope times the conditional
    spectrum shift of the error distribution."""
    return slope * spectrum_shift


def predictor_table(p: PredictorInput) -> dict:
    """All headline predictor values for one parameter point (floats for display)."""
    s1 = slope_score1(p)
    s0 = slope_score0(p)
    shift = spectrum_shift_exact(p.k, p.t)
    gap = predict_cluster_gap(s0.beta, shift)
    return {
        "score1_base": float(s1.baseline),
        "score1_given_A": float(s1.conditional),
        "beta1": float(s1.beta),
        "score0_first_base": float(s0.baseline),
        "score0_first_given_A": float(s0.conditional),
        "beta0": float(s0.beta),
        "score0_combined": float(predict_score0_combined(p)),
        "spectrum_shift": float(shift),
        "predicted_gap": float(gap),
    }
