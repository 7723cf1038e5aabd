"""Monte-Carlo campaign runner: many attack-style decodes, reproducibly.

Trial i draws its error from a Generator seeded with SeedSequence
([master_seed, i]), so any chunking of the trial range across worker
processes reproduces the same per-trial data; all aggregation uses exact
integer sums, making the results bit-identical for every thread count.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .attack import AttackAccumulator
from .decoder import DecoderTables, decode
from .qcmdpc import CodeParams, ErrorVector, KeyPair
from .spectrum import spectrum, spectrum_of_support, theta

CHUNK = 1024

TRACE_COLUMNS = ["seed", "theta", "score0_mean", "score1_mean",
                 "err_crt", "err_gen", "iterations", "success"]


@dataclass
class CampaignResult:
    """Per-trial arrays (empty when keep_trials=False) plus the accumulator."""

    params: CodeParams
    trials: int
    master_seed: int
    accumulator: AttackAccumulator
    theta: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    err_crt: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    err_gen: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    score1_sum: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    score0_sum: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    iterations: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    success: np.ndarray = field(default_factory=lambda: np.empty(0, bool))

    @property
    def score1_means(self) -> np.ndarray:
        return self.score1_sum / self.params.t

    @property
    def score0_means(self) -> np.ndarray:
        return self.score0_sum / (self.params.n - self.params.t)

    @property
    def failures(self) -> int:
        return self.accumulator.fails


def _run_chunk(key: KeyPair, params: CodeParams, master_seed: int,
               start: int, count: int, keep_trials: bool):
    tables = DecoderTables(key)
    dh = spectrum(key.h0)
    acc = AttackAccumulator(k=params.k, score0_denom=params.n - params.t)
    rows = np.zeros((6, count), dtype=np.int64) if keep_trials else None
    ok = np.zeros(count, dtype=bool) if keep_trials else None
    word = np.zeros(params.n, dtype=np.uint8)
    for j in range(count):
        i = start + j
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, i]))
        support = rng.choice(params.k, size=params.t, replace=False)
        de = spectrum_of_support(support, params.k)
        word[:] = 0
        word[support] = 1
        # decode copies its input word, so the truth view can share the buffer;
        # the incremental syndrome path is bit-identical to the reference one
        out = decode(word, key, params, truth=ErrorVector(word), tables=tables,
                     incremental=True)
        fl = out.first_layer
        acc.add_trial(de, out.iterations, fl.score0_sum, not out.success)
        if keep_trials:
            rows[0, j] = theta(dh, de)
            rows[1, j] = fl.err_crt
            rows[2, j] = fl.err_gen
            rows[3, j] = fl.score1_sum
            rows[4, j] = fl.score0_sum
            rows[5, j] = out.iterations
            ok[j] = out.success
    return acc, rows, ok


def run_campaign(key: KeyPair, params: CodeParams, trials: int, master_seed: int,
                 threads: int = 1, keep_trials: bool = True) -> CampaignResult:
    """Run `trials` attack-style decodes; identical output for any `threads`."""
    chunks = [(s, min(CHUNK, trials - s)) for s in range(0, trials, CHUNK)]
    acc = AttackAccumulator(k=params.k, score0_denom=params.n - params.t)
    parts = []
    if threads > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_run_chunk, key, params, master_seed, s, c, keep_trials)
                for s, c in chunks
            ]
            results = [f.result() for f in futures]
    else:
        results = [
            _run_chunk(key, params, master_seed, s, c, keep_trials) for s, c in chunks
        ]
    for part_acc, rows, ok in results:
        acc = acc.merge(part_acc)
        if keep_trials:
            parts.append((rows, ok))

    result = CampaignResult(params=params, trials=trials, master_seed=master_seed,
                            accumulator=acc)
    if keep_trials and parts:
        rows = np.concatenate([p[0] for p in parts], axis=1)
        result.theta = rows[0]
        result.err_crt = rows[1]
        result.err_gen = rows[2]
        result.score1_sum = rows[3]
        result.score0_sum = rows[4]
        result.iterations = rows[5]
        result.success = np.concatenate([p[1] for p in parts])
    return result


def write_trace(path, result: CampaignResult) -> None:
    """Per-trial CSV; the seed column is the trial index under the master seed."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        s1 = result.score1_means
        s0 = result.score0_means
        for i in range(len(result.theta)):
            writer.writerow([
                i,
                int(result.theta[i]),
                repr(float(s0[i])),
                repr(float(s1[i])),
                int(result.err_crt[i]),
                int(result.err_gen[i]),
                int(result.iterations[i]),
                int(result.success[i]),
            ])


def read_trace(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols: dict[str, list] = {name: [] for name in TRACE_COLUMNS}
        for row in reader:
            for name in TRACE_COLUMNS:
                cols[name].append(float(row[name]))
    out = {}
    for name, vals in cols.items():
        arr = np.array(vals)
        if name not in ("score0_mean", "score1_mean"):
            arr = arr.astype(np.int64)
        out[name] = arr
    out["success"] = out["success"].astype(bool)
    return out
