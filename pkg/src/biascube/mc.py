"""Sampling-based estimates for functions past the dense-table cap.

Randomness discipline: every estimate derives its streams from
``SeedSequence(seed, spawn_key=path)`` over the Philox counter-based
generator, where the path encodes the operation tag, any step indices, and
a chunk index. Work is cut into fixed-size chunks of samples, one stream
per chunk, and workers only decide how many chunks run concurrently; the
summed hit counts are integers, so identical seeds reproduce identical
results bit for bit at any worker count. Distinct operations on the same
seed never share a stream. The generator name travels with every
serialized estimate.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._kernels import connected_batch
from .booleans import BooleanFunction, FamilySpec
from .measure import bias_value

RNG_ID = "philox4x64:seedseq-path"
WORKERS_ENV = "BIASCUBE_WORKERS"

# 95% two-sided normal quantile, fixed so intervals never drift with the
# scipy version.
WILSON_Z = 1.959963984540054

SAMPLE_CAP = 1 << 24

# tags keeping operation streams disjoint under a shared seed
_TAG_MU = 0
_TAG_INFLUENCE = 1
_TAG_BISECT = 2
_TAG_FINAL = 3
_TAG_SPOT = 4

_CHUNK_SCALARS = 1 << 22

# samples per substream; fixed so estimates cannot depend on the worker count
_STREAM_CHUNK = 1 << 14


def substream(seed: int, *path: int) -> np.random.Generator:
    """Philox generator for one (operation, worker, ...) path."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=path)))


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise ValueError("worker count must be positive")
    return workers


@dataclass(frozen=True)
class OracleFunction:
    """Black-box 0/1 predicate evaluated on batches of points.

    ``evaluate_batch`` maps a (count, n) matrix of 0/1 coordinates (column
    j is coordinate j+1) to a length-count 0/1 vector. ``monotone_declared``
    is the caller's promise, spot-checkable but never assumed silently
    proven.
    """

    n: int
    evaluate_batch: Callable[[np.ndarray], np.ndarray]
    monotone_declared: bool
    name: str

    def evaluate(self, point) -> int:
        bits = np.asarray(point, dtype=np.uint8).reshape(1, self.n)
        return int(self.evaluate_batch(bits)[0])


def family_oracle(spec: FamilySpec) -> OracleFunction:
    """Formula-backed oracle for a named family, valid at any arity."""
    n = spec.arity
    kind = spec.kind
    if kind == "or_all":
        fn = lambda b: b.any(axis=1)
    elif kind == "and_all":
        fn = lambda b: b.all(axis=1)
    elif kind == "dictator":
        i = spec.param("i")
        fn = lambda b: b[:, i - 1] != 0
    elif kind == "parity":
        fn = lambda b: (b.sum(axis=1, dtype=np.int64) & 1) != 0
    elif kind == "majority":
        half = n // 2
        fn = lambda b: b.sum(axis=1, dtype=np.int64) > half
    elif kind == "tribes":
        k, m = spec.param("k"), spec.param("m")
        fn = lambda b: b.reshape(b.shape[0], m, k).all(axis=2).any(axis=1)
    elif kind == "cyclic_run":
        length = spec.param("len")

        def fn(b):
            ext = np.concatenate([b, b[:, : length - 1]], axis=1)
            windows = np.lib.stride_tricks.sliding_window_view(ext, length, axis=1)
            return windows.all(axis=2).any(axis=1)

    else:
        raise ValueError(f"no oracle form for family {kind!r}")
    monotone = kind != "parity"
    return OracleFunction(n, lambda b: np.asarray(fn(b), dtype=np.uint8), monotone, spec.to_string())


def from_boolean_function(f: BooleanFunction, monotone_declared: bool | None = None) -> OracleFunction:
    """Oracle backed by a dense table; mostly for agreement tests."""
    from .booleans import is_monotone

    if monotone_declared is None:
        monotone_declared = is_monotone(f)
    table = f.table
    shifts = np.arange(f.n, dtype=np.int64)

    def fn(bits):
        idx = (bits.astype(np.int64) << shifts).sum(axis=1)
        return table[idx]

    return OracleFunction(f.n, fn, monotone_declared, f"table:n={f.n}")


def connectivity_oracle(m: int) -> OracleFunction:
    """Connectivity of a graph on m vertices, one coordinate per edge.

    Coordinates follow lexicographic vertex pairs: coordinate 1 is edge
    (1,2), coordinate 2 is (1,3), ..., coordinate m(m-1)/2 is (m-1,m).
    """
    if m < 2:
        raise ValueError("connectivity needs at least 2 vertices")
    pairs = [(u, v) for u in range(m) for v in range(u + 1, m)]
    edge_u = np.array([u for u, _ in pairs], dtype=np.int64)
    edge_v = np.array([v for _, v in pairs], dtype=np.int64)
    n = len(pairs)

    def fn(bits):
        return connected_batch(np.ascontiguousarray(bits, dtype=np.uint8), m, edge_u, edge_v)

    return OracleFunction(n, fn, True, f"connectivity:m={m}")


def sample_points(n: int, p, rng: np.random.Generator, count: int) -> np.ndarray:
    """(count, n) matrix of independent Bernoulli(p) coordinates."""
    pv = bias_value(p)
    return (rng.random((count, n)) < pv).view(np.uint8)


@dataclass(frozen=True)
class Estimate:
    """Proportion estimate with a 95% Wilson interval."""

    mean: float
    stderr: float
    samples: int
    ci_lo: float
    ci_hi: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "samples": self.samples,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
        }


def wilson_estimate(successes: int, samples: int) -> Estimate:
    if samples < 1:
        raise ValueError("needs at least one sample")
    if not 0 <= successes <= samples:
        raise ValueError("success count out of range")
    phat = successes / samples
    z2 = WILSON_Z * WILSON_Z
    denom = 1.0 + z2 / samples
    center = (phat + z2 / (2.0 * samples)) / denom
    half = WILSON_Z * math.sqrt(phat * (1.0 - phat) / samples + z2 / (4.0 * samples * samples)) / denom
    stderr = math.sqrt(phat * (1.0 - phat) / samples)
    return Estimate(phat, stderr, samples, max(center - half, 0.0), min(center + half, 1.0))


def _chunk_counts(samples: int) -> list[int]:
    full, rem = divmod(samples, _STREAM_CHUNK)
    counts = [_STREAM_CHUNK] * full
    if rem:
        counts.append(rem)
    return counts


def _count_hits(oracle: OracleFunction, pv: float, count: int, rng: np.random.Generator) -> int:
    hits = 0
    left = count
    block_rows = max(1, _CHUNK_SCALARS // max(oracle.n, 1))
    while left > 0:
        rows = min(left, block_rows)
        bits = (rng.random((rows, oracle.n)) < pv).view(np.uint8)
        hits += int(np.asarray(oracle.evaluate_batch(bits), dtype=np.uint8).sum())
        left -= rows
    return hits


def _count_fiber_splits(
    oracle: OracleFunction, pv: float, i: int, count: int, rng: np.random.Generator
) -> int:
    hits = 0
    left = count
    block_rows = max(1, _CHUNK_SCALARS // max(oracle.n, 1))
    col = i - 1
    while left > 0:
        rows = min(left, block_rows)
        base = (rng.random((rows, oracle.n - 1)) < pv).view(np.uint8)
        full = np.empty((rows, oracle.n), dtype=np.uint8)
        full[:, :col] = base[:, :col]
        full[:, col + 1 :] = base[:, col:]
        full[:, col] = 0
        low = np.asarray(oracle.evaluate_batch(full), dtype=np.uint8)
        full[:, col] = 1
        high = np.asarray(oracle.evaluate_batch(full), dtype=np.uint8)
        hits += int((low != high).sum())
        left -= rows
    return hits


def _run_chunks(per_chunk: Callable[[int, int], int], counts: list[int], workers: int) -> int:
    # the reduction is a sum of ints, so scheduling cannot change the total
    if workers == 1 or len(counts) == 1:
        return sum(per_chunk(c, count) for c, count in enumerate(counts))
    with ThreadPoolExecutor(max_workers=min(workers, len(counts))) as pool:
        return sum(pool.map(per_chunk, range(len(counts)), counts))


def estimate_mu(
    oracle: OracleFunction, p, samples: int, seed: int, workers: int | None = None
) -> Estimate:
    """Sampled measure of the 1-set under the product measure at bias p."""
    if samples < 1:
        raise ValueError("needs at least one sample")
    pv = bias_value(p)
    nworkers = worker_count(workers)

    def per_chunk(c: int, count: int) -> int:
        return _count_hits(oracle, pv, count, substream(seed, _TAG_MU, c))

    return wilson_estimate(_run_chunks(per_chunk, _chunk_counts(samples), nworkers), samples)


def estimate_influence(
    oracle: OracleFunction, p, i: int, samples: int, seed: int, workers: int | None = None
) -> Estimate:
    """Sampled probability that coordinate i decides the value.

    Draws the other n-1 coordinates from their product measure and checks
    the two completions for disagreement, which is the nonconstancy-on-the-
    fiber event itself rather than any derivative surrogate.
    """
    if samples < 1:
        raise ValueError("needs at least one sample")
    if not 1 <= i <= oracle.n:
        raise ValueError(f"coordinate {i} out of range for arity {oracle.n}")
    pv = bias_value(p)
    nworkers = worker_count(workers)

    def per_chunk(c: int, count: int) -> int:
        return _count_fiber_splits(oracle, pv, i, count, substream(seed, _TAG_INFLUENCE, i, c))

    return wilson_estimate(_run_chunks(per_chunk, _chunk_counts(samples), nworkers), samples)


def _estimate_at(
    oracle: OracleFunction, pv: float, samples: int, seed: int, tag: int, step: int, workers: int
) -> Estimate:
    def per_chunk(c: int, count: int) -> int:
        return _count_hits(oracle, pv, count, substream(seed, tag, step, c))

    return wilson_estimate(_run_chunks(per_chunk, _chunk_counts(samples), workers), samples)


@dataclass(frozen=True)
class LevelSearchResult:
    """Outcome of the sampled bisection for p(alpha)."""

    p_hat: float
    estimate: Estimate
    alpha: float
    flagged: bool
    steps: int
    evaluations: int
    seed: int
    rng: str = RNG_ID

    def to_dict(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "alpha": self.alpha,
            "estimate": self.estimate.to_dict(),
            "flagged": self.flagged,
            "steps": self.steps,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "rng": self.rng,
        }


def mc_p_of_alpha(
    oracle: OracleFunction,
    alpha: float,
    samples_per_step: int,
    tol_p: float,
    seed: int,
    workers: int | None = None,
) -> LevelSearchResult:
    """Bisection for the bias where the sampled measure crosses alpha.

    Each comparison is decided only once its Wilson interval excludes
    alpha, doubling the sample count otherwise. If the doubling hits the
    evaluation cap with the interval still straddling alpha, the step
    falls back to the point estimate and the result is flagged: the
    returned interval at p_hat then carries the honest (wider)
    uncertainty. Requires a monotone-declared oracle, since bisection is
    meaningless without a monotone measure curve.
    """
    if not oracle.monotone_declared:
        raise ValueError("level search needs a monotone-declared oracle")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be inside (0,1)")
    if not 0.0 < tol_p < 1.0:
        raise ValueError("tol_p must be inside (0,1)")
    if samples_per_step < 1:
        raise ValueError("needs at least one sample per step")
    nworkers = worker_count(workers)

    lo, hi = 0.0, 1.0
    flagged = False
    steps = 0
    evaluations = 0
    while hi - lo > tol_p:
        mid = 0.5 * (lo + hi)
        samples = samples_per_step
        while True:
            est = _estimate_at(oracle, mid, samples, seed, _TAG_BISECT, steps, nworkers)
            evaluations += samples
            if est.ci_lo > alpha or est.ci_hi < alpha:
                break
            if 2 * samples > SAMPLE_CAP:
                flagged = True
                break
            samples *= 2
        if est.mean >= alpha:
            hi = mid
        else:
            lo = mid
        steps += 1

    p_hat = 0.5 * (lo + hi)
    final = _estimate_at(oracle, p_hat, samples_per_step, seed, _TAG_FINAL, 0, nworkers)
    evaluations += samples_per_step
    return LevelSearchResult(p_hat, final, alpha, flagged, steps, evaluations, seed)


def spot_check_monotone(
    oracle: OracleFunction, p, pairs: int = 10_000, seed: int = 0
) -> int:
    """Count violations of f(x) <= f(y) over sampled comparable pairs x <= y.

    Returns the violation count; zero is the only acceptable value for an
    oracle that declared itself monotone.
    """
    pv = bias_value(p)
    rng = substream(seed, _TAG_SPOT)
    violations = 0
    left = pairs
    block_rows = max(1, _CHUNK_SCALARS // max(oracle.n, 1))
    while left > 0:
        rows = min(left, block_rows)
        x = (rng.random((rows, oracle.n)) < pv).view(np.uint8)
        up = (rng.random((rows, oracle.n)) < pv).view(np.uint8)
        y = x | up
        fx = np.asarray(oracle.evaluate_batch(x), dtype=np.uint8)
        fy = np.asarray(oracle.evaluate_batch(y), dtype=np.uint8)
        violations += int((fx > fy).sum())
        left -= rows
    return violations
