"""Samplers and estimators for squared determinants of random parallelotopes.

Every sampler has identity second-moment matrix, so d independent draws
span a parallelotope with E[det^2] = d! regardless of which samplers are
mixed.  For a discrete system the same expectation restricted to unit
vectors is d!/d^d, computable exactly by summing over d-subsets (tuples
with a repeated index have determinant zero), and the probability that the
squared determinant is large admits the exact tail enumeration used to
validate the (1-lambda) e^{-d} lower bound.

Reproducibility: trials are split into fixed-size chunks; chunk k draws
from its own counter-based Philox stream keyed by (seed, k), and partial
sums are reduced in chunk order.  Results are therefore bit-identical for a
given (seed, trials) no matter how many threads execute the chunks.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds
from .systems import WeightedVectorSystem, check, to_measure

__all__ = [
    "CHUNK_TRIALS",
    "ExperimentRecord",
    "GaussianSampler",
    "SphereSampler",
    "DiscreteSampler",
    "EnumerationTooLargeError",
    "estimate_expected_det2",
    "exact_expected_det2",
    "tail_probability",
    "tail_exact",
    "CSV_HEADER",
    "csv_row",
]

CHUNK_TRIALS = 8192
_ENUM_GUARD = 10**6

CSV_HEADER = "seed,kind,d,m,trials,estimate,stderr,exact_reference,threshold"


class EnumerationTooLargeError(ValueError):
    """The exact subset enumeration would exceed its guard."""


@dataclass(frozen=True)
class ExperimentRecord:
    """One seeded experiment: the estimate, its error bar, and metadata."""

    seed: int
    kind: str
    dim: int
    m: int | None
    trials: int
    estimate: float
    standard_error: float
    exact_reference: float | None = None
    threshold: float | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.standard_error < 0.0:
            raise ValueError("standard error cannot be negative")


def csv_row(record: ExperimentRecord) -> str:
    """Record as one row of the experiment CSV (empty fields where absent)."""

    def opt(x):
        return "" if x is None else repr(float(x))

    return ",".join(
        [
            str(record.seed),
            record.kind,
            str(record.dim),
            "" if record.m is None else str(record.m),
            str(record.trials),
            repr(float(record.estimate)),
            repr(float(record.standard_error)),
            opt(record.exact_reference),
            opt(record.threshold),
        ]
    )


class GaussianSampler:
    """Standard Gaussian vectors in R^d (E[x x^T] = Id)."""

    kind = "gaussian"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        self.dim = dim

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.standard_normal((n, self.dim))


class SphereSampler:
    """Uniform vectors on the sphere of radius sqrt(d) (E[x x^T] = Id)."""

    kind = "sphere"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        self.dim = dim

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        g = rng.standard_normal((n, self.dim))
        return math.sqrt(self.dim) * g / np.linalg.norm(g, axis=1)[:, None]


class DiscreteSampler:
    """Atoms sqrt(d) u_i of an isotropic system, drawn with mass c_i/d."""

    kind = "discrete"

    def __init__(self, system: WeightedVectorSystem):
        measure = to_measure(system)  # enforces isotropy at 1e-8
        self.system = system
        self.dim = system.dim
        self.atoms = measure.atoms
        self.masses = measure.masses

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        idx = rng.choice(len(self.masses), size=n, p=self.masses)
        return self.atoms[idx]


def _stream(seed: int, chunk_index: int) -> np.random.Generator:
    # Chunk index occupies the top counter word, leaving 2^192 draws per chunk.
    return np.random.Generator(np.random.Philox(key=seed, counter=chunk_index << 192))


def _validate_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def _chunk_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, CHUNK_TRIALS)
    return [CHUNK_TRIALS] * full + ([rest] if rest else [])


def _map_chunks(fn, n_chunks: int, threads: int) -> list:
    if threads <= 1 or n_chunks <= 1:
        return [fn(k) for k in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_chunks)))


def estimate_expected_det2(
    sampler,
    trials: int,
    seed: int,
    threads: int = 1,
) -> ExperimentRecord:
    """Sample mean and standard error of det(x_1, .., x_d)^2.

    ``sampler`` is either a single sampler used for all d rows or a sequence
    of d samplers of equal dimension, one per row.  Deterministic for a given
    (sampler, trials, seed) independent of ``threads``.
    """
    samplers = list(sampler) if isinstance(sampler, (list, tuple)) else None
    if samplers is None:
        d = sampler.dim
        samplers = [sampler] * d
    else:
        dims = {s.dim for s in samplers}
        if len(dims) != 1:
            raise ValueError("mixed samplers must share one dimension")
        d = dims.pop()
        if len(samplers) != d:
            raise ValueError(f"need exactly d={d} samplers, got {len(samplers)}")
    if trials < 100:
        raise ValueError("trials must be at least 100")
    seed = _validate_seed(seed)

    sizes = _chunk_sizes(trials)

    def one_chunk(k: int) -> tuple[float, float]:
        rng = _stream(seed, k)
        block = np.empty((sizes[k], d, d))
        for row, s in enumerate(samplers):
            block[:, row, :] = s.draw(rng, sizes[k])
        det2 = np.linalg.det(block) ** 2
        return float(det2.sum()), float((det2 * det2).sum())

    s1 = s2 = 0.0
    for part1, part2 in _map_chunks(one_chunk, len(sizes), threads):
        s1 += part1
        s2 += part2
    mean = s1 / trials
    var = max(s2 - s1 * s1 / trials, 0.0) / (trials - 1) if trials > 1 else 0.0
    stderr = math.sqrt(var / trials)

    kinds = sorted({s.kind for s in samplers})
    kind = kinds[0] if len(kinds) == 1 else "mixed"
    m = None
    reference: float | None = float(math.factorial(d))
    if kind == "discrete" and all(s is samplers[0] for s in samplers):
        system = samplers[0].system
        m = system.size
        if math.comb(m, d) <= _ENUM_GUARD:
            # scaled atoms: multiply the unit-vector expectation by d^d
            reference = exact_expected_det2(system) * float(d) ** d
    return ExperimentRecord(
        seed=seed,
        kind=kind,
        dim=d,
        m=m,
        trials=trials,
        estimate=mean,
        standard_error=stderr,
        exact_reference=reference,
    )


def _subset_det2(system: WeightedVectorSystem):
    """Yield (product of weights, det^2) over all d-subsets of the atoms."""
    d, m = system.dim, system.size
    vectors, weights = system.vectors, system.weights
    combos = itertools.combinations(range(m), d)
    while True:
        batch = list(itertools.islice(combos, CHUNK_TRIALS))
        if not batch:
            return
        idx = np.array(batch)
        det2 = np.linalg.det(vectors[idx]) ** 2
        wprod = np.prod(weights[idx], axis=1)
        yield from zip(wprod.tolist(), det2.tolist())


def _guard_enumeration(system: WeightedVectorSystem) -> None:
    count = math.comb(system.size, system.dim)
    if count > _ENUM_GUARD:
        raise EnumerationTooLargeError(
            f"binomial({system.size}, {system.dim}) = {count} exceeds {_ENUM_GUARD}"
        )


def exact_expected_det2(system: WeightedVectorSystem) -> float:
    """Exact E[det(u_{i_1}, .., u_{i_d})^2] under index draws P(i) = c_i/d.

    Tuples with a repeated index contribute zero, so the sum runs over
    d-subsets with their d! orderings: d!/d^d sum_S (prod_S c_i) det(S)^2.
    """
    _guard_enumeration(system)
    d = system.dim
    scale = math.factorial(d) / float(d) ** d
    return scale * sum(w * det2 for w, det2 in _subset_det2(system))


def tail_exact(system: WeightedVectorSystem, threshold: float) -> float:
    """Exact P(det(u_{i_1}, .., u_{i_d})^2 >= threshold), same index draws."""
    if threshold <= 0.0:
        return 1.0
    _guard_enumeration(system)
    d = system.dim
    scale = math.factorial(d) / float(d) ** d
    return scale * sum(w for w, det2 in _subset_det2(system) if det2 >= threshold)


def tail_probability(
    system: WeightedVectorSystem,
    lam: float,
    trials: int,
    seed: int,
    threads: int = 1,
) -> ExperimentRecord:
    """Estimate P(det^2 >= lambda gamma(d, mbar) d!/d^d) by seeded sampling.

    The record carries the threshold used and, when the subset enumeration
    is feasible, the exact tail as reference.
    """
    report = check(system, tolerance=1e-8)
    if not report.is_isotropic:
        raise ValueError(
            f"tail_probability needs an isotropic system (residual {report.tensor_residual:.3e})"
        )
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    if trials < 1000:
        raise ValueError("trials must be at least 1000")
    seed = _validate_seed(seed)
    d, m = system.dim, system.size
    threshold = math.exp(
        math.log(lam)
        + bounds.gamma(d, m).log_value
        + bounds.dr_volume_bound(d).log_value
    )
    probs = system.weights / system.weights.sum()
    vectors = system.vectors
    sizes = _chunk_sizes(trials)

    def one_chunk(k: int) -> int:
        rng = _stream(seed, k)
        idx = rng.choice(m, size=(sizes[k], d), p=probs)
        det2 = np.linalg.det(vectors[idx]) ** 2
        return int(np.count_nonzero(det2 >= threshold))

    hits = sum(_map_chunks(one_chunk, len(sizes), threads))
    p_hat = hits / trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    reference = None
    if math.comb(m, d) <= _ENUM_GUARD:
        reference = tail_exact(system, threshold)
    return ExperimentRecord(
        seed=seed,
        kind="tail",
        dim=d,
        m=m,
        trials=trials,
        estimate=p_hat,
        standard_error=stderr,
        exact_reference=reference,
        threshold=threshold,
    )
