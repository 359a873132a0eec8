"""Greedy selection of d well-spread vectors from an isotropic system.

At step j the remaining mass satisfies sum_i c_i |Q_j u_i|^2 = d - j + 1,
where Q_j projects onto the orthogonal complement of the vectors already
chosen; since the weights sum to d, the maximizing vector has
|Q_j u_i|^2 >= (d - j + 1)/d, and multiplying the step norms gives the
squared-determinant floor d!/d^d.  A brute-force best-subset search is
included as the oracle for small systems.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .systems import WeightedVectorSystem, check

__all__ = [
    "SelectionCertificate",
    "SelectionStallError",
    "SubsetTooLargeError",
    "dr_select",
    "best_subset",
]

_SUBSET_GUARD = 10**7
_BATCH = 8192


class SelectionStallError(RuntimeError):
    """Every remaining projection collapsed; the input cannot be isotropic."""


class SubsetTooLargeError(ValueError):
    """binomial(m, d) exceeds the exhaustive-search guard."""


@dataclass(frozen=True)
class SelectionCertificate:
    """Greedy picks with the orthonormal basis that witnesses the bound.

    indices[j] is the input index chosen at step j, basis[j] the unit vector
    Q_j x_j / |Q_j x_j|, and step_norms[j] = |Q_j x_j|; x_j lies in the span
    of basis[0..j], and det_squared factors as the product of the squared
    step norms.
    """

    indices: tuple[int, ...]
    basis: np.ndarray
    step_norms: np.ndarray
    det_squared: float


def _greedy(vectors: np.ndarray, d: int) -> tuple[list[int], list[np.ndarray], list[float]]:
    indices: list[int] = []
    basis: list[np.ndarray] = []
    norms: list[float] = []
    for _ in range(d):
        proj = linalg.Projector.complement_of(
            vectors[indices] if indices else np.empty((0, d)), d
        )
        residuals = proj.apply(vectors)
        lengths = np.linalg.norm(residuals, axis=1)
        # Ties resolve to the lowest index; norms within one part in 1e12 of
        # the max count as tied so that roundoff cannot reorder exact ties.
        pick = int(np.argmax(lengths >= lengths.max() * (1.0 - 1e-12)))
        if lengths[pick] <= 1e-10:
            raise SelectionStallError(
                "all projections vanished; isotropy precondition violated"
            )
        indices.append(pick)
        basis.append(residuals[pick] / lengths[pick])
        norms.append(float(lengths[pick]))
    return indices, basis, norms


def dr_select(system: WeightedVectorSystem) -> SelectionCertificate:
    """Greedy certificate with det_squared >= d!/d^d for isotropic input."""
    report = check(system, tolerance=1e-8)
    if not report.is_isotropic:
        raise ValueError(
            f"dr_select needs an isotropic system (residual {report.tensor_residual:.3e})"
        )
    d = system.dim
    if system.size < d:
        raise ValueError(f"need at least d={d} vectors, got {system.size}")
    indices, basis, norms = _greedy(system.vectors, d)
    det_squared = linalg.det(system.vectors[indices]) ** 2
    return SelectionCertificate(
        indices=tuple(indices),
        basis=np.array(basis),
        step_norms=np.array(norms),
        det_squared=det_squared,
    )


def best_subset(system: WeightedVectorSystem) -> tuple[tuple[int, ...], float]:
    """Exhaustive maximum of det^2 over all d-subsets (lexicographically
    first maximizer); guarded to binomial(m, d) <= 1e7."""
    d, m = system.dim, system.size
    if m < d:
        raise ValueError(f"need at least d={d} vectors, got {m}")
    n_subsets = math.comb(m, d)
    if n_subsets > _SUBSET_GUARD:
        raise SubsetTooLargeError(
            f"binomial({m}, {d}) = {n_subsets} exceeds the {_SUBSET_GUARD} guard"
        )
    vectors = system.vectors
    best_val = -1.0
    best_idx: tuple[int, ...] = ()
    combos = itertools.combinations(range(m), d)
    while True:
        batch = list(itertools.islice(combos, _BATCH))
        if not batch:
            break
        dets = np.linalg.det(vectors[np.array(batch)])
        vals = dets * dets
        j = int(np.argmax(vals))
        if vals[j] > best_val:  # strict: keeps the lexicographically first tie
            best_val = float(vals[j])
            best_idx = batch[j]
    return best_idx, best_val
