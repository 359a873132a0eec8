"""Constructive Caratheodory reduction of isotropic systems.

The rank-one matrices u_i u_i^T of an isotropic system are trace-one
symmetric matrices, so once more than d(d+1)/2 of them remain they are
affinely dependent; shifting the weights along such a dependence by
t = min_{lambda_i > 0} c_i / lambda_i zeroes at least one atom while
preserving sum_i c_i u_i u_i^T (and sum c_i) exactly.  Centered systems are
first lifted to R^{d+1}, where the lifted rank-one matrices additionally
share their last diagonal entry, giving the bound d(d+3)/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .systems import WeightedVectorSystem, check

__all__ = [
    "AffineDependence",
    "NumericalRankError",
    "affine_dependence",
    "reduce_isotropic",
    "reduce_centered",
    "lift_centered",
]

_RANK_TOL = 1e-10  # relative singular-value threshold for the rank decision


class NumericalRankError(RuntimeError):
    """No affine dependence was found where one must exist."""


@dataclass(frozen=True)
class AffineDependence:
    """Coefficients lambda with sum(lambda) = 0 and sum(lambda_i A_i) = 0."""

    coefficients: np.ndarray


def affine_dependence(points) -> AffineDependence | None:
    """Nontrivial affine dependence among symmetric matrices, or None.

    Stacks [vec(A_i); 1] as columns and takes the right singular vector of
    the smallest singular value; the matrices are affinely independent when
    that value exceeds 1e-10 of the largest.
    """
    mats = [np.asarray(a, dtype=float) for a in points]
    k = len(mats)
    if k < 2:
        raise ValueError("need at least two matrices")
    cols = np.column_stack([np.append(a.ravel(), 1.0) for a in mats])
    _, svals, vt = np.linalg.svd(cols)
    smallest = svals[k - 1] if k <= len(svals) else 0.0
    if smallest > _RANK_TOL * svals[0]:
        return None
    lam = vt[-1]
    if lam[np.argmax(np.abs(lam))] < 0.0:  # canonical orientation
        lam = -lam
    return AffineDependence(coefficients=lam)


def _eliminate(mats: np.ndarray, weights: np.ndarray, bound: int) -> tuple[list[int], np.ndarray]:
    """Run weight shifts until at most ``bound`` atoms remain.

    mats holds one flattened symmetric matrix per row; returns the surviving
    input indices (in order) and their weights.
    """
    side = math.isqrt(mats.shape[1])
    keep = list(range(len(weights)))
    w = weights.astype(float).copy()
    while len(keep) > bound:
        window = keep[: min(len(keep), bound + 2)]
        dep = affine_dependence([mats[i].reshape(side, side) for i in window])
        if dep is None:
            raise NumericalRankError(
                f"{len(window)} atoms above the bound {bound} look affinely independent"
            )
        lam = dep.coefficients
        positive = lam > 1e-14 * np.max(np.abs(lam))
        if not np.any(positive):
            lam = -lam
            positive = lam > 1e-14 * np.max(np.abs(lam))
        ratios = np.full(len(window), np.inf)
        ratios[positive] = w[window][positive] / lam[positive]
        j = int(np.argmin(ratios))  # ties resolve to the lowest index
        t = ratios[j]
        for pos, idx in enumerate(window):
            w[idx] -= t * lam[pos]
        w[window[j]] = 0.0
        keep = [i for i in keep if w[i] > 0.0]
    return keep, w[keep]


def reduce_isotropic(system: WeightedVectorSystem) -> WeightedVectorSystem:
    """Shrink an isotropic system to at most d(d+1)/2 atoms."""
    report = check(system, tolerance=1e-8)
    if not report.is_isotropic:
        raise ValueError(
            f"reduce_isotropic needs an isotropic system (residual {report.tensor_residual:.3e})"
        )
    d = system.dim
    bound = d * (d + 1) // 2
    if system.size <= bound:
        return system
    mats = np.einsum("ij,ik->ijk", system.vectors, system.vectors).reshape(system.size, -1)
    keep, weights = _eliminate(mats, system.weights, bound)
    return WeightedVectorSystem(d, system.vectors[keep], weights)


def lift_centered(system: WeightedVectorSystem) -> WeightedVectorSystem:
    """Lift a centered isotropic system in R^d to an isotropic one in R^{d+1}.

    Each u_i maps to sqrt(d/(d+1)) (u_i, 1/sqrt(d)), which is again a unit
    vector, with weight (d+1)/d c_i.
    """
    d = system.dim
    scale = math.sqrt(d / (d + 1))
    lifted = np.hstack(
        [scale * system.vectors, np.full((system.size, 1), scale / math.sqrt(d))]
    )
    return WeightedVectorSystem(d + 1, lifted, (d + 1) / d * system.weights)


def reduce_centered(system: WeightedVectorSystem) -> WeightedVectorSystem:
    """Shrink an isotropic and centered system to at most d(d+3)/2 atoms,
    preserving both conditions."""
    report = check(system, tolerance=1e-8)
    if not (report.is_isotropic and report.is_centered):
        raise ValueError(
            "reduce_centered needs an isotropic, centered system "
            f"(residuals {report.tensor_residual:.3e}, {report.center_residual:.3e})"
        )
    d = system.dim
    bound = d * (d + 3) // 2
    if system.size <= bound:
        return system
    hat = lift_centered(system)
    mats = np.einsum("ij,ik->ijk", hat.vectors, hat.vectors).reshape(hat.size, -1)
    keep, hat_weights = _eliminate(mats, hat.weights, bound)
    return WeightedVectorSystem(d, system.vectors[keep], d / (d + 1) * hat_weights)
