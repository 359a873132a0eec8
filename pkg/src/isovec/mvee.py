"""Minimum-volume origin-centered enclosing ellipsoids and the weighted
vector systems their optimality conditions produce.

The shape matrix M maximizes log det M subject to p_i^T M p_i <= d; the
dual is the D-optimal design problem max log det sum_i q_i p_i p_i^T over
the weight simplex, solved here by Frank-Wolfe coordinate ascent with away
steps (Khachiyan/Todd-Yildirim).  At optimality M^{-1} = sum_i q_i p_i p_i^T
and the support points touch the ellipsoid, so w_i = M^{1/2} p_i has
|w_i|^2 = d there and sum_i (d q_i) (w_i/|w_i|) (w_i/|w_i|)^T = Id: the
normalized touching points with weights d q_i decompose the identity.

For the centered variant the points are lifted to (p_i, 1) in R^{d+1}.  The
lifted extraction is isotropic in R^{d+1}; rotating it so that every vector
has last coordinate 1/sqrt(d+1) (the Householder map sending
Mhat^{-1/2} e_{d+1}, a unit vector, to e_{d+1}) puts it in the product form
whose inverse is: drop the last coordinate, renormalize, scale weights by
d/(d+1).  The result is isotropic and centered in R^d.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .systems import WeightedVectorSystem

__all__ = [
    "MveeResult",
    "DegenerateInputError",
    "ConvergenceError",
    "solve_central_mvee",
    "john_from_points",
]


class DegenerateInputError(ValueError):
    """The points do not span R^d (no bounded enclosing ellipsoid exists)."""


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted; carries the best iterate in .result."""

    def __init__(self, message: str, result: "MveeResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class MveeResult:
    """Shape matrix with the dual weights certifying its optimality."""

    shape: np.ndarray  # symmetric positive-definite (d, d)
    support_indices: np.ndarray  # points with positive dual weight
    dual_weights: np.ndarray  # positive, aligned with support_indices, sum 1
    iterations: int
    max_violation: float  # max_i p_i^T M p_i - d


# Refresh the maintained inverse from scratch this often to stop
# Sherman-Morrison roundoff from accumulating.
_REFRESH_EVERY = 200


def _quadratic_forms(points: np.ndarray, inv: np.ndarray) -> np.ndarray:
    return np.einsum("ij,jk,ik->i", points, inv, points)


def solve_central_mvee(
    points,
    epsilon: float = 1e-6,
    max_iterations: int = 500_000,
) -> MveeResult:
    """Solve the origin-centered MVEE of a point set to relative gap epsilon.

    Stops once every point satisfies p^T M p <= d (1 + epsilon) and every
    support point satisfies p^T M p >= d (1 - epsilon); raises
    ConvergenceError (carrying the best iterate) if the budget runs out and
    DegenerateInputError if the points do not span.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
    n, d = pts.shape
    if n < d:
        raise DegenerateInputError(f"{n} points cannot span R^{d}")
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie in (0, 1)")
    if np.linalg.matrix_rank(pts) < d:
        raise DegenerateInputError(f"points have rank below {d}")

    q = np.full(n, 1.0 / n)
    scatter = (pts * q[:, None]).T @ pts
    inv = None
    iterations = 0
    while True:
        if iterations % _REFRESH_EVERY == 0:
            inv = np.linalg.inv(0.5 * (scatter + scatter.T))
        kappa = _quadratic_forms(pts, inv)
        j_up = int(np.argmax(kappa))
        gap_up = kappa[j_up] - d
        on_support = q > 0.0
        support_kappa = np.where(on_support, kappa, np.inf)
        j_down = int(np.argmin(support_kappa))
        gap_down = d - support_kappa[j_down]
        if gap_up <= d * epsilon and gap_down <= d * epsilon:
            break
        if iterations >= max_iterations:
            raise ConvergenceError(
                f"no convergence in {max_iterations} iterations "
                f"(violation {max(gap_up, gap_down):.3e} vs target {d * epsilon:.3e})",
                _finalize(pts, q, scatter, iterations, epsilon),
            )
        if gap_up >= gap_down:
            # Frank-Wolfe step toward the worst violator.
            kap = kappa[j_up]
            beta = (kap - d) / (d * (kap - 1.0))
            p = pts[j_up]
            q *= 1.0 - beta
            q[j_up] += beta
            scatter = (1.0 - beta) * scatter + beta * np.outer(p, p)
            inv = _rank_one_update(inv, 1.0 - beta, beta, p)
        else:
            # Away step from the flattest support point, capped at a drop.
            kap = kappa[j_down]
            beta_cap = q[j_down] / (1.0 - q[j_down]) if q[j_down] < 1.0 else np.inf
            beta = (d - kap) / (d * (kap - 1.0)) if kap > 1.0 else np.inf
            beta = min(beta, beta_cap)
            p = pts[j_down]
            q *= 1.0 + beta
            q[j_down] -= beta
            if beta == beta_cap:
                q[j_down] = 0.0  # drop step
            scatter = (1.0 + beta) * scatter - beta * np.outer(p, p)
            inv = _rank_one_update(inv, 1.0 + beta, -beta, p)
        iterations += 1
    return _finalize(pts, q, scatter, iterations, epsilon)


def _rank_one_update(inv: np.ndarray, scale: float, coeff: float, p: np.ndarray) -> np.ndarray:
    """Inverse of scale * A + coeff * p p^T given inv = A^{-1} (Sherman-Morrison)."""
    base = inv / scale
    v = base @ p
    return base - (coeff / (1.0 + coeff * float(p @ v))) * np.outer(v, v)


def _finalize(pts, q, scatter, iterations, epsilon) -> MveeResult:
    n, d = pts.shape
    shape = np.linalg.inv(0.5 * (scatter + scatter.T))
    shape = 0.5 * (shape + shape.T)
    kappa = _quadratic_forms(pts, shape)
    support = np.flatnonzero(q >= epsilon / n)
    weights = q[support] / q[support].sum()
    return MveeResult(
        shape=shape,
        support_indices=support,
        dual_weights=weights,
        iterations=iterations,
        max_violation=float(np.max(kappa) - d),
    )


def _extract_system(pts: np.ndarray, result: MveeResult) -> tuple[np.ndarray, np.ndarray]:
    """Touching directions and identity-decomposition weights from a solve."""
    d = pts.shape[1]
    root = linalg.psd_sqrt(result.shape)
    touched = pts[result.support_indices] @ root
    touched /= np.linalg.norm(touched, axis=1)[:, None]
    return touched, d * result.dual_weights


def john_from_points(
    points,
    centered: bool = False,
    epsilon: float = 1e-6,
    max_iterations: int = 500_000,
) -> WeightedVectorSystem:
    """Weighted vector system from the MVEE optimality conditions.

    centered=False decomposes the identity only; centered=True also forces
    the weighted vector sum to zero via the R^{d+1} lift.  Residuals of the
    output scale like 10 sqrt(d) epsilon.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
    d = pts.shape[1]
    if not centered:
        result = solve_central_mvee(pts, epsilon, max_iterations)
        vectors, weights = _extract_system(pts, result)
        return WeightedVectorSystem(d, vectors, weights)

    lifted = np.hstack([pts, np.ones((pts.shape[0], 1))])
    result = solve_central_mvee(lifted, epsilon, max_iterations)
    hat_vectors, hat_weights = _extract_system(lifted, result)
    # Rotate so every lifted vector has last coordinate 1/sqrt(d+1): the
    # Householder reflection taking a = Mhat^{-1/2} e_{d+1} (unit by the
    # dual optimality conditions) to e_{d+1}.
    root = linalg.psd_sqrt(result.shape)
    a = np.linalg.solve(root, np.eye(d + 1)[d])
    a /= np.linalg.norm(a)
    v = a - np.eye(d + 1)[d]
    if np.linalg.norm(v) > 1e-14:
        hat_vectors = hat_vectors - 2.0 * np.outer(hat_vectors @ v, v) / float(v @ v)
    dropped = hat_vectors[:, :d]
    dropped /= np.linalg.norm(dropped, axis=1)[:, None]
    return WeightedVectorSystem(d, dropped, d / (d + 1) * hat_weights)
