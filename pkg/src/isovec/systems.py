"""Weighted unit-vector systems: the discrete data behind decompositions of
the identity.

A system is a list of unit vectors u_1..u_m in R^d with positive weights
c_1..c_m.  It is *isotropic* when sum_i c_i u_i u_i^T = Id_d and *centered*
when sum_i c_i u_i = 0; taking the trace of the first condition forces
sum_i c_i = d.  Scaling the atoms to sqrt(d) u_i with masses c_i/d turns an
isotropic system into a discrete probability measure whose second-moment
matrix is the identity.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "FormatError",
    "WeightedVectorSystem",
    "IsotropyReport",
    "DiscreteMeasure",
    "check",
    "to_measure",
    "generate",
    "load",
    "save",
    "to_dict",
    "from_dict",
]

FORMAT_VERSION = 1

# Rows farther than this from unit norm are rejected; closer rows are
# renormalized (only when they miss unit norm by more than 1e-10, so that a
# clean file round-trips bit-identically).
_RENORM_TOL = 1e-6
_UNIT_TOL = 1e-10


class FormatError(ValueError):
    """A JSON vector-system document does not match the expected schema."""


@dataclass(frozen=True)
class WeightedVectorSystem:
    """Unit vectors with positive weights; immutable after construction."""

    dim: int
    vectors: np.ndarray  # shape (m, dim), unit rows
    weights: np.ndarray  # shape (m,), strictly positive

    def __post_init__(self):
        d = int(self.dim)
        if d < 1:
            raise ValueError("dim must be a positive integer")
        vecs = np.array(self.vectors, dtype=float)
        w = np.array(self.weights, dtype=float)
        if vecs.ndim != 2 or vecs.shape[1] != d:
            raise ValueError(f"vectors must have shape (m, {d}), got {vecs.shape}")
        if w.shape != (vecs.shape[0],):
            raise ValueError("weights length must match the number of vectors")
        if vecs.shape[0] < 1:
            raise ValueError("a system needs at least one vector")
        if not (np.all(np.isfinite(vecs)) and np.all(np.isfinite(w))):
            raise ValueError("vectors and weights must be finite")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        norms = np.linalg.norm(vecs, axis=1)
        off = np.abs(norms - 1.0)
        if np.any(off > _RENORM_TOL):
            worst = float(norms[np.argmax(off)])
            raise ValueError(f"vector norm {worst} is not within {_RENORM_TOL} of 1")
        fix = off > _UNIT_TOL
        if np.any(fix):
            vecs[fix] /= norms[fix, None]
        vecs.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        """Number of atoms m."""
        return self.vectors.shape[0]


@dataclass(frozen=True)
class IsotropyReport:
    """Residuals of the identity-decomposition and center-of-mass conditions."""

    tensor_residual: float  # Frobenius norm of sum c_i u_i u_i^T - Id
    center_residual: float  # Euclidean norm of sum c_i u_i
    weight_sum: float
    is_isotropic: bool
    is_centered: bool
    tolerance: float


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite measure with atoms sqrt(d) u_i and masses summing to one."""

    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        masses = np.array(self.masses, dtype=float)
        if atoms.shape[0] != masses.shape[0]:
            raise ValueError("atom count must equal mass count")
        if np.any(masses <= 0.0):
            raise ValueError("masses must be strictly positive")
        if abs(masses.sum() - 1.0) > 1e-12:
            raise ValueError("masses must sum to 1 within 1e-12")
        atoms.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)


def second_moment(system: WeightedVectorSystem) -> np.ndarray:
    """sum_i c_i u_i u_i^T as a dense (d, d) matrix."""
    u = system.vectors
    return (u * system.weights[:, None]).T @ u


def check(system: WeightedVectorSystem, tolerance: float = 1e-8) -> IsotropyReport:
    """Measure how far the system is from isotropy and centeredness."""
    t = second_moment(system) - np.eye(system.dim)
    tensor_residual = float(np.linalg.norm(t, "fro"))
    center = system.weights @ system.vectors
    center_residual = float(np.linalg.norm(center))
    return IsotropyReport(
        tensor_residual=tensor_residual,
        center_residual=center_residual,
        weight_sum=float(system.weights.sum()),
        is_isotropic=tensor_residual <= tolerance,
        is_centered=center_residual <= tolerance,
        tolerance=float(tolerance),
    )


def to_measure(system: WeightedVectorSystem) -> DiscreteMeasure:
    """Scale an isotropic system to the probability measure on sqrt(d) u_i.

    Masses are c_i / sum(c), which equals c_i/d up to the isotropy residual
    and makes them sum to one exactly.
    """
    report = check(system, tolerance=1e-8)
    if not report.is_isotropic:
        raise ValueError(
            f"system is not isotropic at 1e-8 (residual {report.tensor_residual:.3e})"
        )
    atoms = math.sqrt(system.dim) * system.vectors
    masses = system.weights / system.weights.sum()
    return DiscreteMeasure(atoms=atoms, masses=masses)


def _simplex_vectors(d: int) -> np.ndarray:
    # Helmert orthonormal basis of the hyperplane {sum x = 0} in R^{d+1};
    # its columns, rescaled to unit norm, are the vertex directions of a
    # regular d-simplex inscribed in the unit sphere.
    h = np.zeros((d, d + 1))
    for k in range(1, d + 1):
        h[k - 1, :k] = 1.0
        h[k - 1, k] = -float(k)
        h[k - 1] /= math.sqrt(k * (k + 1))
    return math.sqrt((d + 1) / d) * h.T


def generate(
    kind: str,
    d: int,
    m: int | None = None,
    seed: int | None = None,
) -> WeightedVectorSystem:
    """Build a reference isotropic system.

    kind="simplex": the d+1 vertex directions of a regular simplex inscribed
    in the unit sphere, weights d/(d+1) (isotropic and centered).
    kind="cross": the 2d signed standard basis vectors with weights 1/2
    (isotropic and centered).
    kind="random-frame": rows r_i of a seeded Gaussian m x d matrix after
    Householder column-orthonormalization, with u_i = r_i/|r_i| and
    c_i = |r_i|^2; isotropic by construction (not centered).
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    if kind == "simplex":
        if m is not None and m != d + 1:
            raise ValueError(f"simplex in dimension {d} has m = {d + 1} vectors")
        vectors = _simplex_vectors(d)
        weights = np.full(d + 1, d / (d + 1))
        return WeightedVectorSystem(d, vectors, weights)
    if kind == "cross":
        if m is not None and m != 2 * d:
            raise ValueError(f"cross-polytope in dimension {d} has m = {2 * d} vectors")
        vectors = np.repeat(np.eye(d), 2, axis=0)
        vectors[1::2] *= -1.0
        return WeightedVectorSystem(d, vectors, np.full(2 * d, 0.5))
    if kind == "random-frame":
        if m is None or m < d:
            raise ValueError("random-frame requires m >= d")
        if seed is None:
            raise ValueError("random-frame requires a seed")
        for attempt in range(16):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(attempt,)))
            q, _ = np.linalg.qr(rng.standard_normal((m, d)))
            norms = np.linalg.norm(q, axis=1)
            if np.all(norms > 1e-12):  # zero row has probability zero; retry next substream
                return WeightedVectorSystem(d, q / norms[:, None], norms**2)
        raise RuntimeError("random-frame generation kept producing a zero-norm row")
    raise ValueError(f"unknown kind {kind!r}; expected simplex, cross, or random-frame")


def to_dict(system: WeightedVectorSystem) -> dict:
    """JSON-ready document for a system."""
    return {
        "format_version": FORMAT_VERSION,
        "dim": system.dim,
        "vectors": system.vectors.tolist(),
        "weights": system.weights.tolist(),
    }


def from_dict(data) -> WeightedVectorSystem:
    """Parse a system document; raises FormatError on schema violations."""
    if not isinstance(data, dict):
        raise FormatError("vector-system document must be a JSON object")
    try:
        dim = data["dim"]
        vectors = data["vectors"]
        weights = data["weights"]
    except KeyError as missing:
        raise FormatError(f"missing field {missing} in vector-system document") from None
    if not isinstance(dim, int):
        raise FormatError("field 'dim' must be an integer")
    try:
        vec_arr = np.asarray(vectors, dtype=float)
        w_arr = np.asarray(weights, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed vector-system arrays: {exc}") from None
    try:
        return WeightedVectorSystem(dim, vec_arr, w_arr)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def save(system: WeightedVectorSystem, target) -> None:
    """Write a system as JSON to a path or open text file.

    Floats are emitted with shortest round-trip repr, so load(save(s))
    reproduces every entry exactly.
    """
    doc = to_dict(system)
    if hasattr(target, "write"):
        json.dump(doc, target, indent=2)
        target.write("\n")
    else:
        with open(target, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def load(source) -> WeightedVectorSystem:
    """Read a system from a path or open text file."""
    if hasattr(source, "read"):
        raw = source.read()
    else:
        raw = Path(source).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    return from_dict(data)
