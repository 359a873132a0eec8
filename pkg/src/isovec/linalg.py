"""Dense small-dimension linear algebra: determinants, complement projectors,
symmetric outer products, and PSD square roots.

Everything here is a pure function of its inputs (or an immutable object),
so all operations are safe to call concurrently.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "DimensionError",
    "NotPsdError",
    "Projector",
    "det",
    "sym_outer",
    "psd_sqrt",
]


class DimensionError(ValueError):
    """Input has the wrong shape (non-square, or mismatched vector length)."""


class NotPsdError(ValueError):
    """Symmetric input has an eigenvalue below the PSD tolerance."""


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def det(m) -> float:
    """Determinant of a square matrix via LU factorization with partial
    pivoting (LAPACK getrf); the sign is preserved."""
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"determinant needs a square matrix, got {a.shape}")
    return float(np.linalg.det(a))


def sym_outer(u) -> np.ndarray:
    """Rank-one symmetric outer product u u^T (trace equals |u|^2)."""
    v = np.asarray(u, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return np.outer(v, v)


# Relative norm drop below which a candidate is treated as linearly dependent.
_DEPENDENT_TOL = 1e-12


def _mgs_step(v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    """One modified Gram-Schmidt sweep of v against an orthonormal list."""
    w = v.copy()
    for b in basis:
        w -= np.dot(b, w) * b
    return w


class Projector:
    """Orthogonal projection of R^d onto the complement of a spanned subspace.

    The projector is stored as an explicit orthonormal basis of the complement,
    built by modified Gram-Schmidt with a re-orthogonalization sweep; candidates
    whose norm drops below 1e-12 of its pre-projection value are treated as
    linearly dependent and discarded.
    """

    def __init__(self, dim: int, basis: np.ndarray):
        basis = np.asarray(basis, dtype=float).reshape(-1, dim)
        gram = basis @ basis.T
        if basis.size and np.max(np.abs(gram - np.eye(len(basis)))) > 1e-12:
            raise ValueError("projector basis is not orthonormal within 1e-12")
        self.dim = int(dim)
        self.basis = basis
        self.basis.setflags(write=False)

    @classmethod
    def complement_of(cls, vectors, dim: int) -> "Projector":
        """Projector that removes the span of ``vectors`` from R^dim."""
        vecs = np.asarray(vectors, dtype=float)
        vecs = vecs.reshape(-1, dim) if vecs.size else np.empty((0, dim))
        removed: list[np.ndarray] = []
        for v in vecs:
            nrm0 = np.linalg.norm(v)
            if nrm0 == 0.0:
                continue
            w = _mgs_step(_mgs_step(v, removed), removed)  # twice is enough
            nrm = np.linalg.norm(w)
            if nrm > _DEPENDENT_TOL * nrm0:
                removed.append(w / nrm)
        comp: list[np.ndarray] = []
        for e in np.eye(dim):
            if len(comp) == dim - len(removed):
                break
            held = removed + comp
            w = _mgs_step(_mgs_step(e, held), held)
            nrm = np.linalg.norm(w)
            if nrm > _DEPENDENT_TOL:
                comp.append(w / nrm)
        return cls(dim, np.array(comp, dtype=float).reshape(-1, dim))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def apply(self, x) -> np.ndarray:
        """Component of x orthogonal to the projected-out subspace.

        Accepts a single d-vector or a stack of row vectors.
        """
        a = np.asarray(x, dtype=float)
        if a.shape[-1] != self.dim:
            raise DimensionError(
                f"projector dim {self.dim} does not match vector dim {a.shape[-1]}"
            )
        return (a @ self.basis.T) @ self.basis


def project_out(p: Projector, x) -> np.ndarray:
    """Apply the complement projector ``p`` to ``x``."""
    return p.apply(x)


def psd_sqrt(m) -> np.ndarray:
    """Symmetric square root of a symmetric PSD matrix via eigendecomposition.

    Requires symmetry within 1e-10 and eigenvalues >= -1e-10 (relative to the
    largest); small negative eigenvalues are clamped to zero.
    """
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"psd_sqrt needs a square matrix, got {a.shape}")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-10:
        raise ValueError("matrix is not symmetric within 1e-10")
    evals, evecs = np.linalg.eigh(0.5 * (a + a.T))
    scale = max(np.max(np.abs(evals)), 1.0)
    if np.min(evals) < -1e-10 * scale:
        raise NotPsdError(f"eigenvalue {np.min(evals):.3e} below PSD tolerance")
    root = evecs @ np.diag(np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T
    return 0.5 * (root + root.T)
