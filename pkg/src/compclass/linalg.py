"""Tolerance-aware dense linear algebra for rank-deficient PSD matrices.

Every spectral quantity (effective rank, pseudo-determinant, null space,
square-root factor) is derived from one symmetric eigendecomposition and
one shared rank threshold, so the quantities stay mutually consistent for
matrices that sit close to the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10

_SYMMETRY_TOL = 1e-12
_GRAM_TOL = 1e-10
_CONTAINMENT_TOL = 1e-8


def _as_symmetric(a) -> np.ndarray:
    """Validate and return a finite square symmetric matrix as float array."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    scale = max(float(np.abs(a).max(initial=0.0)), 1.0)
    if float(np.abs(a - a.T).max(initial=0.0)) > _SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric within 1e-12 relative tolerance")
    return a


def rank_threshold(eigenvalues: np.ndarray, tol_rel: float) -> float:
    """Absolute eigenvalue cutoff: tol_rel * max(largest eigenvalue, 1).

    The additive floor of 1 keeps the threshold meaningful for the
    all-zero matrix.
    """
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    lam_max = float(eigenvalues[-1]) if eigenvalues.size else 0.0
    return tol_rel * max(lam_max, 1.0)


def eigh_with_threshold(a, tol_rel: float = DEFAULT_TOL):
    """Eigendecomposition of a symmetric matrix plus its rank threshold.

    Returns (eigenvalues ascending, eigenvectors as columns, threshold).
    """
    a = _as_symmetric(a)
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    return w, v, rank_threshold(w, tol_rel)


def effective_rank(a, tol_rel: float = DEFAULT_TOL) -> int:
    """Number of eigenvalues above the relative rank threshold."""
    w, _, thr = eigh_with_threshold(a, tol_rel)
    return int(np.count_nonzero(w > thr))


def pseudo_det(a, tol_rel: float = DEFAULT_TOL) -> float:
    """Product of the eigenvalues above the rank threshold (1 for rank 0)."""
    w, _, thr = eigh_with_threshold(a, tol_rel)
    kept = w[w > thr]
    return float(np.prod(kept)) if kept.size else 1.0


def rank_and_pdet(a, tol_rel: float = DEFAULT_TOL) -> tuple[int, float]:
    """Effective rank and pseudo-determinant from a single decomposition."""
    w, _, thr = eigh_with_threshold(a, tol_rel)
    kept = w[w > thr]
    return int(kept.size), (float(np.prod(kept)) if kept.size else 1.0)


def _fix_column_signs(m: np.ndarray) -> np.ndarray:
    """Flip column signs so the largest-magnitude entry is positive."""
    if m.size == 0:
        return m
    idx = np.abs(m).argmax(axis=0)
    signs = np.sign(m[idx, np.arange(m.shape[1])])
    signs[signs == 0] = 1.0
    return m * signs


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a linear subspace, possibly zero-dimensional.

    ``matrix`` holds the basis vectors as columns (ambient_dim x dim).
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("basis matrix must be 2-dimensional")
        if not np.all(np.isfinite(m)):
            raise ValueError("basis entries must be finite")
        if m.shape[1]:
            gram = m.T @ m
            if float(np.abs(gram - np.eye(m.shape[1])).max()) > _GRAM_TOL:
                raise ValueError("basis vectors are not orthonormal to 1e-10")
        object.__setattr__(self, "matrix", m)

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def empty(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(np.zeros((ambient_dim, 0)))


def null_space_basis(a, tol_rel: float = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal eigenvectors whose eigenvalues fall below the threshold."""
    w, v, thr = eigh_with_threshold(a, tol_rel)
    cols = v[:, w <= thr]
    return SubspaceBasis(_fix_column_signs(cols))


def image_basis(a, tol_rel: float = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal eigenvectors whose eigenvalues exceed the threshold."""
    w, v, thr = eigh_with_threshold(a, tol_rel)
    cols = v[:, w > thr]
    return SubspaceBasis(_fix_column_signs(cols))


def complement_basis_within(inner: SubspaceBasis, outer: SubspaceBasis) -> SubspaceBasis:
    """Orthonormal extension of ``inner`` to a basis of ``outer``.

    The result spans the orthogonal complement of span(inner) inside
    span(outer); requires span(inner) to be contained in span(outer) to
    within residual 1e-8.
    """
    if inner.ambient_dim != outer.ambient_dim:
        raise ValueError("bases live in different ambient dimensions")
    vin, vout = inner.matrix, outer.matrix
    if inner.dim:
        resid = vin - vout @ (vout.T @ vin)
        worst = float(np.linalg.norm(resid, axis=0).max(initial=0.0))
        if worst > _CONTAINMENT_TOL:
            raise ValueError(
                f"inner span is not contained in outer span (residual {worst:.2e})"
            )
    k = outer.dim - inner.dim
    if k <= 0:
        return SubspaceBasis.empty(outer.ambient_dim)
    # Project the inner span out of the outer basis, then re-orthonormalize.
    c = vout - vin @ (vin.T @ vout) if inner.dim else vout
    u, s, _ = np.linalg.svd(c, full_matrices=False)
    return SubspaceBasis(_fix_column_signs(u[:, :k]))


def independent_row_select(a, tol_rel: float = DEFAULT_TOL) -> np.ndarray:
    """Maximal linearly independent subset of rows, kept in original order.

    Greedy pivoted elimination: a row is kept when its residual after
    projecting onto the span of previously kept rows is significant
    relative to the matrix scale.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    if a.shape[0] == 0:
        return a.copy()
    smax = float(np.linalg.norm(a, 2)) if a.size else 0.0
    thr = math.sqrt(max(tol_rel, 0.0) * max(smax * smax, 1.0))
    kept_idx: list[int] = []
    q: list[np.ndarray] = []
    for i, row in enumerate(a):
        r = row.copy()
        for basis_vec in q:
            r -= (basis_vec @ r) * basis_vec
        nrm = float(np.linalg.norm(r))
        if nrm > thr:
            kept_idx.append(i)
            q.append(r / nrm)
    return a[kept_idx].copy()


def random_orthogonal(n: int, seed: int) -> np.ndarray:
    """Deterministic random n x n orthogonal matrix for a given seed.

    Orthonormalizes an i.i.d. standard Gaussian matrix; the triangular
    factor's diagonal signs are fixed so the factorization (and hence the
    output) is unique for a given Gaussian draw.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d


def psd_sqrt_factor(a, tol_rel: float = DEFAULT_TOL) -> np.ndarray:
    """n x r factor F with F @ F.T equal to the PSD input (r = effective rank)."""
    w, v, thr = eigh_with_threshold(a, tol_rel)
    keep = w > thr
    return v[:, keep] * np.sqrt(w[keep])
