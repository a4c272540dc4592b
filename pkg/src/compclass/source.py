"""Gaussian mixture source model: class priors, means, low-rank covariances.

A source is an ordered list of classes; each class is a Gaussian with a
possibly rank-deficient covariance, so class signals concentrate on a
linear (or affine, for nonzero means) subspace of the ambient space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, effective_rank, psd_sqrt_factor

_PRIOR_SUM_TOL = 1e-12
_PSD_TOL = 1e-10


@dataclass(frozen=True)
class ClassModel:
    """One mixture component: prior probability, mean vector, PSD covariance."""

    prior: float
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.prior <= 1.0):
            raise ValueError(f"prior must lie in (0, 1], got {self.prior}")
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.covariance, dtype=float)
        if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(cov)):
            raise ValueError("mean and covariance must be finite")
        n = mean.size
        if cov.shape != (n, n):
            raise ValueError(f"covariance shape {cov.shape} does not match dim {n}")
        scale = max(float(np.abs(cov).max(initial=0.0)), 1.0)
        if float(np.abs(cov - cov.T).max(initial=0.0)) > 1e-12 * scale:
            raise ValueError("covariance must be symmetric")
        w = np.linalg.eigvalsh(0.5 * (cov + cov.T))
        lam_max = max(float(w[-1]), 0.0)
        if float(w[0]) < -_PSD_TOL * max(lam_max, 1.0):
            raise ValueError("covariance is not positive semidefinite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class GmmSource:
    """L-class Gaussian mixture over R^N (L >= 2, priors summing to one)."""

    classes: tuple[ClassModel, ...]

    def __post_init__(self):
        classes = tuple(self.classes)
        if len(classes) < 2:
            raise ValueError("a mixture needs at least 2 classes")
        n = classes[0].dim
        if any(c.dim != n for c in classes):
            raise ValueError("all classes must share the same dimension")
        total = sum(c.prior for c in classes)
        if abs(total - 1.0) > _PRIOR_SUM_TOL:
            raise ValueError(f"priors must sum to 1 (got {total!r})")
        object.__setattr__(self, "classes", classes)

    @property
    def dim(self) -> int:
        return self.classes[0].dim

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def priors(self) -> np.ndarray:
        return np.array([c.prior for c in self.classes])

    def check_pair(self, i: int, j: int) -> None:
        L = self.num_classes
        if not (0 <= i < L and 0 <= j < L):
            raise IndexError(f"class index out of range for L={L}")
        if i == j:
            raise ValueError("class indices must be distinct")


@dataclass(frozen=True)
class PairGeometry:
    """Source-domain subspace geometry of one class pair.

    ``rank_i``/``rank_j`` are the covariance ranks, ``rank_joint`` the rank
    of the covariance sum, and ``nonoverlap_dim`` counts the dimensions of
    the two class subspaces outside their intersection.
    """

    rank_i: int
    rank_j: int
    rank_joint: int
    nonoverlap_dim: int


def pair_geometry(src: GmmSource, i: int, j: int, tol_rel: float = DEFAULT_TOL) -> PairGeometry:
    """Ranks of the two class covariances and of their sum, plus the
    non-overlapping dimension count 2*rank_joint - rank_i - rank_j."""
    src.check_pair(i, j)
    ci, cj = src.classes[i].covariance, src.classes[j].covariance
    r_i = effective_rank(ci, tol_rel)
    r_j = effective_rank(cj, tol_rel)
    r_joint = effective_rank(ci + cj, tol_rel)
    return PairGeometry(r_i, r_j, r_joint, 2 * r_joint - r_i - r_j)


def _sample_with_rng(src: GmmSource, rng: np.random.Generator, n: int,
                     tol_rel: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Draw labels and signals using an existing generator.

    Labels come from inverse-CDF sampling of the priors (ties resolved
    toward the lower index); signals are mean + F z with F the PSD
    square-root factor of the class covariance.
    """
    if n < 1:
        raise ValueError("sample count must be at least 1")
    cum = np.cumsum(src.priors)
    u = rng.random(n)
    labels = np.searchsorted(cum, u, side="left")
    labels = np.minimum(labels, src.num_classes - 1)
    z = rng.standard_normal((n, src.dim))
    x = np.empty((n, src.dim))
    for c, model in enumerate(src.classes):
        idx = labels == c
        if not np.any(idx):
            continue
        f = psd_sqrt_factor(model.covariance, tol_rel)
        x[idx] = model.mean + z[idx, : f.shape[1]] @ f.T
    return labels, x


def sample_labeled(src: GmmSource, seed, n: int,
                   tol_rel: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Seeded draw of ``n`` labeled source signals.

    Returns (labels, signals) with labels of shape (n,) and signals of
    shape (n, N); identical seeds give bitwise-identical output.
    """
    rng = np.random.default_rng(seed)
    return _sample_with_rng(src, rng, n, tol_rel)
