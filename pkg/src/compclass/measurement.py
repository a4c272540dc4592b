"""Measurement kernels: random Gaussian projections and diversity-optimized
designs built from covariance null-space complements, plus the projected
subspace geometry they induce on a mixture source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    SubspaceBasis,
    complement_basis_within,
    effective_rank,
    image_basis,
    independent_row_select,
    null_space_basis,
    rank_and_pdet,
)
from .source import GmmSource

_ORTHO_ROW_TOL = 1e-8
_MEAN_MEMBERSHIP_TOL = 1e-8


class DesignImpossibleError(ValueError):
    """No diversity-achieving design exists for the given pair of classes."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None,
                 nonoverlap_dim: int = 0):
        super().__init__(message)
        self.pair = pair
        self.nonoverlap_dim = nonoverlap_dim


class EmptyDesignError(ValueError):
    """The multiclass deletion loop exhausted every per-pair block."""


@dataclass(frozen=True)
class RandomProvenance:
    seed: int
    normalized: bool

    def describe(self) -> str:
        return f"random(seed={self.seed},normalized={str(self.normalized).lower()})"


@dataclass(frozen=True)
class DesignProvenance:
    recipe: str
    pairs: tuple[tuple[int, int], ...] = ()
    note: str = ""

    def describe(self) -> str:
        return f"designed({self.recipe})"


@dataclass(frozen=True)
class ExplicitProvenance:
    note: str = "user-supplied"

    def describe(self) -> str:
        return "explicit"


_TWO_CLASS_RECIPES = ("two_zero_mean", "two_nonzero_mean", "mean_aligned")


@dataclass(frozen=True)
class MeasurementKernel:
    """An M x N measurement matrix together with how it was built."""

    phi: np.ndarray
    provenance: RandomProvenance | DesignProvenance | ExplicitProvenance

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim != 2 or phi.shape[0] < 1 or phi.shape[1] < 1:
            raise ValueError(f"kernel must be a nonempty 2-d matrix, got {phi.shape}")
        if not np.all(np.isfinite(phi)):
            raise ValueError("kernel entries must be finite")
        # Two-class designs emit orthonormal rows by construction; multi-pair
        # stacks are only orthonormal within each per-pair block.
        if (isinstance(self.provenance, DesignProvenance)
                and self.provenance.recipe in _TWO_CLASS_RECIPES):
            gram = phi @ phi.T
            if float(np.abs(gram - np.eye(phi.shape[0])).max()) > _ORTHO_ROW_TOL:
                raise ValueError("designed kernel rows are not orthonormal")
        object.__setattr__(self, "phi", phi)

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def n(self) -> int:
        return self.phi.shape[1]

    def describe(self) -> str:
        return self.provenance.describe()


@dataclass(frozen=True)
class ProjectedPairGeometry:
    """Measurement-domain geometry of one class pair: ranks and
    pseudo-determinants of the projected covariances and of their sum."""

    rank_i: int
    rank_j: int
    rank_joint: int
    pdet_i: float
    pdet_j: float
    pdet_joint: float


def random_gaussian_kernel(m: int, n: int, seed: int, normalized: bool = True) -> MeasurementKernel:
    """i.i.d. standard Gaussian kernel, optionally rescaled by M / tr(phi phi^T)."""
    if m < 1 or n < 1:
        raise ValueError("kernel dimensions must be at least 1")
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal((m, n))
    if normalized:
        phi = (m / float(np.trace(phi @ phi.T))) * phi
    return MeasurementKernel(phi, RandomProvenance(seed=seed, normalized=normalized))


def projected_covariances(kernel: MeasurementKernel, src: GmmSource, i: int, j: int):
    """Projected covariance of class i, of class j, and of their sum."""
    src.check_pair(i, j)
    phi = kernel.phi
    a_i = phi @ src.classes[i].covariance @ phi.T
    a_j = phi @ src.classes[j].covariance @ phi.T
    return a_i, a_j, a_i + a_j


def projected_pair_geometry(kernel: MeasurementKernel, src: GmmSource, i: int, j: int,
                            tol_rel: float = DEFAULT_TOL) -> ProjectedPairGeometry:
    a_i, a_j, a_ij = projected_covariances(kernel, src, i, j)
    r_i, v_i = rank_and_pdet(a_i, tol_rel)
    r_j, v_j = rank_and_pdet(a_j, tol_rel)
    r_ij, v_ij = rank_and_pdet(a_ij, tol_rel)
    return ProjectedPairGeometry(r_i, r_j, r_ij, v_i, v_j, v_ij)


def _null_complements(sigma_a, sigma_b, tol_rel) -> tuple[SubspaceBasis, SubspaceBasis]:
    """Bases extending Null(A) ∩ Null(B) inside Null(A) and inside Null(B).

    For PSD matrices the intersection of the null spaces equals the null
    space of the sum.
    """
    joint_null = null_space_basis(np.asarray(sigma_a) + np.asarray(sigma_b), tol_rel)
    ext_a = complement_basis_within(joint_null, null_space_basis(sigma_a, tol_rel))
    ext_b = complement_basis_within(joint_null, null_space_basis(sigma_b, tol_rel))
    return ext_a, ext_b


def zero_mean_design_rows(sigma_a, sigma_b, tol_rel: float = DEFAULT_TOL) -> tuple[np.ndarray, int, int]:
    """Full stack of diversity-achieving rows for a zero-mean pair.

    Rows are the null-space complement vectors of the first class followed
    by those of the second; the stack has nonoverlap_dim rows.
    """
    ext_a, ext_b = _null_complements(sigma_a, sigma_b, tol_rel)
    rows = np.vstack([ext_a.matrix.T, ext_b.matrix.T])
    return rows, ext_a.dim, ext_b.dim


def design_two_zero_mean(sigma1, sigma2, m: int, tol_rel: float = DEFAULT_TOL,
                         pair: tuple[int, int] = (0, 1)) -> MeasurementKernel:
    """Diversity-maximizing kernel for two zero-mean classes.

    With enough budget all null-space complement rows are used (extra
    budget adds no diversity and is left unused); with a short budget a
    balanced split across the two complements is taken.
    """
    if m < 1:
        raise ValueError("measurement budget must be at least 1")
    rows, n_a, n_b = zero_mean_design_rows(sigma1, sigma2, tol_rel)
    nodim = n_a + n_b
    if nodim == 0:
        raise DesignImpossibleError(
            "class covariance images overlap completely (no non-overlapping "
            "dimensions); no zero-mean design can separate them",
            pair=pair, nonoverlap_dim=0)
    if m >= nodim:
        m_a, m_b = n_a, n_b
        chosen = rows
    else:
        m_a = min(n_a, max(math.ceil(m / 2), m - n_b))
        m_b = m - m_a
        chosen = np.vstack([rows[:m_a], rows[n_a:n_a + m_b]])
    prov = DesignProvenance(recipe="two_zero_mean", pairs=(pair,),
                            note=f"split={m_a}+{m_b}")
    return MeasurementKernel(chosen, prov)


def _mean_outside_image(mean_diff: np.ndarray, sigma_sum, tol_rel: float) -> np.ndarray | None:
    """Null-space component of the mean difference, or None when the
    difference lies in the image of the covariance sum (relative residual
    below 1e-8)."""
    norm = float(np.linalg.norm(mean_diff))
    if norm == 0.0:
        return None
    img = image_basis(sigma_sum, tol_rel)
    resid = mean_diff - img.matrix @ (img.matrix.T @ mean_diff)
    if float(np.linalg.norm(resid)) <= _MEAN_MEMBERSHIP_TOL * norm:
        return None
    return resid


def design_two_nonzero_mean(mu1, mu2, sigma1, sigma2, m: int,
                            tol_rel: float = DEFAULT_TOL,
                            pair: tuple[int, int] = (0, 1)) -> MeasurementKernel:
    """Kernel for two nonzero-mean classes.

    When the mean difference sticks out of the image of the covariance
    sum, a single row along its null-space component already separates the
    classes perfectly at vanishing noise; otherwise the zero-mean design
    applies unchanged.
    """
    if m < 1:
        raise ValueError("measurement budget must be at least 1")
    mu1 = np.asarray(mu1, dtype=float).reshape(-1)
    mu2 = np.asarray(mu2, dtype=float).reshape(-1)
    diff = mu1 - mu2
    resid = _mean_outside_image(diff, np.asarray(sigma1) + np.asarray(sigma2), tol_rel)
    if resid is not None:
        phi = resid / float(np.linalg.norm(resid))
        prov = DesignProvenance(recipe="two_nonzero_mean", pairs=(pair,))
        return MeasurementKernel(phi[None, :], prov)
    return design_two_zero_mean(sigma1, sigma2, m, tol_rel, pair=pair)


def _stack_rank(rows: np.ndarray, tol_rel: float) -> int:
    return effective_rank(rows.T @ rows, tol_rel)


def design_multi_zero_mean(src: GmmSource, m: int, tol_rel: float = DEFAULT_TOL) -> MeasurementKernel:
    """Multiclass zero-mean design: per-pair blocks sized by the least
    separable pair, stacked and trimmed to the measurement budget.

    Blocks take the leading rows of each pair's null-space complement
    stack; while the stacked rank exceeds the budget, the last row of
    every block is deleted and the stack rebuilt.
    """
    if m < 1:
        raise ValueError("measurement budget must be at least 1")
    L = src.num_classes
    if L == 2:
        return design_two_zero_mean(src.classes[0].covariance, src.classes[1].covariance,
                                    m, tol_rel, pair=(0, 1))
    pairs = [(i, j) for i in range(L - 1) for j in range(i + 1, L)]
    full_rows: dict[tuple[int, int], np.ndarray] = {}
    nodims: dict[tuple[int, int], int] = {}
    for (i, j) in pairs:
        rows, n_a, n_b = zero_mean_design_rows(
            src.classes[i].covariance, src.classes[j].covariance, tol_rel)
        full_rows[(i, j)] = rows
        nodims[(i, j)] = n_a + n_b
    istar, jstar = min(pairs, key=lambda p: (nodims[p], p))
    k = nodims[(istar, jstar)]
    if k == 0:
        raise DesignImpossibleError(
            f"classes {istar} and {jstar} have fully overlapping covariance "
            "images; the multiclass design has no non-overlapping dimension "
            "to measure",
            pair=(istar, jstar), nonoverlap_dim=0)
    blocks = {p: full_rows[p][:k] for p in pairs}
    while True:
        stacked = [blocks[p] for p in pairs if blocks[p].shape[0] > 0]
        if not stacked:
            raise EmptyDesignError(
                "deletion loop removed every designed row while the stacked "
                f"rank still exceeded the budget M={m}")
        stack = np.vstack(stacked)
        if _stack_rank(stack, tol_rel) <= m:
            rows = independent_row_select(stack, tol_rel)
            prov = DesignProvenance(
                recipe="multi_zero_mean", pairs=tuple(pairs),
                note=f"min_pair=({istar},{jstar}),block_rows={k}")
            return MeasurementKernel(rows, prov)
        blocks = {p: b[:-1] for p, b in blocks.items()}


def design_multi_nonzero_mean(src: GmmSource, m: int, tol_rel: float = DEFAULT_TOL) -> MeasurementKernel:
    """Multiclass nonzero-mean design.

    If every pair's mean difference leaves the image of its covariance
    sum, one null-space row per pair suffices (within budget); any failure
    routes to the zero-mean multiclass design.
    """
    if m < 1:
        raise ValueError("measurement budget must be at least 1")
    L = src.num_classes
    if L == 2:
        c0, c1 = src.classes
        return design_two_nonzero_mean(c0.mean, c1.mean, c0.covariance, c1.covariance,
                                       m, tol_rel, pair=(0, 1))
    pairs = [(i, j) for i in range(L - 1) for j in range(i + 1, L)]
    rows = []
    for (i, j) in pairs:
        ci, cj = src.classes[i], src.classes[j]
        resid = _mean_outside_image(ci.mean - cj.mean,
                                    ci.covariance + cj.covariance, tol_rel)
        if resid is None:
            return design_multi_zero_mean(src, m, tol_rel)
        rows.append(resid / float(np.linalg.norm(resid)))
    stack = np.vstack(rows)
    if _stack_rank(stack, tol_rel) <= m:
        selected = independent_row_select(stack, tol_rel)
        prov = DesignProvenance(recipe="multi_nonzero_mean", pairs=tuple(pairs))
        return MeasurementKernel(selected, prov)
    return design_multi_zero_mean(src, m, tol_rel)


def mean_aligned_kernel(mu1, mu2) -> MeasurementKernel:
    """Single unit-norm row along the mean difference.

    This is the high-noise-optimal single measurement for nonzero-mean
    classes: it maximizes the leading term of the bound expansion at large
    noise.
    """
    diff = np.asarray(mu1, dtype=float).reshape(-1) - np.asarray(mu2, dtype=float).reshape(-1)
    nrm = float(np.linalg.norm(diff))
    if nrm == 0.0:
        raise ValueError("means are identical; no aligned direction exists")
    prov = DesignProvenance(recipe="mean_aligned", pairs=((0, 1),))
    return MeasurementKernel((diff / nrm)[None, :], prov)
