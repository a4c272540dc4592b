"""Analytic misclassification machinery: pairwise Bhattacharyya exponents
and bounds, the multiclass union bound, low-noise asymptotics (error
floors, diversity-order, measurement gain), high-noise Taylor expansions,
their kernel-averaged coefficients, and slope/gain fitting of bound curves.

All determinants are accumulated as sums of log(eigenvalue + noise), never
as raw products, which keeps the bound evaluable down to noise variances
of 1e-12 and below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, eigh_with_threshold, rank_threshold
from .measurement import MeasurementKernel, projected_covariances, projected_pair_geometry
from .source import GmmSource, pair_geometry

ERROR_FLOOR = "error_floor"
POLYNOMIAL_DECAY = "polynomial_decay"
EXPONENTIAL_DECAY = "exponential_decay"

_MEAN_MEMBERSHIP_TOL = 1e-8
_FLAT_SLOPE = 0.01


@dataclass(frozen=True)
class AsymptoticProfile:
    """Low-noise behavior of a misclassification bound.

    Exactly one of three kinds: a floor (nonzero limit, ``floor_value``
    when computable), polynomial decay with diversity-order ``diversity``
    and measurement gain ``gain`` (times the nonzero-mean factor
    ``mean_gain_factor``), or exponential decay in 1/sigma2.
    """

    kind: str
    floor_value: float | None = None
    diversity: float | None = None
    gain: float | None = None
    mean_gain_factor: float | None = None
    governing_pairs: tuple[tuple[int, int], ...] = ()

    @property
    def effective_gain(self) -> float | None:
        """Gain including the nonzero-mean factor (what a slope fit sees)."""
        if self.gain is None:
            return None
        return self.gain * (self.mean_gain_factor if self.mean_gain_factor else 1.0)

    def describe(self) -> str:
        if self.kind == ERROR_FLOOR:
            if self.floor_value is None:
                return "error_floor"
            return f"error_floor (floor={self.floor_value:.6e})"
        if self.kind == EXPONENTIAL_DECAY:
            return "exponential_decay (bound vanishes exponentially in 1/sigma2)"
        parts = [f"polynomial_decay d={self.diversity:g}"]
        if self.gain is not None:
            parts.append(f"gain={self.gain:.6e}")
        if self.mean_gain_factor is not None and self.mean_gain_factor != 1.0:
            parts.append(f"mean_factor={self.mean_gain_factor:.6e}")
        return ", ".join(parts)


@dataclass(frozen=True)
class HighNoiseExpansion:
    """Taylor coefficients of the pair bound around 1/sigma2 = 0.

    ``quadratic_coeff`` is None for unequal means, where the expansion is
    reported only to first order.
    """

    constant: float
    linear_coeff: float
    quadratic_coeff: float | None


@dataclass(frozen=True)
class AsymptoteFit:
    """Least-squares slope/gain read off the low-noise end of a bound curve."""

    d_hat: float
    gain_hat: float | None
    floored: bool


def _clamp_below_rank(w: np.ndarray, tol_rel: float) -> np.ndarray:
    """Zero out eigenvalues below the rank threshold.

    Rank-deficient directions then contribute exactly log(sigma2) terms,
    keeping the bound evaluable arbitrarily deep into the low-noise regime
    without picking up spectral round-off noise.
    """
    thr = rank_threshold(np.sort(w), tol_rel)
    return np.where(w > thr, w, 0.0)


def _pair_spectra(kernel: MeasurementKernel, src: GmmSource, i: int, j: int,
                  tol_rel: float):
    """Eigenvalues of the projected covariances, eigenpairs of their sum,
    and the projected mean difference."""
    a_i, a_j, a_ij = projected_covariances(kernel, src, i, j)
    w_i = _clamp_below_rank(np.linalg.eigvalsh(a_i), tol_rel)
    w_j = _clamp_below_rank(np.linalg.eigvalsh(a_j), tol_rel)
    w_ij, u_ij, thr = eigh_with_threshold(a_ij, tol_rel)
    w_ij = np.where(w_ij > thr, w_ij, 0.0)
    m_vec = kernel.phi @ (src.classes[i].mean - src.classes[j].mean)
    return w_i, w_j, w_ij, u_ij, thr, m_vec


def bhattacharyya_exponent(kernel: MeasurementKernel, src: GmmSource, i: int, j: int,
                           sigma2: float, tol_rel: float = DEFAULT_TOL) -> float:
    """Exponent K of the pairwise bound sqrt(P_i P_j) * exp(-K).

    K is the sum of a quadratic term in the projected mean difference and
    a log-determinant ratio of the noise-regularized projected covariances.
    """
    if not (sigma2 > 0):
        raise ValueError("noise variance must be strictly positive")
    w_i, w_j, w_ij, u_ij, _, m_vec = _pair_spectra(kernel, src, i, j, tol_rel)
    t2 = 0.5 * (np.sum(np.log((w_ij + 2.0 * sigma2) / 2.0))
                - 0.5 * np.sum(np.log(w_i + sigma2))
                - 0.5 * np.sum(np.log(w_j + sigma2)))
    t1 = 0.0
    if float(np.linalg.norm(m_vec)) > 0.0:
        c = u_ij.T @ m_vec
        t1 = 0.25 * float(np.sum(c * c / (w_ij + 2.0 * sigma2)))
    return max(float(t1 + t2), 0.0)


def pair_upper_bound(kernel: MeasurementKernel, src: GmmSource, i: int, j: int,
                     sigma2: float, tol_rel: float = DEFAULT_TOL) -> float:
    """Pairwise misclassification bound sqrt(P_i P_j) * exp(-K_ij)."""
    k_ij = bhattacharyya_exponent(kernel, src, i, j, sigma2, tol_rel)
    pi, pj = src.classes[i].prior, src.classes[j].prior
    return math.sqrt(pi * pj) * math.exp(-k_ij)


def union_upper_bound(kernel: MeasurementKernel, src: GmmSource, sigma2: float,
                      tol_rel: float = DEFAULT_TOL) -> float:
    """Union bound over all ordered class pairs (not clamped to 1)."""
    if not (sigma2 > 0):
        raise ValueError("noise variance must be strictly positive")
    total = 0.0
    L = src.num_classes
    for i in range(L - 1):
        for j in range(i + 1, L):
            k_ij = bhattacharyya_exponent(kernel, src, i, j, sigma2, tol_rel)
            total += (src.classes[i].prior + src.classes[j].prior) * math.exp(-k_ij)
    return total


def _diversity_order(rank_i: int, rank_j: int, rank_joint: int) -> float:
    return 0.25 * (2 * rank_joint - rank_i - rank_j)


def _pair_gain(rank_joint: int, pdet_i: float, pdet_j: float, pdet_joint: float,
               p_i: float, p_j: float, d: float) -> float:
    base = (2.0 ** (rank_joint / 2.0)) * math.sqrt(p_i * p_j) \
        * (pdet_joint / math.sqrt(pdet_i * pdet_j)) ** (-0.5)
    return base ** (-1.0 / d)


def _floor_limit(rank_joint: int, pdet_i: float, pdet_j: float, pdet_joint: float,
                 p_i: float, p_j: float, mean_quad_at_zero: float) -> float:
    ratio = (2.0 ** (-rank_joint)) * pdet_joint / math.sqrt(pdet_i * pdet_j)
    return math.sqrt(p_i * p_j) * ratio ** (-0.5) * math.exp(-mean_quad_at_zero)


def asymptotic_pair(kernel: MeasurementKernel, src: GmmSource, i: int, j: int,
                    tol_rel: float = DEFAULT_TOL) -> AsymptoticProfile:
    """Low-noise classification of the pair bound for a realized kernel.

    The projected mean difference escaping the image of the projected
    covariance sum gives exponential decay; fully overlapping projected
    images give a floor (whose value is the exact zero-noise limit of the
    bound, including the mean contribution); otherwise the bound decays
    polynomially with the stated diversity-order and gain.
    """
    src.check_pair(i, j)
    w_i, w_j, w_ij, u_ij, thr, m_vec = _pair_spectra(kernel, src, i, j, tol_rel)
    above = w_ij > thr
    r_i = int(np.count_nonzero(w_i > thr))
    r_j = int(np.count_nonzero(w_j > thr))
    r_ij = int(np.count_nonzero(above))
    v_i = float(np.prod(w_i[w_i > thr])) if r_i else 1.0
    v_j = float(np.prod(w_j[w_j > thr])) if r_j else 1.0
    v_ij = float(np.prod(w_ij[above])) if r_ij else 1.0
    p_i, p_j = src.classes[i].prior, src.classes[j].prior

    mean_quad = 0.0
    m_norm = float(np.linalg.norm(m_vec))
    if m_norm > 0.0:
        c = u_ij.T @ m_vec
        null_resid = float(np.linalg.norm(c[~above]))
        if null_resid > _MEAN_MEMBERSHIP_TOL * m_norm:
            return AsymptoticProfile(kind=EXPONENTIAL_DECAY, governing_pairs=((i, j),))
        mean_quad = 0.25 * float(np.sum(c[above] ** 2 / w_ij[above])) if r_ij else 0.0

    if 2 * r_ij == r_i + r_j:
        floor = _floor_limit(r_ij, v_i, v_j, v_ij, p_i, p_j, mean_quad)
        return AsymptoticProfile(kind=ERROR_FLOOR, floor_value=floor,
                                 governing_pairs=((i, j),))
    d = _diversity_order(r_i, r_j, r_ij)
    gain = _pair_gain(r_ij, v_i, v_j, v_ij, p_i, p_j, d)
    a = math.exp(mean_quad / d) if mean_quad > 0.0 else 1.0
    return AsymptoticProfile(kind=POLYNOMIAL_DECAY, diversity=d, gain=gain,
                             mean_gain_factor=a, governing_pairs=((i, j),))


def asymptotic_pair_source(src: GmmSource, i: int, j: int, m: int,
                           tol_rel: float = DEFAULT_TOL) -> AsymptoticProfile:
    """Kernel-free low-noise prediction from source ranks alone.

    Assumes a generic random kernel, whose projected ranks take the value
    min(M, source rank) with probability 1. Only the decay kind and the
    diversity-order are determined; gains and floor values depend on the
    realized kernel and are left unset.
    """
    if m < 1:
        raise ValueError("measurement count must be at least 1")
    geom = pair_geometry(src, i, j, tol_rel)
    rs_lo, rs_hi = sorted((geom.rank_i, geom.rank_j))
    rs_joint = geom.rank_joint
    if 2 * rs_joint == rs_lo + rs_hi or m <= rs_lo:
        return AsymptoticProfile(kind=ERROR_FLOOR, governing_pairs=((i, j),))
    if m <= rs_hi:
        d = 0.25 * (m - rs_lo)
    elif m < rs_joint:
        d = 0.5 * (m - 0.5 * (rs_lo + rs_hi))
    else:
        d = 0.5 * (rs_joint - 0.5 * (rs_lo + rs_hi))
    return AsymptoticProfile(kind=POLYNOMIAL_DECAY, diversity=d,
                             governing_pairs=((i, j),))


def multiclass_asymptotics(kernel: MeasurementKernel, src: GmmSource,
                           tol_rel: float = DEFAULT_TOL) -> AsymptoticProfile:
    """Low-noise behavior of the union bound.

    Any flooring pair floors the whole bound; otherwise the smallest
    pairwise diversity-order governs, with the multiclass gain summed over
    the minimum-diversity pair set. Exponential decay requires every pair
    to decay exponentially. The multiclass gain formula carries no
    nonzero-mean factor (the pairwise profiles report it), and its 2**r
    weighting intentionally follows the multiclass expression rather than
    the pairwise 2**(r/2) one, so the two gains differ even for L = 2.
    """
    L = src.num_classes
    pairs = [(i, j) for i in range(L - 1) for j in range(i + 1, L)]
    profiles = {p: asymptotic_pair(kernel, src, p[0], p[1], tol_rel) for p in pairs}

    floors = [p for p in pairs if profiles[p].kind == ERROR_FLOOR]
    if floors:
        total = 0.0
        for (i, j) in floors:
            p_i, p_j = src.classes[i].prior, src.classes[j].prior
            total += (p_i + p_j) * profiles[(i, j)].floor_value / math.sqrt(p_i * p_j)
        return AsymptoticProfile(kind=ERROR_FLOOR, floor_value=total,
                                 governing_pairs=tuple(floors))

    poly = [p for p in pairs if profiles[p].kind == POLYNOMIAL_DECAY]
    if not poly:
        return AsymptoticProfile(kind=EXPONENTIAL_DECAY, governing_pairs=tuple(pairs))

    d = min(profiles[p].diversity for p in poly)
    governing = tuple(p for p in poly if abs(profiles[p].diversity - d) < 1e-12)
    total = 0.0
    for (i, j) in governing:
        g = projected_pair_geometry(kernel, src, i, j, tol_rel)
        weight = (2.0 ** g.rank_joint) * (g.pdet_joint / math.sqrt(g.pdet_i * g.pdet_j)) ** (-0.5)
        total += (src.classes[i].prior + src.classes[j].prior) * weight
    gain = total ** (-1.0 / d)
    return AsymptoticProfile(kind=POLYNOMIAL_DECAY, diversity=d, gain=gain,
                             governing_pairs=governing)


def high_noise_pair(kernel: MeasurementKernel, src: GmmSource, i: int, j: int) -> HighNoiseExpansion:
    """Taylor expansion of the pair bound around 1/sigma2 = 0.

    Equal means leave no linear term; the quadratic coefficient then comes
    from the five-trace expression below, which cancels exactly for
    identical projected covariances. Note the reported coefficient differs
    from the exact curvature of the bound by
    0.25 * sqrt(P_i P_j) * ((tr A_i - tr A_j) / 2)**2, a term that vanishes
    when the projected traces coincide; the averaged coefficients use the
    same convention, so the two sides stay comparable. Unequal means give
    a negative linear term and the quadratic coefficient is not reported.
    """
    src.check_pair(i, j)
    a_i, a_j, a_ij = projected_covariances(kernel, src, i, j)
    p_i, p_j = src.classes[i].prior, src.classes[j].prior
    const = math.sqrt(p_i * p_j)
    diff = src.classes[i].mean - src.classes[j].mean
    if float(np.linalg.norm(diff)) > 0.0:
        proj = kernel.phi @ diff
        linear = -const / 8.0 * float(proj @ proj)
        return HighNoiseExpansion(constant=const, linear_coeff=linear, quadratic_coeff=None)
    a_bar = a_ij / 2.0
    a_val = (float(np.trace(a_bar @ a_bar))
             - 0.5 * float(np.trace(a_i @ a_i))
             - 0.5 * float(np.trace(a_j @ a_j))
             + float(np.trace(a_i)) * float(np.trace(a_j))
             - float(np.trace(a_bar)) ** 2)
    return HighNoiseExpansion(constant=const, linear_coeff=0.0,
                              quadratic_coeff=0.25 * const * a_val)


def high_noise_trace_coefficient(kernel: MeasurementKernel, src: GmmSource,
                                 i: int, j: int) -> float:
    """The raw trace combination behind the equal-means quadratic term."""
    a_i, a_j, a_ij = projected_covariances(kernel, src, i, j)
    a_bar = a_ij / 2.0
    return (float(np.trace(a_bar @ a_bar))
            - 0.5 * float(np.trace(a_i @ a_i))
            - 0.5 * float(np.trace(a_j @ a_j))
            + float(np.trace(a_i)) * float(np.trace(a_j))
            - float(np.trace(a_bar)) ** 2)


def _expected_sq_trace(eigs: np.ndarray, m: int, m2: float, m4: float) -> float:
    """E{tr[(phi S phi^T)^2]} for an unnormalized Gaussian kernel."""
    s2 = float(np.sum(eigs ** 2))
    s1 = float(np.sum(eigs))
    return m * (m4 * s2 + m2 * (s1 * s1 - s2)) + m * (m - 1) * m2 * s2


def averaged_high_noise(src: GmmSource, i: int, j: int, m: int) -> HighNoiseExpansion:
    """Expected high-noise coefficients over unnormalized Gaussian kernels.

    Uses the second and fourth moments (1 and 3) of a standard Gaussian
    entry; the averaging model takes the kernel entries at unit variance
    without the trace normalization.
    """
    src.check_pair(i, j)
    if m < 1:
        raise ValueError("measurement count must be at least 1")
    s_i = src.classes[i].covariance
    s_j = src.classes[j].covariance
    p_i, p_j = src.classes[i].prior, src.classes[j].prior
    const = math.sqrt(p_i * p_j)
    diff = src.classes[i].mean - src.classes[j].mean
    if float(np.linalg.norm(diff)) > 0.0:
        linear = -const / 8.0 * m * float(diff @ diff)
        return HighNoiseExpansion(constant=const, linear_coeff=linear, quadratic_coeff=None)
    m2, m4 = 1.0, 3.0
    s_bar = (s_i + s_j) / 2.0
    w_i = np.linalg.eigvalsh(s_i)
    w_j = np.linalg.eigvalsh(s_j)
    w_bar = np.linalg.eigvalsh(s_bar)
    tr_i, tr_j, tr_bar = float(np.trace(s_i)), float(np.trace(s_j)), float(np.trace(s_bar))
    e_cross = m * (tr_i * tr_j + 2.0 * float(np.trace(s_i @ s_j))) + m * (m - 1) * tr_i * tr_j
    e_trsq_bar = (m * (tr_bar ** 2 + 2.0 * float(np.trace(s_bar @ s_bar)))
                  + m * (m - 1) * tr_bar ** 2)
    e_a = (_expected_sq_trace(w_bar, m, m2, m4)
           - 0.5 * _expected_sq_trace(w_i, m, m2, m4)
           - 0.5 * _expected_sq_trace(w_j, m, m2, m4)
           + e_cross - e_trsq_bar)
    return HighNoiseExpansion(constant=const, linear_coeff=0.0,
                              quadratic_coeff=0.25 * const * e_a)


def fit_asymptote(curve) -> AsymptoteFit:
    """Slope and gain of a bound curve over its two lowest noise decades.

    ``curve`` is a sequence of (sigma2, bound) points spanning at least two
    decades of sigma2; the fit is a least-squares line through
    log(bound) vs log(sigma2) restricted to the two smallest decades. A
    near-zero slope is reported as a floor with no gain.
    """
    pts = np.array([(float(s), float(v)) for s, v in curve])
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("curve needs at least two (sigma2, value) points")
    if np.any(pts <= 0.0):
        raise ValueError("curve values and noise variances must be strictly positive")
    pts = pts[np.argsort(pts[:, 0])]
    s_min, s_max = pts[0, 0], pts[-1, 0]
    if s_max / s_min < 100.0 * (1.0 - 1e-9):
        raise ValueError("curve must span at least two decades of sigma2")
    window = pts[pts[:, 0] <= s_min * 100.0 * (1.0 + 1e-9)]
    if window.shape[0] < 2:
        raise ValueError("need at least two points inside the two lowest decades")
    slope, _ = np.polyfit(np.log(window[:, 0]), np.log(window[:, 1]), 1)
    d_hat = float(slope)
    if abs(d_hat) < _FLAT_SLOPE:
        return AsymptoteFit(d_hat=d_hat, gain_hat=None, floored=True)
    gain_hat = float(s_min * pts[0, 1] ** (-1.0 / d_hat))
    return AsymptoteFit(d_hat=d_hat, gain_hat=gain_hat, floored=False)
