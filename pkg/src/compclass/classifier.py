"""MAP classification of noisy compressive measurements.

The class-conditional observation density is Gaussian with mean phi @ mu_c
and covariance phi @ Sigma_c @ phi.T + sigma2 * I, which is positive
definite for any positive noise level, so each class gets one Cholesky
factorization that is reused across observations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .measurement import MeasurementKernel
from .source import GmmSource


@dataclass(frozen=True)
class NoisyObservation:
    """A measurement vector plus the noise variance it was taken under."""

    y: np.ndarray
    sigma2: float

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if not np.all(np.isfinite(y)):
            raise ValueError("observation entries must be finite")
        if not (self.sigma2 > 0):
            raise ValueError("noise variance must be strictly positive")
        object.__setattr__(self, "y", y)


class MapClassifier:
    """MAP decision rule with per-class factorizations precomputed once.

    Building the classifier factors every class covariance for a fixed
    (kernel, source, noise) triple; classification of single observations
    or whole batches then costs only triangular solves.
    """

    def __init__(self, kernel: MeasurementKernel, src: GmmSource, sigma2: float):
        if not (sigma2 > 0):
            raise ValueError("noise variance must be strictly positive; the "
                             "noiseless density is degenerate for rank-deficient classes")
        if kernel.n != src.dim:
            raise ValueError(f"kernel columns ({kernel.n}) do not match source dim ({src.dim})")
        self.kernel = kernel
        self.source = src
        self.sigma2 = float(sigma2)
        phi = kernel.phi
        eye = np.eye(kernel.m)
        self._centers = []
        self._factors = []
        self._log_consts = []
        for model in src.classes:
            cov = phi @ model.covariance @ phi.T + self.sigma2 * eye
            factor = cho_factor(cov, lower=True)
            logdet = 2.0 * float(np.sum(np.log(np.diag(factor[0]))))
            self._centers.append(phi @ model.mean)
            self._factors.append(factor)
            self._log_consts.append(np.log(model.prior) - 0.5 * logdet)

    def log_posteriors_batch(self, ys: np.ndarray) -> np.ndarray:
        """Unnormalized log posteriors for a batch of observations.

        Input shape (n, M); output shape (n, L). Entries share one additive
        constant across classes, so argmax and softmax are unaffected.
        """
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        if ys.shape[1] != self.kernel.m:
            raise ValueError(f"observations have dim {ys.shape[1]}, expected {self.kernel.m}")
        out = np.empty((ys.shape[0], self.source.num_classes))
        for c in range(self.source.num_classes):
            z = ys - self._centers[c]
            solved = cho_solve(self._factors[c], z.T)
            quad = np.einsum("ij,ji->i", z, solved)
            out[:, c] = self._log_consts[c] - 0.5 * quad
        return out

    def log_posteriors(self, y) -> np.ndarray:
        return self.log_posteriors_batch(np.asarray(y, dtype=float)[None, :])[0]

    def classify_batch(self, ys: np.ndarray) -> np.ndarray:
        """Class decisions for a batch; ties resolve to the lowest index."""
        return np.argmax(self.log_posteriors_batch(ys), axis=1)

    def classify(self, y) -> int:
        return int(np.argmax(self.log_posteriors(y)))


def log_posteriors(obs: NoisyObservation, kernel: MeasurementKernel, src: GmmSource) -> np.ndarray:
    """Unnormalized log posterior of each class given one observation."""
    return MapClassifier(kernel, src, obs.sigma2).log_posteriors(obs.y)


def classify(obs: NoisyObservation, kernel: MeasurementKernel, src: GmmSource) -> int:
    """MAP class decision for one observation (lowest index wins ties)."""
    return MapClassifier(kernel, src, obs.sigma2).classify(obs.y)
