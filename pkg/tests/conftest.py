import numpy as np
import pytest

from compclass import build_source, built_in_scenarios


@pytest.fixture(scope="session")
def catalog():
    return built_in_scenarios()


@pytest.fixture(scope="session")
def sources(catalog):
    return {name: build_source(cfg) for name, cfg in catalog.items()}


def random_psd(rng, n, rank, scale=1.0):
    """Random PSD matrix of exact rank via a rotated diagonal spectrum."""
    eigs = np.zeros(n)
    eigs[:rank] = scale * (0.5 + rng.random(rank))
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    return q @ np.diag(eigs) @ q.T


def empirical_trace_coefficient_mean(src, m, n_draws, seed):
    """Mean of the five-trace high-noise coefficient over unnormalized
    Gaussian kernel draws (vectorized over draws)."""
    s1 = src.classes[0].covariance
    s2 = src.classes[1].covariance
    n = src.dim
    rng = np.random.default_rng(seed)
    total = 0.0
    batch = 20_000
    remaining = n_draws
    while remaining > 0:
        b = min(remaining, batch)
        phi = rng.standard_normal((b, m, n))
        a1 = np.einsum("bmi,ij,bkj->bmk", phi, s1, phi)
        a2 = np.einsum("bmi,ij,bkj->bmk", phi, s2, phi)
        abar = 0.5 * (a1 + a2)
        tr1 = np.einsum("bii->b", a1)
        tr2 = np.einsum("bii->b", a2)
        trb = np.einsum("bii->b", abar)
        a_vals = (np.einsum("bij,bji->b", abar, abar)
                  - 0.5 * np.einsum("bij,bji->b", a1, a1)
                  - 0.5 * np.einsum("bij,bji->b", a2, a2)
                  + tr1 * tr2 - trb ** 2)
        total += float(a_vals.sum())
        remaining -= b
    return total / n_draws


def empirical_projected_mean_norm(src, m, n_draws, seed):
    """Mean of ||phi (mu_i - mu_j)||^2 over unnormalized Gaussian kernels."""
    diff = src.classes[0].mean - src.classes[1].mean
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal((n_draws, m, src.dim))
    proj = phi @ diff
    return float(np.mean(np.sum(proj * proj, axis=1)))
