import numpy as np
import pytest

from compclass import (
    ClassModel,
    ExplicitProvenance,
    GmmSource,
    MapClassifier,
    MeasurementKernel,
    NoisyObservation,
    classify,
    log_posteriors,
)


def make_source(means, covs, priors=None):
    L = len(means)
    priors = priors or [1.0 / L] * L
    return GmmSource(tuple(ClassModel(p, np.asarray(m, float), np.asarray(c, float))
                           for p, m, c in zip(priors, means, covs)))


def identity_kernel(n):
    return MeasurementKernel(np.eye(n), ExplicitProvenance())


class TestLogPosteriors:
    def test_identical_classes_equal_entries(self):
        src = make_source([[0.0, 0.0]] * 2, [np.eye(2)] * 2)
        obs = NoisyObservation(np.array([0.3, -1.2]), 0.5)
        lp = log_posteriors(obs, identity_kernel(2), src)
        assert lp[0] == pytest.approx(lp[1])

    def test_scalar_gaussian_difference_by_hand(self):
        # Degenerate classes, unit noise: entries differ only through the
        # quadratic term, (0-0)^2/2 vs (0-10)^2/2 = 50.
        src = make_source([[0.0], [10.0]], [np.zeros((1, 1))] * 2)
        obs = NoisyObservation(np.array([0.0]), 1.0)
        lp = log_posteriors(obs, identity_kernel(1), src)
        assert lp[0] - lp[1] == pytest.approx(50.0)

    def test_shared_prior_scaling_shifts_all_entries(self):
        src = make_source([[0.0, 0.0], [1.0, 0.0]], [np.eye(2)] * 2)
        obs = NoisyObservation(np.array([0.4, 0.1]), 0.2)
        lp = log_posteriors(obs, identity_kernel(2), src)
        shifted = lp + np.log(2.0)
        assert np.argmax(shifted) == np.argmax(lp)
        np.testing.assert_allclose(shifted - lp, np.log(2.0))

    def test_sigma_zero_rejected(self):
        src = make_source([[0.0], [1.0]], [np.eye(1)] * 2)
        with pytest.raises(ValueError):
            NoisyObservation(np.array([0.0]), 0.0)
        with pytest.raises(ValueError):
            MapClassifier(identity_kernel(1), src, 0.0)


class TestClassify:
    def test_tie_breaks_to_lowest_index(self):
        src = make_source([[0.0, 0.0]] * 2, [np.eye(2)] * 2)
        obs = NoisyObservation(np.array([1.0, 1.0]), 1.0)
        assert classify(obs, identity_kernel(2), src) == 0

    def test_observation_on_class_image(self):
        # y = (5, 0) lies on class 1's support; verified against a direct
        # dense evaluation of both quadratic forms.
        src = make_source([[0.0, 0.0]] * 2, [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        sigma2 = 1e-4
        y = np.array([5.0, 0.0])
        direct = []
        for c in range(2):
            cov = src.classes[c].covariance + sigma2 * np.eye(2)
            quad = y @ np.linalg.inv(cov) @ y
            direct.append(np.log(0.5) - 0.5 * np.log(np.linalg.det(cov)) - 0.5 * quad)
        assert np.argmax(direct) == 0
        obs = NoisyObservation(y, sigma2)
        assert classify(obs, identity_kernel(2), src) == 0
        np.testing.assert_allclose(log_posteriors(obs, identity_kernel(2), src),
                                   direct, rtol=1e-9)

    def test_prior_dominance(self):
        src = make_source([[0.0], [0.0]], [np.eye(1)] * 2,
                          priors=[1.0 - 1e-12, 1e-12])
        k = identity_kernel(1)
        rng = np.random.default_rng(0)
        clf = MapClassifier(k, src, 1.0)
        ys = rng.standard_normal((200, 1))
        assert np.all(clf.classify_batch(ys) == 0)

    def test_equal_covariance_boundary(self):
        # Sigma1 = Sigma2, equal priors: points near the projected mean of
        # class 1 classify as class 1.
        cov = np.diag([1.0, 0.5])
        src = make_source([[1.0, 0.0], [-1.0, 0.0]], [cov, cov])
        k = identity_kernel(2)
        clf = MapClassifier(k, src, 0.1)
        eps = 1e-3 * np.array([1.0, 1.0])
        assert clf.classify(src.classes[0].mean + eps) == 0
        assert clf.classify(src.classes[1].mean + eps) == 1

    def test_batch_matches_single(self):
        rng = np.random.default_rng(12)
        src = make_source([[0.0, 0, 0], [0.5, -0.2, 0.1]],
                          [np.diag([1.0, 1, 0]), np.diag([0.0, 1, 1])])
        phi = rng.standard_normal((2, 3))
        k = MeasurementKernel(phi, ExplicitProvenance())
        clf = MapClassifier(k, src, 0.05)
        ys = rng.standard_normal((50, 2))
        batch = clf.classify_batch(ys)
        singles = np.array([clf.classify(y) for y in ys])
        np.testing.assert_array_equal(batch, singles)
