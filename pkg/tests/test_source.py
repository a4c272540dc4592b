import numpy as np
import pytest

from compclass import (
    ClassModel,
    GmmSource,
    image_basis,
    pair_geometry,
    random_orthogonal,
    sample_labeled,
)


def two_class(dim, eigs1, eigs2, prior1=0.5, mean1=None, mean2=None, rot=None):
    u = random_orthogonal(dim, rot) if rot is not None else np.eye(dim)
    c1 = u @ np.diag(eigs1) @ u.T
    c2 = u @ np.diag(eigs2) @ u.T
    m1 = np.zeros(dim) if mean1 is None else np.asarray(mean1, float)
    m2 = np.zeros(dim) if mean2 is None else np.asarray(mean2, float)
    return GmmSource((ClassModel(prior1, m1, c1),
                      ClassModel(1 - prior1, m2, c2)))


class TestValidation:
    def test_prior_out_of_range(self):
        with pytest.raises(ValueError):
            ClassModel(0.0, np.zeros(2), np.eye(2))

    def test_non_psd_covariance_rejected(self):
        with pytest.raises(ValueError):
            ClassModel(0.5, np.zeros(2), np.array([[1.0, 0.0], [0.0, -1.0]]))

    def test_priors_must_sum_to_one(self):
        with pytest.raises(ValueError):
            GmmSource((ClassModel(0.5, np.zeros(2), np.eye(2)),
                       ClassModel(0.4, np.zeros(2), np.eye(2))))

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            GmmSource((ClassModel(1.0, np.zeros(2), np.eye(2)),))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            GmmSource((ClassModel(0.5, np.zeros(2), np.eye(2)),
                       ClassModel(0.5, np.zeros(3), np.eye(3))))


class TestPairGeometry:
    def test_shared_basis_overlap(self):
        src = two_class(6, [1, 1, 0, 0, 0, 0], [0, 1, 1, 1, 0, 0], rot=3)
        g = pair_geometry(src, 0, 1)
        assert (g.rank_i, g.rank_j, g.rank_joint, g.nonoverlap_dim) == (2, 3, 4, 3)

    def test_identical_covariances_no_nonoverlap(self):
        src = two_class(4, [1, 2, 0, 0], [1, 2, 0, 0], rot=5)
        assert pair_geometry(src, 0, 1).nonoverlap_dim == 0

    def test_planes_sharing_a_line(self):
        src = two_class(3, [1, 1, 0], [0, 1, 1])
        g = pair_geometry(src, 0, 1)
        assert (g.rank_i, g.rank_j, g.rank_joint, g.nonoverlap_dim) == (2, 2, 3, 2)

    def test_symmetric_in_indices(self):
        src = two_class(6, [1, 1, 0, 0, 0, 0], [0, 1, 1, 1, 0, 0], rot=3)
        a, b = pair_geometry(src, 0, 1), pair_geometry(src, 1, 0)
        assert (a.rank_i, a.rank_j) == (b.rank_j, b.rank_i)
        assert a.rank_joint == b.rank_joint and a.nonoverlap_dim == b.nonoverlap_dim

    def test_index_errors(self):
        src = two_class(3, [1, 1, 0], [0, 1, 1])
        with pytest.raises(IndexError):
            pair_geometry(src, 0, 2)
        with pytest.raises(ValueError):
            pair_geometry(src, 1, 1)

    def test_half_rank_sum_never_exceeds_joint_rank(self):
        rng = np.random.default_rng(21)
        for trial in range(25):
            n = int(rng.integers(2, 8))
            e1 = (rng.random(n) < 0.6) * rng.uniform(0.5, 2.0, n)
            e2 = (rng.random(n) < 0.6) * rng.uniform(0.5, 2.0, n)
            src = two_class(n, e1, e2, rot=trial)
            g = pair_geometry(src, 0, 1)
            assert g.rank_i + g.rank_j <= 2 * g.rank_joint
            assert max(g.rank_i, g.rank_j) <= g.rank_joint <= min(n, g.rank_i + g.rank_j)


class TestSampling:
    def test_zero_covariances_return_means(self):
        src = GmmSource((ClassModel(0.5, [1.0, 2.0], np.zeros((2, 2))),
                         ClassModel(0.5, [-3.0, 0.5], np.zeros((2, 2)))))
        labels, x = sample_labeled(src, 0, 200)
        means = np.array([[1.0, 2.0], [-3.0, 0.5]])
        np.testing.assert_allclose(x, means[labels])

    def test_forced_label_degenerate_prior(self):
        # Prior mass pushed to the first class up to validation tolerance.
        src = GmmSource((ClassModel(1.0 - 1e-13, [0.0], [[1.0]]),
                         ClassModel(1e-13, [5.0], [[1.0]])))
        labels, _ = sample_labeled(src, 1, 5000)
        assert np.all(labels == 0)

    def test_sample_covariance_converges(self):
        cov = np.diag([1.0, 1.0, 0.0])
        src = GmmSource((ClassModel(0.5, np.zeros(3), cov),
                         ClassModel(0.5, np.zeros(3), cov)))
        _, x = sample_labeled(src, 2, 100_000)
        emp = x.T @ x / x.shape[0]
        assert np.linalg.norm(emp - cov) < 0.05

    def test_label_frequencies_match_priors(self):
        src = GmmSource((ClassModel(0.2, np.zeros(2), np.eye(2)),
                         ClassModel(0.3, np.zeros(2), np.eye(2)),
                         ClassModel(0.5, np.zeros(2), np.eye(2))))
        n = 100_000
        labels, _ = sample_labeled(src, 3, n)
        for c, p in enumerate([0.2, 0.3, 0.5]):
            k = np.count_nonzero(labels == c)
            sigma = np.sqrt(n * p * (1 - p))
            assert abs(k - n * p) < 3 * sigma

    def test_samples_live_on_class_image(self):
        src = two_class(5, [2, 1, 0, 0, 0], [0, 0, 1, 1, 0], rot=9)
        labels, x = sample_labeled(src, 4, 500)
        for c in range(2):
            img = image_basis(src.classes[c].covariance)
            centered = x[labels == c] - src.classes[c].mean
            resid = centered - centered @ img.matrix @ img.matrix.T
            assert np.abs(resid).max() < 1e-8

    def test_deterministic_given_seed(self):
        src = two_class(3, [1, 1, 0], [0, 1, 1], rot=2)
        la, xa = sample_labeled(src, 42, 1000)
        lb, xb = sample_labeled(src, 42, 1000)
        np.testing.assert_array_equal(la, lb)
        np.testing.assert_array_equal(xa, xb)
