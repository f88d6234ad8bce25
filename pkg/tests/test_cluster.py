import numpy as np
import pytest

from crsp.cluster import (
    affinity_from_dissimilarity,
    canonical_labels,
    kmeans,
    spectral_clustering,
    spectral_embedding,
)
from crsp.errors import ValidationError


def test_affinity_reciprocals():
    a = affinity_from_dissimilarity([[0, 2, 4], [2, 0, 0.5], [4, 0.5, 0]])
    np.testing.assert_array_equal(a, [[0, 0.5, 0.25], [0.5, 0, 2], [0.25, 2, 0]])


def test_affinity_rejects_zero_or_inf():
    with pytest.raises(ValidationError, match="degenerate"):
        affinity_from_dissimilarity([[0, 0], [0, 0]])
    with pytest.raises(ValidationError, match="degenerate"):
        affinity_from_dissimilarity([[0, np.inf], [np.inf, 0]])


def _two_cliques(size, bridge=0.01):
    n = 2 * size
    a = np.full((n, n), bridge)
    a[:size, :size] = a[size:, size:] = 1.0
    np.fill_diagonal(a, 0.0)
    return a


def test_two_cliques():
    labels = spectral_clustering(_two_cliques(6), 2)
    np.testing.assert_array_equal(labels, [0] * 6 + [1] * 6)


def test_three_blocks_permuted():
    rng = np.random.default_rng(0)
    truth = np.repeat([0, 1, 2], 10)
    a = np.where(truth[:, None] == truth[None, :], 1.0, 0.02)
    np.fill_diagonal(a, 0.0)
    perm = rng.permutation(30)
    labels = spectral_clustering(a[np.ix_(perm, perm)], 3)
    np.testing.assert_array_equal(labels, canonical_labels(truth[perm]))


def test_k_equals_n():
    a = _two_cliques(2, 0.3)
    assert sorted(spectral_clustering(a, 4)) == [0, 1, 2, 3]


def test_scale_invariance():
    a = _two_cliques(5, 0.05)
    np.testing.assert_array_equal(spectral_clustering(a, 2), spectral_clustering(7.5 * a, 2))


def test_embedding_rows_unit_length():
    emb = spectral_embedding(_two_cliques(5, 0.1), 2)
    np.testing.assert_allclose(np.linalg.norm(emb, axis=1), 1.0, atol=1e-12)


def test_embedding_rejects_bad_affinity():
    a = _two_cliques(3)
    with pytest.raises(ValidationError):
        spectral_embedding(a, 1)
    with pytest.raises(ValidationError):
        spectral_embedding(a + np.eye(6), 2)
    b = a.copy()
    b[0, 1] = 5
    with pytest.raises(ValidationError, match="symmetric"):
        spectral_embedding(b, 2)
    c = a.copy()
    c[0, :] = c[:, 0] = 0
    with pytest.raises(ValidationError, match="zero-degree"):
        spectral_embedding(c, 2)


def test_kmeans_blobs():
    rng = np.random.default_rng(3)
    centers = np.array([[0, 0], [10, 0], [0, 10]])
    truth = np.repeat([0, 1, 2], 30)
    x = centers[truth] + rng.normal(scale=0.5, size=(90, 2))
    np.testing.assert_array_equal(kmeans(x, 3), canonical_labels(truth))


def test_kmeans_identical_points_single_cluster():
    labels = kmeans(np.ones((8, 2)), 3)
    np.testing.assert_array_equal(labels, 0)


def test_kmeans_k_one_and_bounds():
    np.testing.assert_array_equal(kmeans(np.random.default_rng(0).random((5, 2)), 1), 0)
    with pytest.raises(ValidationError):
        kmeans(np.zeros((3, 2)), 4)


def test_kmeans_deterministic_per_seed():
    x = np.random.default_rng(5).random((60, 3))
    np.testing.assert_array_equal(kmeans(x, 4, seed=11), kmeans(x, 4, seed=11))


def test_canonical_labels():
    np.testing.assert_array_equal(canonical_labels([5, 5, 2, 9, 2]), [0, 0, 1, 2, 1])
