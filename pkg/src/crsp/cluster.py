"""Spectral clustering on the elementwise-inverse of a dissimilarity matrix."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from crsp.errors import NumericError, ValidationError


def affinity_from_dissimilarity(delta) -> np.ndarray:
    """Off-diagonal reciprocal ``1 / Delta_ij``; the diagonal is set to 0."""
    delta = np.asarray(delta, dtype=np.float64)
    if delta.ndim != 2 or delta.shape[0] != delta.shape[1]:
        raise ValidationError(f"dissimilarity must be square, got {delta.shape}")
    off = ~np.eye(delta.shape[0], dtype=bool)
    if not np.all(np.isfinite(delta[off])) or np.any(delta[off] <= 0):
        raise ValidationError(
            "degenerate dissimilarity: off-diagonal entries must be positive and finite"
        )
    a = np.zeros_like(delta)
    a[off] = 1.0 / delta[off]
    return 0.5 * (a + a.T)


def canonical_labels(labels) -> np.ndarray:
    """Renumber labels 0, 1, ... in order of first appearance."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inverse.ravel()]


def _sq_dist(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = (x**2).sum(axis=1)[:, None] - 2.0 * x @ centers.T + (centers**2).sum(axis=1)[None, :]
    return np.maximum(d, 0.0)


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    idx = [int(rng.integers(n))]
    closest = _sq_dist(x, x[idx])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            nxt = int(rng.integers(n))
        idx.append(nxt)
        closest = np.minimum(closest, _sq_dist(x, x[[nxt]])[:, 0])
    return x[idx].copy()


def _lloyd(x, centers, max_iter, tol):
    k = centers.shape[0]
    prev = np.inf
    for _ in range(max_iter):
        dist = _sq_dist(x, centers)
        labels = dist.argmin(axis=1)
        counts = np.bincount(labels, minlength=k)
        own = dist[np.arange(x.shape[0]), labels]
        for j in np.flatnonzero(counts == 0):
            # reseed an empty cluster at the point farthest from its center;
            # when every point sits on its center there is nothing to split
            far = int(np.argmax(own))
            if own[far] <= 0:
                break
            centers[j] = x[far]
            labels[far] = j
            own[far] = 0.0
        for j in range(k):
            members = labels == j
            if members.any():
                centers[j] = x[members].mean(axis=0)
        inertia = float(((x - centers[labels]) ** 2).sum())
        if inertia == 0.0 or abs(prev - inertia) <= tol * prev:
            break
        prev = inertia
    return labels, inertia


def kmeans(
    points, k: int, seed: int = 0, *, n_init: int = 10, max_iter: int = 300, tol: float = 1e-8
) -> np.ndarray:
    """k-means++ seeded Lloyd iterations; best of ``n_init`` restarts by inertia.

    Deterministic for a given ``seed``. Labels are numbered in order of first
    appearance.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValidationError(f"k must be in [1, {n}], got {k}")
    if k == 1:
        return np.zeros(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(n_init):
        labels, inertia = _lloyd(x, _kmeans_pp(x, k, rng), max_iter, tol)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return canonical_labels(best_labels)


def spectral_embedding(affinity, k: int) -> np.ndarray:
    """Row-normalized bottom-``k`` eigenvectors of ``I - D^{-1/2} A D^{-1/2}``."""
    a = np.asarray(affinity, dtype=np.float64)
    n = a.shape[0]
    if a.ndim != 2 or n != a.shape[1]:
        raise ValidationError(f"affinity must be square, got {a.shape}")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValidationError("affinity must be finite and nonnegative")
    if not np.allclose(a, a.T, rtol=1e-10, atol=0.0):
        raise ValidationError("affinity must be symmetric")
    if np.any(np.diag(a) != 0):
        raise ValidationError("affinity must have a zero diagonal")
    if not 2 <= k <= n:
        raise ValidationError(f"k must be in [2, {n}], got {k}")
    deg = a.sum(axis=1)
    if np.any(deg <= 0):
        raise ValidationError(f"zero-degree row(s): {np.flatnonzero(deg <= 0).tolist()}")
    inv_sqrt = 1.0 / np.sqrt(deg)
    lap = np.eye(n) - inv_sqrt[:, None] * a * inv_sqrt[None, :]
    lap = 0.5 * (lap + lap.T)
    try:
        _, vecs = scipy.linalg.eigh(lap, subset_by_index=[0, k - 1])
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    return vecs / np.where(norms > 0, norms, 1.0)


def spectral_clustering(affinity, k: int, seed: int = 0) -> np.ndarray:
    """Normalized spectral clustering (symmetric Laplacian, unit-length rows)."""
    return kmeans(spectral_embedding(affinity, k), k, seed)
