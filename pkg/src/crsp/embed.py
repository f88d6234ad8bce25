"""Classical (Torgerson) multidimensional scaling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from crsp.errors import ValidationError


@dataclass(frozen=True)
class Embedding:
    """MDS coordinates plus the spectrum they were cut from.

    ``padded_dims`` counts output columns that had no positive eigenvalue
    and were filled with zeros; ``negative_eigenvalues`` counts eigenvalues
    of the centered Gram matrix clamped to zero (non-Euclidean input).
    """

    coords: np.ndarray
    eigenvalues: np.ndarray
    padded_dims: int
    negative_eigenvalues: int

    @property
    def d(self) -> int:
        return self.coords.shape[1]


def classical_mds(delta, d: int = 2) -> Embedding:
    """Embed a dissimilarity matrix in ``d`` dimensions.

    ``B = -1/2 J (Delta o Delta) J`` with ``J = I - 11^T / n``; the
    coordinates are the top-``d`` eigenvectors of ``B`` scaled by the square
    roots of their (clamped) eigenvalues. Each column's sign is fixed so its
    largest-magnitude entry is positive, which makes the output deterministic.
    """
    delta = np.asarray(delta, dtype=np.float64)
    if delta.ndim != 2 or delta.shape[0] != delta.shape[1]:
        raise ValidationError(f"dissimilarity must be square, got {delta.shape}")
    n = delta.shape[0]
    if not 1 <= d <= n - 1:
        raise ValidationError(f"embedding dimension must be in [1, {n - 1}], got {d}")
    if not np.all(np.isfinite(delta)):
        raise ValidationError("non-finite dissimilarity")

    sq = delta**2
    # double centering without forming J
    b = sq - sq.mean(axis=0, keepdims=True) - sq.mean(axis=1, keepdims=True) + sq.mean()
    b = -0.5 * b
    b = 0.5 * (b + b.T)

    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]

    scale = np.finfo(float).eps * n * max(float(np.abs(evals).max()), 1.0)
    top = evals[:d]
    positive = top > scale
    coords = np.zeros((n, d))
    coords[:, positive] = evecs[:, :d][:, positive] * np.sqrt(top[positive])

    for j in range(d):
        col = coords[:, j]
        pivot = np.argmax(np.abs(col))
        if col[pivot] < 0:
            coords[:, j] = -col
    coords -= coords.mean(axis=0)

    return Embedding(
        coords=coords,
        eigenvalues=evals,
        padded_dims=int(d - positive.sum()),
        negative_eigenvalues=int((evals < -scale).sum()),
    )
