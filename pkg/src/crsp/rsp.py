"""Single-view randomized shortest path (RSP) dissimilarity.

Given a reference transition matrix ``P`` and edge costs ``C``, the RSP
dissimilarity at inverse temperature ``beta`` is computed in closed form from
the fundamental matrix ``Z = (I - W)^{-1}`` of the Gibbs-reweighted walk
``W = P * exp(-beta * C)``. Large ``beta`` approaches shortest-path costs;
``beta -> 0`` approaches the expected cost of the unbiased absorbing walk
(hitting costs), symmetrized.

The module also carries the two independent oracles used to check those
limits: all-pairs Dijkstra and direct first-step hitting-cost solves.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.linalg
from scipy.sparse import csgraph

from crsp.errors import ConvergenceError, NumericError, ValidationError
from crsp.graph import RspInputs, as_view, transition_matrix

log = logging.getLogger(__name__)

DEFAULT_BETA = 0.02
Z_FLOOR = 1e-300


@dataclass(frozen=True)
class RspParams:
    beta: float = DEFAULT_BETA
    radius_tolerance: float = 1e-12

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValidationError(f"beta must be positive and finite, got {self.beta}")
        if not 0 <= self.radius_tolerance <= 0.1:
            raise ValidationError(
                f"radius_tolerance must lie in [0, 0.1], got {self.radius_tolerance}"
            )


def gibbs_weights(p_ref: np.ndarray, cost: np.ndarray, beta: float) -> np.ndarray:
    """``W = P * exp(-beta * C)`` evaluated on the edge support only."""
    w = np.zeros_like(p_ref, dtype=np.float64)
    edge = p_ref > 0
    with np.errstate(under="ignore"):
        w[edge] = p_ref[edge] * np.exp(-beta * cost[edge])
    return w


def _collatz_wielandt(w: np.ndarray, shift: float) -> Iterator[tuple[float, float]]:
    # For x > 0, min_i (Wx)_i / x_i <= rho(W) <= max_i (Wx)_i / x_i. The shift
    # keeps x strictly positive and makes W + shift*I primitive on each
    # irreducible block, so the two bounds close in on rho.
    x = np.ones(w.shape[0])
    while True:
        y = w @ x + shift * x
        ratio = y / x
        yield float(ratio.min() - shift), float(ratio.max() - shift)
        x = y / y.max()


def spectral_radius_bound(
    w, tol: float = 1e-10, *, shift: float = 0.5, max_iter: int = 100_000
) -> float:
    """Estimate the spectral radius of a nonnegative matrix to within ``tol``.

    Power iteration on ``W + shift*I`` with Collatz-Wielandt bracketing; the
    returned midpoint is within ``tol`` of the true radius. Raises
    :class:`ConvergenceError` when the bracket does not close within
    ``max_iter`` steps.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValidationError(f"W must be square, got {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValidationError("W must be finite and nonnegative")
    if w.shape[0] == 0:
        return 0.0
    for it, (lo, hi) in enumerate(_collatz_wielandt(w, shift)):
        if hi - lo <= 2 * tol:
            return max(0.0, 0.5 * (lo + hi))
        if it >= max_iter:
            raise ConvergenceError(
                f"spectral radius bracket [{lo:.3g}, {hi:.3g}] did not close "
                f"after {max_iter} iterations"
            )
    raise AssertionError("unreachable")


def check_convergence(w: np.ndarray, radius_tolerance: float = 1e-12, *, max_iter: int = 100_000):
    """Raise :class:`ConvergenceError` unless ``rho(W) < 1 - radius_tolerance``.

    The max row sum is tried first since it bounds the radius from above.
    An inconclusive bracket after ``max_iter`` steps counts as failure.
    """
    limit = 1.0 - radius_tolerance
    row_max = float(w.sum(axis=1).max()) if w.size else 0.0
    if row_max < limit:
        return
    for it, (lo, hi) in enumerate(_collatz_wielandt(w, 0.5)):
        if hi < limit:
            return
        if lo >= limit:
            raise ConvergenceError(
                f"will not converge: spectral radius of W is at least {lo:.12g}"
            )
        if it >= max_iter:
            raise ConvergenceError(
                f"will not converge: spectral radius bracket [{lo:.6g}, {hi:.6g}] "
                f"undecided against 1 - {radius_tolerance:g}"
            )


def fundamental_matrix(w: np.ndarray) -> np.ndarray:
    """``Z = (I - W)^{-1}`` through one LU factorization and ``n`` solves."""
    n = w.shape[0]
    a = np.eye(n) - w
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
        except (scipy.linalg.LinAlgWarning, np.linalg.LinAlgError, ValueError) as exc:
            raise NumericError(f"I - W is singular: {exc}") from exc
    anorm = np.abs(a).sum(axis=0).max()
    rcond, info = scipy.linalg.lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not rcond > np.finfo(float).eps:
        raise NumericError(
            f"I - W is numerically singular (reciprocal 1-norm condition {rcond:.3g})"
        )
    z = scipy.linalg.lu_solve((lu, piv), np.eye(n), check_finite=False)
    if not np.all(np.isfinite(z)):
        raise NumericError(f"non-finite entries in Z (condition ~{1 / rcond:.3g})")
    return z


def dissimilarity_from_weights(w: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """Closed-form RSP expected costs from Gibbs weights, symmetrized.

    ``S = (Z (C*W) Z) / Z``, ``Cbar = S - 1 diag(S)^T``,
    ``Delta = (Cbar + Cbar^T) / 2``.
    """
    z = fundamental_matrix(w)
    zmin = z.min()
    if not zmin >= Z_FLOOR:
        raise NumericError(
            f"Z has entries below {Z_FLOOR:g} (min {zmin:.3g}): beta too large for "
            "these costs or graph disconnected"
        )
    s = (z @ (cost * w) @ z) / z
    cbar = s - np.diag(s)[None, :]
    delta = 0.5 * (cbar + cbar.T)
    if not np.all(np.isfinite(delta)):
        raise NumericError("non-finite expected costs")
    np.fill_diagonal(delta, 0.0)
    return delta


def rsp_dissimilarity(inputs: RspInputs, params: RspParams | None = None) -> np.ndarray:
    """Symmetric RSP dissimilarity matrix for one graph."""
    params = params or RspParams()
    w = gibbs_weights(inputs.p_ref, inputs.cost, params.beta)
    check_convergence(w, params.radius_tolerance)
    return dissimilarity_from_weights(w, inputs.cost)


def shortest_path_oracle(inputs: RspInputs) -> np.ndarray:
    """All-pairs minimal path costs (Dijkstra from every source)."""
    cost = np.where(inputs.support, inputs.cost, 0.0)
    return csgraph.dijkstra(cost, directed=True)


def hitting_costs(inputs: RspInputs) -> np.ndarray:
    """Expected cost of the unbiased walk from ``s`` until it first hits ``t``.

    For each target ``t`` the first-step equations
    ``h = r + Q_t h`` are solved directly, with ``Q_t`` the transition
    matrix minus row and column ``t`` and ``r`` the expected one-step cost.
    Entry ``[s, t]`` of the result is ``h_{s->t}``.
    """
    p = inputs.p_ref
    step_cost = (p * inputs.cost).sum(axis=1)
    n = p.shape[0]
    h = np.zeros((n, n))
    for t in range(n):
        rest = np.r_[0:t, t + 1 : n]
        q = p[np.ix_(rest, rest)]
        h[rest, t] = np.linalg.solve(np.eye(n - 1) - q, step_cost[rest])
    return h


def absorbing_cost_oracle(inputs: RspInputs) -> np.ndarray:
    """Symmetrized hitting costs ``(h_{s->t} + h_{t->s}) / 2``; the beta -> 0 limit."""
    h = hitting_costs(inputs)
    return 0.5 * (h + h.T)


def commute_time_oracle(view) -> np.ndarray:
    """Symmetrized expected step counts of the unbiased walk on ``view``."""
    p = transition_matrix(view)
    return absorbing_cost_oracle(RspInputs(p, (p > 0).astype(np.float64)))


def commute_time_distance(view) -> np.ndarray:
    """Commute times ``vol(G) * (L+_ii + L+_jj - 2 L+_ij)`` of a symmetric view.

    Diagnostic only: this is the round trip, i.e. twice
    :func:`commute_time_oracle` on undirected graphs.
    """
    a = as_view(view)
    lap = np.diag(a.sum(axis=1)) - a
    lp = np.linalg.pinv(lap, hermitian=True)
    d = np.diag(lp)
    return a.sum() * (d[:, None] + d[None, :] - 2 * lp)
