"""Graph data model: affinity views, multi-view graphs, and the derived
transition / cost matrices consumed by the RSP core.

An affinity view is a plain ``(n, n)`` float64 array. Zero means "no edge";
the diagonal is always forced to zero. Costs are stored densely with ``0``
marking an absent edge (valid costs are strictly positive), so products such
as ``C * W`` vanish off the edge support without ever forming ``inf * 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csgraph
from scipy.spatial.distance import pdist, squareform

from crsp.errors import ValidationError

ROW_SUM_TOL = 1e-12


def as_view(affinity, *, copy: bool = True) -> np.ndarray:
    """Coerce ``affinity`` to a read-only float64 view with a zero diagonal.

    Only structural problems (not 2-D, not square) raise here; value checks
    live in :func:`validate_view` so callers can inspect them first.
    """
    a = np.array(affinity, dtype=np.float64, copy=copy)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"affinity must be square, got shape {a.shape}")
    if not a.flags.writeable:
        a = a.copy()
    np.fill_diagonal(a, 0.0)
    a.flags.writeable = False
    return a


def _undirected_support(a: np.ndarray) -> np.ndarray:
    s = a != 0
    return s | s.T


def n_components(a: np.ndarray) -> int:
    """Number of connected components on the undirected support of ``a``."""
    if a.shape[0] == 0:
        return 0
    count, _ = csgraph.connected_components(_undirected_support(a), directed=False)
    return int(count)


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self) -> bool:
        return self.ok

    def raise_if_failed(self, what: str = "view") -> None:
        if self.issues:
            raise ValidationError(f"invalid {what}: " + "; ".join(self.issues))


def validate_view(view) -> ValidationReport:
    """Diagnose an affinity matrix without raising.

    Checks squareness, negative / nonfinite entries, asymmetry, isolated
    (zero-degree) nodes and connectivity of the undirected support. The
    diagonal is ignored, matching the self-loop stripping done on ingest.
    """
    a = np.asarray(view, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return ValidationReport((f"non-square: shape {a.shape}",))
    a = a.copy()
    np.fill_diagonal(a, 0.0)
    issues = []
    if not np.all(np.isfinite(a)):
        issues.append("non-finite entry")
        a = np.where(np.isfinite(a), a, 0.0)
    if np.any(a < 0):
        issues.append("negative entry")
    if not np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        issues.append("asymmetric")
    isolated = np.flatnonzero(~_undirected_support(a).any(axis=1))
    if a.shape[0] > 1 and isolated.size:
        issues.append(f"zero-degree nodes: {isolated.tolist()}")
    if n_components(a) > 1:
        issues.append("disconnected")
    return ValidationReport(tuple(issues))


@dataclass(frozen=True)
class MultiViewGraph:
    """``m >= 1`` affinity views over a shared, ordered node set."""

    views: tuple[np.ndarray, ...]
    node_ids: tuple = field(default=())

    def __post_init__(self):
        views = tuple(as_view(v) for v in self.views)
        if not views:
            raise ValidationError("a multi-view graph needs at least one view")
        sizes = {v.shape[0] for v in views}
        if len(sizes) != 1:
            raise ValidationError(f"view size mismatch: {sorted(sizes)}")
        n = views[0].shape[0]
        node_ids = tuple(self.node_ids) if len(self.node_ids) else tuple(range(n))
        if len(node_ids) != n:
            raise ValidationError(f"{len(node_ids)} node ids for {n} nodes")
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "node_ids", node_ids)

    @property
    def n(self) -> int:
        return self.views[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.views)

    def subgraph(self, keep) -> "MultiViewGraph":
        keep = np.asarray(keep, dtype=np.intp)
        return MultiViewGraph(
            tuple(v[np.ix_(keep, keep)] for v in self.views),
            tuple(self.node_ids[i] for i in keep),
        )

    def validate(self) -> list[ValidationReport]:
        return [validate_view(v) for v in self.views]


@dataclass(frozen=True)
class RspInputs:
    """Reference transition matrix and cost matrix sharing one edge support.

    ``cost`` is zero off the support (no edge) and strictly positive and
    finite on it.
    """

    p_ref: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        p = np.array(self.p_ref, dtype=np.float64)
        c = np.array(self.cost, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or c.shape != p.shape:
            raise ValidationError(f"shape mismatch: P {p.shape}, C {c.shape}")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(c))):
            raise ValidationError("non-finite transition or cost entry")
        if np.any(p < 0) or np.any(c < 0):
            raise ValidationError("negative transition or cost entry")
        bad = np.abs(p.sum(axis=1) - 1.0) > ROW_SUM_TOL
        if np.any(bad):
            raise ValidationError(f"rows not stochastic: {np.flatnonzero(bad).tolist()}")
        if not np.array_equal(p > 0, c > 0):
            raise ValidationError("cost support differs from transition support")
        p.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "p_ref", p)
        object.__setattr__(self, "cost", c)

    @property
    def n(self) -> int:
        return self.p_ref.shape[0]

    @property
    def support(self) -> np.ndarray:
        return self.p_ref > 0


def transition_matrix(view, *, allow_isolated: bool = False) -> np.ndarray:
    """Row-normalize the affinities: ``P = D^{-1} A``.

    Zero-degree rows raise unless ``allow_isolated``, in which case they stay
    all-zero (the view says nothing about where that node's walk goes).
    """
    a = as_view(view)
    degree = a.sum(axis=1)
    isolated = degree <= 0
    if isolated.any() and not allow_isolated:
        raise ValidationError(
            f"isolated node(s) {np.flatnonzero(isolated).tolist()}: zero weighted degree"
        )
    return a / np.where(isolated, 1.0, degree)[:, None]


def cost_matrix(view) -> np.ndarray:
    """Edge costs ``1 / a_ij`` on the support of ``view``; 0 marks "no edge"."""
    a = as_view(view)
    c = np.zeros_like(a)
    edge = a > 0
    c[edge] = 1.0 / a[edge]
    return c


def rsp_inputs(view) -> RspInputs:
    return RspInputs(transition_matrix(view), cost_matrix(view))


def gaussian_affinity(features, bandwidth="median") -> np.ndarray:
    """Gaussian-kernel affinities ``exp(-|x_i - x_j|^2 / (2 sigma^2))``.

    ``bandwidth`` is either ``"median"`` (sigma is the median pairwise
    Euclidean distance) or a positive float. The diagonal is zero.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValidationError("need at least 2 feature vectors")
    if not np.all(np.isfinite(x)):
        raise ValidationError("non-finite feature entry")
    dist = pdist(x)
    if isinstance(bandwidth, str):
        if bandwidth != "median":
            raise ValidationError(f"unknown bandwidth mode {bandwidth!r}")
        sigma = float(np.median(dist))
        if sigma <= 0:
            raise ValidationError("degenerate bandwidth: median pairwise distance is 0")
    else:
        sigma = float(bandwidth)
        if not sigma > 0:
            raise ValidationError(f"bandwidth must be positive, got {sigma}")
    a = squareform(np.exp(-(dist**2) / (2.0 * sigma**2)))
    return as_view(a, copy=False)


def median_bandwidth(features) -> float:
    x = np.asarray(features, dtype=np.float64)
    return float(np.median(pdist(x if x.ndim == 2 else x[:, None])))


def _largest_component(a: np.ndarray) -> np.ndarray:
    _, labels = csgraph.connected_components(_undirected_support(a), directed=False)
    sizes = np.bincount(labels)
    # ties go to the component holding the lowest node index
    return np.flatnonzero(labels == np.argmax(sizes))


CULL_RULES = ("views", "union")


def _cull_round(graph: MultiViewGraph, keep: np.ndarray, rule: str) -> np.ndarray:
    subs = [v[np.ix_(keep, keep)] for v in graph.views]
    if rule == "union":
        subs = [sum((sub != 0).astype(np.float64) for sub in subs)]
    mask = np.ones(keep.size, dtype=bool)
    for sub in subs:
        in_lcc = np.zeros(keep.size, dtype=bool)
        in_lcc[_largest_component(sub)] = True
        mask &= in_lcc
    return mask


def cull_disconnected(graph: MultiViewGraph, rule: str = "views") -> MultiViewGraph:
    """Drop nodes until the surviving graph is connected, iterating to a fixed point.

    ``rule="views"`` keeps, each round, the intersection of every view's
    largest connected component, so every view ends up connected.
    ``rule="union"`` only keeps the largest component of the union of all
    views; single views may stay disconnected or leave nodes isolated. That
    is all union-fused C-RSP needs, and it survives sparse views where the
    per-view rule cascades down to nothing.
    """
    if rule not in CULL_RULES:
        raise ValidationError(f"cull rule must be one of {CULL_RULES}, got {rule!r}")
    keep = np.arange(graph.n)
    while True:
        mask = _cull_round(graph, keep, rule)
        if mask.sum() < 2:
            raise ValidationError(f"graph collapsed under culling ({mask.sum()} node(s) left)")
        if mask.all():
            break
        keep = keep[mask]
    if keep.size == graph.n:
        return graph
    return graph.subgraph(keep)


def culled_indices(original: MultiViewGraph, culled: MultiViewGraph) -> np.ndarray:
    """Positions in ``original`` of the nodes that survived into ``culled``."""
    index = {nid: i for i, nid in enumerate(original.node_ids)}
    return np.array([index[nid] for nid in culled.node_ids], dtype=np.intp)
