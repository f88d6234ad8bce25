"""Synthetic multi-view data: stochastic block models and a holed Swiss roll."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from crsp.errors import ValidationError
from crsp.graph import MultiViewGraph, cull_disconnected, culled_indices, gaussian_affinity

# parameter rectangle of the roll: angle t and height h
SWISS_T_RANGE = (1.5 * np.pi, 4.5 * np.pi)
SWISS_H_RANGE = (0.0, 21.0)
DEFAULT_HOLES = (((7.5, 7.0), 1.75), ((11.5, 14.0), 1.75))
DEFAULT_ANGLES = (0.0, 45.0, 90.0, 135.0)


@dataclass(frozen=True)
class SbmParams:
    """Planted-partition model: ``k`` equal clusters, within-cluster edge
    probability ``c/n``, between-cluster probability ``c(1 - lam)/n``, and
    ``m`` independent views sharing the partition."""

    n: int
    k: int
    c: float
    lam: float
    m: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.n >= self.k >= 2:
            raise ValidationError(f"need n >= k >= 2, got n={self.n}, k={self.k}")
        if not self.c > 0:
            raise ValidationError(f"c must be positive, got {self.c}")
        if not 0 <= self.lam <= 1:
            raise ValidationError(f"lambda must be in [0, 1], got {self.lam}")
        if self.m < 1:
            raise ValidationError(f"need at least one view, got m={self.m}")
        if self.p_in > 1:
            raise ValidationError(f"intra-cluster probability c/n = {self.p_in} exceeds 1")

    @property
    def p_in(self) -> float:
        return self.c / self.n

    @property
    def p_out(self) -> float:
        return self.c * (1.0 - self.lam) / self.n


def block_labels(n: int, k: int) -> np.ndarray:
    """Contiguous blocks of sizes ``n // k``, the first ``n % k`` one larger."""
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    return np.repeat(np.arange(k), sizes)


def view_rngs(seed: int, m: int) -> list[np.random.Generator]:
    """One independent generator per view, all spawned from ``seed``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(m)]


def sbm_view(labels: np.ndarray, p_in: float, p_out: float, rng: np.random.Generator):
    n = labels.size
    iu, ju = np.triu_indices(n, 1)
    prob = np.where(labels[iu] == labels[ju], p_in, p_out)
    hit = rng.random(iu.size) < prob
    a = np.zeros((n, n))
    a[iu[hit], ju[hit]] = 1.0
    return a + a.T


def generate_sbm_raw(params: SbmParams) -> tuple[MultiViewGraph, np.ndarray]:
    """Multi-view SBM before culling (views may be disconnected)."""
    labels = block_labels(params.n, params.k)
    views = tuple(
        sbm_view(labels, params.p_in, params.p_out, rng)
        for rng in view_rngs(params.seed, params.m)
    )
    return MultiViewGraph(views), labels


def generate_sbm(params: SbmParams, cull: str = "views") -> tuple[MultiViewGraph, np.ndarray]:
    """Multi-view SBM culled with :func:`cull_disconnected` (``cull`` picks the rule).

    Surviving nodes keep their original indices as ``node_ids``; the
    returned labels are restricted to the survivors.
    """
    raw, labels = generate_sbm_raw(params)
    graph = cull_disconnected(raw, cull)
    return graph, labels[culled_indices(raw, graph)]


@dataclass(frozen=True)
class PointCloud3D:
    points: np.ndarray
    t: np.ndarray
    h: np.ndarray

    @property
    def node_params(self) -> np.ndarray:
        return self.t


def _in_holes(t, h, holes) -> np.ndarray:
    inside = np.zeros(t.shape, dtype=bool)
    for (tc, hc), r in holes:
        inside |= (t - tc) ** 2 + (h - hc) ** 2 < r**2
    return inside


def generate_swiss_roll(
    n: int,
    holes=DEFAULT_HOLES,
    seed: int = 0,
    *,
    t_range=SWISS_T_RANGE,
    h_range=SWISS_H_RANGE,
    max_draws: int = 1000,
) -> PointCloud3D:
    """Sample ``(t, h)`` uniformly outside the holes, map to
    ``(t cos t, h, t sin t)``.

    ``holes`` is a sequence of ``((t_center, h_center), radius)``. Raises
    when rejection sampling cannot fill ``n`` points within ``max_draws * n``
    proposals, which is how fully covered rectangles show up.
    """
    if n < 10:
        raise ValidationError(f"need n >= 10 points, got {n}")
    holes = tuple(((float(c[0]), float(c[1])), float(r)) for c, r in holes)
    rng = np.random.default_rng(seed)
    ts, hs, drawn, have = [], [], 0, 0
    while have < n:
        if drawn >= max_draws * n:
            raise ValidationError(
                f"holes cover the parameter rectangle: {have} of {n} points after {drawn} draws"
            )
        t = rng.uniform(*t_range, size=2 * n)
        h = rng.uniform(*h_range, size=2 * n)
        drawn += 2 * n
        keep = ~_in_holes(t, h, holes)
        ts.append(t[keep])
        hs.append(h[keep])
        have += int(keep.sum())
    t = np.concatenate(ts)[:n]
    h = np.concatenate(hs)[:n]
    points = np.column_stack([t * np.cos(t), h, t * np.sin(t)])
    return PointCloud3D(points, t, h)


def rotation_about_y(degrees: float) -> np.ndarray:
    th = np.deg2rad(degrees)
    c, s = np.cos(th), np.sin(th)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def project_views(cloud, angles=DEFAULT_ANGLES) -> list[np.ndarray]:
    """Rotate the cloud and drop the depth axis, once per rotation.

    Each entry of ``angles`` is either a rotation about the y axis in degrees
    or an explicit 3x3 rotation matrix. Returns ``(n, 2)`` feature matrices.
    """
    points = cloud.points if isinstance(cloud, PointCloud3D) else np.asarray(cloud, float)
    if len(angles) == 0:
        raise ValidationError("need at least one projection angle")
    out = []
    for angle in angles:
        rot = np.asarray(angle, dtype=np.float64)
        if rot.ndim == 0:
            rot = rotation_about_y(float(rot))
        if rot.shape != (3, 3):
            raise ValidationError(f"rotation must be a 3x3 matrix, got {rot.shape}")
        out.append((points @ rot.T)[:, :2])
    return out


def swiss_roll_graph(cloud: PointCloud3D, angles=DEFAULT_ANGLES, bandwidth="median"):
    """Multi-view graph with one Gaussian-kernel view per projection."""
    return MultiViewGraph(tuple(gaussian_affinity(f, bandwidth) for f in project_views(cloud, angles)))
