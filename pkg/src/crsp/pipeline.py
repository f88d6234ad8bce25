"""End-to-end run: graph -> dissimilarity -> MDS coordinates -> clusters -> metrics.

A run is fully described by a :class:`PipelineConfig`; the resolved config is
written next to the artifacts so the run can be repeated from that file alone.
"""

from __future__ import annotations

import json
import logging
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from crsp.cluster import affinity_from_dissimilarity, spectral_clustering
from crsp.datasets import DEFAULT_ANGLES, SbmParams, generate_sbm, generate_sbm_raw, generate_swiss_roll, swiss_roll_graph
from crsp.embed import classical_mds
from crsp.errors import ValidationError
from crsp.fusion import DEFAULT_MODE, FUSION_MODES, crsp_dissimilarity
from crsp.graph import CULL_RULES, cull_disconnected, culled_indices
from crsp.metrics import evaluate
from crsp.rsp import DEFAULT_BETA, RspParams
from crsp.storage import load_manifest, write_labels, write_matrix_csv

log = logging.getLogger(__name__)

PARTIAL_MARKER = "PARTIAL"
ARTIFACTS = ("delta.csv", "coords.csv", "labels.csv", "metrics.json", "timing.json", "config.json")


@dataclass
class PipelineConfig:
    """Everything needed to reproduce a run.

    ``input`` is either ``{"manifest": path}`` or a generator spec such as
    ``{"generator": "sbm", "n": 500, "k": 3, "c": 10, "lam": 0.9, "m": 3,
    "seed": 0}`` or ``{"generator": "swissroll", "n": 400, "seed": 0}``.
    ``k`` may be left ``None`` when ground-truth labels are available.
    """

    input: dict = field(default_factory=dict)
    out_dir: str = "out"
    beta: float = DEFAULT_BETA
    mode: str = DEFAULT_MODE
    dims: int = 2
    k: int | None = None
    seed: int = 0
    cull: str = "views"
    nmi_average: str = "geometric"

    def validate(self) -> None:
        if not self.input:
            raise ValidationError("config has no input")
        if "manifest" not in self.input and self.input.get("generator") not in ("sbm", "swissroll"):
            raise ValidationError(f"input must name a manifest or a generator, got {self.input}")
        if self.mode not in FUSION_MODES:
            raise ValidationError(f"unknown fusion mode {self.mode!r}")
        if self.cull not in CULL_RULES + ("none",):
            raise ValidationError(f"cull must be one of {CULL_RULES + ('none',)}, got {self.cull!r}")
        if self.dims < 1:
            raise ValidationError(f"dims must be >= 1, got {self.dims}")
        RspParams(self.beta)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def load_input(spec: dict, cull: str = "views"):
    """Build the graph named by a config ``input`` entry.

    ``cull`` is a :func:`cull_disconnected` rule or ``"none"``; it applies to
    manifest and SBM inputs (kernel views of a point cloud are complete).

    Returns ``(graph, truth_labels_or_None, extra)`` where ``extra`` holds
    generator by-products worth writing out (e.g. Swiss roll points).
    """
    spec = dict(spec)
    extra = {}
    if "manifest" in spec:
        graph, truth = load_manifest(spec["manifest"])
        if cull != "none":
            culled = cull_disconnected(graph, cull)
            if truth is not None:
                truth = truth[culled_indices(graph, culled)]
            graph = culled
        return graph, truth, extra
    kind = spec.pop("generator")
    if kind == "sbm":
        params = SbmParams(**spec)
        if cull == "none":
            graph, truth = generate_sbm_raw(params)
        else:
            graph, truth = generate_sbm(params, cull)
        return graph, truth, extra
    angles = spec.pop("angles", DEFAULT_ANGLES)
    bandwidth = spec.pop("bandwidth", "median")
    cloud = generate_swiss_roll(**spec)
    extra["points.csv"] = cloud.points
    extra["roll_params.csv"] = np.column_stack([cloud.t, cloud.h])
    return swiss_roll_graph(cloud, angles, bandwidth), None, extra


@contextmanager
def _stage(name: str, timings: dict, state: dict):
    state["stage"] = name
    t0 = time.perf_counter()
    try:
        yield
    finally:
        timings[name] = time.perf_counter() - t0
        log.info("stage %-14s %.3f s", name, timings[name])


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute every stage and write the artifact set into ``config.out_dir``.

    On failure a ``PARTIAL`` marker naming the failed stage is written and the
    stage's exception propagates (its ``exit_code`` tells the CLI what to return).
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / PARTIAL_MARKER
    marker.write_text("stage: config\n")
    (out / "config.json").write_text(config.to_json())
    timings: dict[str, float] = {}
    state = {"stage": "config"}
    try:
        config.validate()
        with _stage("load", timings, state):
            graph, truth, extra = load_input(config.input, config.cull)
            for name, arr in extra.items():
                write_matrix_csv(out / name, arr)
            (out / "nodes.csv").write_text("".join(f"{i}\n" for i in graph.node_ids))
        with _stage("dissimilarity", timings, state):
            delta = crsp_dissimilarity(graph, RspParams(config.beta), config.mode)
            write_matrix_csv(out / "delta.csv", delta)
        with _stage("embed", timings, state):
            emb = classical_mds(delta, min(config.dims, graph.n - 1))
            write_matrix_csv(out / "coords.csv", emb.coords)
        k = config.k
        if k is None:
            if truth is None:
                raise ValidationError("k not given and no ground-truth labels to infer it from")
            k = int(np.unique(truth).size)
        with _stage("cluster", timings, state):
            pred = spectral_clustering(affinity_from_dissimilarity(delta), k, config.seed)
            write_labels(out / "labels.csv", pred)
        with _stage("evaluate", timings, state):
            metrics = {"ccr": None, "nmi": None}
            if truth is not None:
                metrics = evaluate(pred, truth, config.nmi_average).to_dict()
        metrics.update(
            n=graph.n,
            m=graph.m,
            k=k,
            mds_padded_dims=emb.padded_dims,
            mds_negative_eigenvalues=emb.negative_eigenvalues,
            timings=timings,
        )
        (out / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
        (out / "timing.json").write_text(json.dumps(timings, indent=2) + "\n")
    except Exception as exc:
        marker.write_text(f"stage: {state['stage']}\nerror: {type(exc).__name__}: {exc}\n")
        raise
    marker.unlink()
    return {name: out / name for name in ARTIFACTS}
