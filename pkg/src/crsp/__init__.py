"""Randomized shortest path dissimilarities on single- and multi-view graphs."""

from crsp.cluster import affinity_from_dissimilarity, kmeans, spectral_clustering
from crsp.embed import classical_mds
from crsp.errors import (
    ConvergenceError,
    CrspError,
    FormatError,
    NumericError,
    ValidationError,
)
from crsp.fusion import combine_costs, combine_probabilities, crsp_dissimilarity
from crsp.graph import (
    MultiViewGraph,
    RspInputs,
    cost_matrix,
    cull_disconnected,
    gaussian_affinity,
    rsp_inputs,
    transition_matrix,
    validate_view,
)
from crsp.metrics import ccr, evaluate, nmi
from crsp.rsp import RspParams, rsp_dissimilarity
from crsp.storage import load_manifest, load_multiview_graph, save_multiview_graph

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "CrspError",
    "FormatError",
    "MultiViewGraph",
    "NumericError",
    "RspInputs",
    "RspParams",
    "ValidationError",
    "affinity_from_dissimilarity",
    "ccr",
    "classical_mds",
    "combine_costs",
    "combine_probabilities",
    "cost_matrix",
    "crsp_dissimilarity",
    "cull_disconnected",
    "evaluate",
    "gaussian_affinity",
    "kmeans",
    "load_manifest",
    "load_multiview_graph",
    "nmi",
    "rsp_dissimilarity",
    "rsp_inputs",
    "save_multiview_graph",
    "spectral_clustering",
    "transition_matrix",
    "validate_view",
]
