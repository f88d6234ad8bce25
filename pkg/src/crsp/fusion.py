"""Common RSP (C-RSP) over a multi-view graph.

Per-view reference transition matrices are fused by an entrywise geometric
mean followed by row normalization; per-view costs are summed. The fused pair
then goes through the single-view RSP computation unchanged.

Two fusion modes decide what happens where only some views have an edge:

``intersection``
    the edge survives only if every view has it (the literal product rule);
``union``
    the mean and the sum run over the views that have the edge.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from crsp.errors import ValidationError
from crsp.graph import MultiViewGraph, RspInputs, cost_matrix, n_components, transition_matrix
from crsp.rsp import RspParams, rsp_dissimilarity

log = logging.getLogger(__name__)

FUSION_MODES = ("union", "intersection")
DEFAULT_MODE = "union"


def _check_mode(mode: str) -> str:
    if mode not in FUSION_MODES:
        raise ValidationError(f"fusion mode must be one of {FUSION_MODES}, got {mode!r}")
    return mode


def _stack(mats: Sequence, what: str) -> np.ndarray:
    if len(mats) == 0:
        raise ValidationError(f"need at least one {what}")
    try:
        stacked = np.stack([np.asarray(x, dtype=np.float64) for x in mats])
    except ValueError as exc:
        raise ValidationError(f"{what} dimension mismatch: {exc}") from exc
    if stacked.ndim != 3 or stacked.shape[1] != stacked.shape[2]:
        raise ValidationError(f"{what}s must be square, got {stacked.shape[1:]}")
    return stacked


def _fused_support(present: np.ndarray, mode: str) -> np.ndarray:
    if mode == "intersection":
        return present.all(axis=0)
    return present.any(axis=0)


def combine_probabilities(views: Sequence, mode: str = DEFAULT_MODE) -> np.ndarray:
    """Row-normalized entrywise geometric mean of transition matrices.

    Each input row is stochastic or, for a node isolated in that view,
    all-zero.
    """
    mode = _check_mode(mode)
    ps = _stack(views, "transition matrix")
    present = ps > 0
    support = _fused_support(present, mode)
    count = present.sum(axis=0)
    log_sum = np.where(present, np.log(np.where(present, ps, 1.0)), 0.0).sum(axis=0)
    fused = np.zeros(ps.shape[1:])
    fused[support] = np.exp(log_sum[support] / count[support])
    row = fused.sum(axis=1)
    empty = np.flatnonzero(row == 0)
    if empty.size:
        raise ValidationError(
            f"fused graph has isolated node(s) {empty.tolist()} under {mode} fusion"
        )
    return fused / row[:, None]


def combine_costs(costs: Sequence, mode: str = DEFAULT_MODE) -> np.ndarray:
    """Entrywise sum of per-view edge costs over the fused support.

    Zero entries mean "no edge" and contribute nothing; under intersection
    fusion an entry is kept only when every view has the edge.
    """
    mode = _check_mode(mode)
    cs = _stack(costs, "cost matrix")
    support = _fused_support(cs > 0, mode)
    return np.where(support, cs.sum(axis=0), 0.0)


def fused_inputs(graph: MultiViewGraph, mode: str = DEFAULT_MODE) -> RspInputs:
    """Fused reference transition matrix and fused costs for ``graph``.

    Under union fusion a node isolated in some view is allowed: that view
    simply contributes nothing to the node's row.
    """
    p_views = [transition_matrix(v, allow_isolated=mode == "union") for v in graph.views]
    c_views = [cost_matrix(v) for v in graph.views]
    p_bar = combine_probabilities(p_views, mode)
    c_bar = combine_costs(c_views, mode)
    if n_components(p_bar) > 1:
        raise ValidationError(f"fused graph disconnected under {mode} fusion")
    return RspInputs(p_bar, c_bar)


def crsp_dissimilarity(
    graph: MultiViewGraph, params: RspParams | None = None, mode: str = DEFAULT_MODE
) -> np.ndarray:
    """C-RSP dissimilarity of a multi-view graph (symmetric, zero diagonal)."""
    params = params or RspParams()
    inputs = fused_inputs(graph, mode)
    log.debug(
        "fused %d views (%s): %d edges", graph.m, mode, int(np.count_nonzero(inputs.p_ref))
    )
    return rsp_dissimilarity(inputs, params)
