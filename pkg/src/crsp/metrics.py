"""Clustering quality against ground truth: CCR and NMI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from crsp.errors import ValidationError


def contingency(pred, truth) -> np.ndarray:
    """Count table with one row per predicted label, one column per true label."""
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValidationError(f"label length mismatch: {pred.size} vs {truth.size}")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max(initial=-1) + 1, t.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (p.ravel(), t.ravel()), 1)
    return table


def ccr(pred, truth) -> float:
    """Correct classification rate in percent under the best one-to-one
    matching of predicted to true labels (Hungarian method)."""
    table = contingency(pred, truth)
    if table.sum() == 0:
        raise ValidationError("empty labelings")
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(100.0 * table[rows, cols].sum() / table.sum())


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth, average: str = "geometric") -> float:
    """Normalized mutual information (natural log).

    ``average`` picks the normalizer: ``"geometric"`` uses sqrt(H_p H_t),
    ``"arithmetic"`` uses (H_p + H_t) / 2. Two single-cluster labelings score
    1; a single-cluster labeling against anything else scores 0.
    """
    table = contingency(pred, truth).astype(np.float64)
    n = table.sum()
    if n == 0:
        raise ValidationError("empty labelings")
    h_pred = _entropy(table.sum(axis=1))
    h_true = _entropy(table.sum(axis=0))
    if h_pred == 0.0 or h_true == 0.0:
        return 1.0 if h_pred == h_true else 0.0
    joint = table / n
    outer = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    nz = joint > 0
    mi = float((joint[nz] * np.log(joint[nz] / outer[nz])).sum())
    if average == "geometric":
        denom = np.sqrt(h_pred * h_true)
    elif average == "arithmetic":
        denom = 0.5 * (h_pred + h_true)
    else:
        raise ValidationError(f"unknown NMI average {average!r}")
    return float(min(1.0, max(0.0, mi / denom)))


@dataclass(frozen=True)
class MetricReport:
    ccr_percent: float
    nmi: float
    contingency: np.ndarray

    def to_dict(self) -> dict:
        return {"ccr": self.ccr_percent, "nmi": self.nmi}


def evaluate(pred, truth, average: str = "geometric") -> MetricReport:
    return MetricReport(ccr(pred, truth), nmi(pred, truth, average), contingency(pred, truth))
