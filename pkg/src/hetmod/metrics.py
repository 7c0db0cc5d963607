"""Partition comparison: normalized mutual information and misclassification."""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .modularity import Partition

__all__ = ["ScoreReport", "confusion", "misclassification", "nmi", "score"]


def confusion(x: Sequence[int], y: Sequence[int]) -> np.ndarray:
    """Contingency table of two label vectors (rows: distinct ``x``, cols: distinct ``y``)."""
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"label vectors must be 1-d and equally long, got {x.shape} and {y.shape}")
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    table = np.zeros((xi.max() + 1 if len(xi) else 0, yi.max() + 1 if len(yi) else 0), dtype=np.int64)
    np.add.at(table, (xi, yi), 1)
    return table


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return -math.fsum(p * np.log(p))


def nmi(x: Sequence[int], y: Sequence[int]) -> float:
    """``2 I(X, Y) / (H(X) + H(Y))`` from the empirical joint distribution.

    Both partitions trivial (a single cluster each) gives 1; exactly one trivial
    gives 0.
    """
    table = confusion(x, y)
    n = table.sum()
    if n == 0:
        raise ValueError("empty label vectors")
    hx = _entropy(table.sum(axis=1))
    hy = _entropy(table.sum(axis=0))
    if hx + hy == 0:
        return 1.0
    # I = H(X) + H(Y) - H(X, Y); every entropy is an fsum over integer counts,
    # so the result is exactly symmetric and exactly 1 for identical partitions
    mi = hx + hy - _entropy(table.ravel())
    return float(min(max(2.0 * mi / (hx + hy), 0.0), 1.0))


def misclassification(pred: Sequence[int], truth: Sequence[int]) -> float:
    """Fraction of nodes whose predicted label disagrees with the truth after the
    best one-to-one matching of labels.

    The matching maximizes agreement exactly (Hungarian assignment on the
    contingency table); when the label counts differ, unmatched predicted
    clusters count as errors.
    """
    table = confusion(pred, truth)
    n = table.sum()
    if n == 0:
        raise ValueError("empty label vectors")
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(1.0 - table[rows, cols].sum() / n)


@dataclass
class ScoreReport:
    nmi: float
    nmi_per_type: list[float]
    misclassification_per_type: list[float]
    confusion_per_type: list[np.ndarray]


def score(pred: Partition, truth: Partition) -> ScoreReport:
    """Pooled and per-type agreement between a detected and a reference partition."""
    if pred.type_sizes != truth.type_sizes:
        raise ValueError("partitions cover different node sets")
    per_type = [(p, t) for p, t in zip(pred.labels, truth.labels) if len(p)]
    return ScoreReport(
        nmi=nmi(pred.flat(), truth.flat()),
        nmi_per_type=[nmi(p, t) for p, t in per_type],
        misclassification_per_type=[misclassification(p, t) for p, t in per_type],
        confusion_per_type=[confusion(p, t) for p, t in per_type],
    )
