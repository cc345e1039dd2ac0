"""Minority oversampling: SMOTE interpolation or samples from a trained generator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import LabeledDataset
from .gan import GanModel, generate

METHODS = ("none", "smote", "gan")


def nearest_neighbors(X: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` nearest other rows of every row (Euclidean, ties by index)."""
    sq = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(sq, np.inf)
    return np.argsort(sq, axis=1, kind="stable")[:, :k]


def smote(minority: np.ndarray, k: int = 5, n_new: int = 0, seed: int = 0) -> np.ndarray:
    """``n_new`` synthetic rows ``x + u * (x_nn - x)`` with ``u ~ U[0, 1]``.

    Base rows are taken cyclically over a seeded permutation of the minority
    rows and ``x_nn`` is one of the base row's ``k`` nearest minority neighbours.
    """
    X = np.asarray(minority, dtype=np.float64)
    if n_new < 0:
        raise ValueError("n_new must be nonnegative")
    if n_new == 0:
        return np.empty((0, X.shape[1] if X.ndim == 2 else 0))
    if X.ndim != 2 or len(X) < 2:
        raise ValueError("SMOTE needs at least 2 minority rows")
    if k < 1:
        raise ValueError("k must be >= 1")
    k = min(k, len(X) - 1)
    nn = nearest_neighbors(X, k)
    rng = np.random.default_rng(seed)
    base = rng.permutation(len(X))[np.arange(n_new) % len(X)]
    pick = nn[base, rng.integers(0, k, size=n_new)]
    u = rng.random((n_new, 1))
    return X[base] + u * (X[pick] - X[base])


@dataclass
class AugmentPlan:
    method: str = "none"
    model: Optional[GanModel] = None
    target_ratio: float = 1.0
    seed: int = 0
    k: int = 5

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown augmentation method {self.method!r}")
        if not 0 < self.target_ratio <= 1:
            raise ValueError("target_ratio must be in (0, 1]")
        if self.method == "gan" and self.model is None:
            raise ValueError("gan augmentation needs a trained model")


def n_synthetic(n_minority: int, n_majority: int, target_ratio: float) -> int:
    return max(0, int(round(target_ratio * n_majority)) - n_minority)


def apply_plan(train: LabeledDataset, plan: AugmentPlan) -> LabeledDataset:
    """Append synthetic minority rows until minority/majority reaches the target ratio."""
    if plan.method == "none":
        return train
    mino = train.minority_label
    counts = train.class_counts
    n_new = n_synthetic(counts[mino], counts[1 - mino], plan.target_ratio)
    if n_new == 0:
        return train
    if plan.method == "smote":
        X_new = smote(train.rows_of(mino), plan.k, n_new, plan.seed)
    else:
        X_new = generate(plan.model, n_new, plan.seed)
    return train.with_rows(X_new, mino)
